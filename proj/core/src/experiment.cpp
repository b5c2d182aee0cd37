#include "mta/experiment.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mta/error.hpp"
#include "mta/io.hpp"
#include "mta/metrics.hpp"
#include "mta/noise.hpp"

namespace mta {

namespace {

constexpr double kBoundDelta = 0.05;

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string opt_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::kCe:
      return "ce";
    case Method::kFinetune:
      return "finetune";
    case Method::kForward:
      return "forward";
    case Method::kGlc:
      return "glc";
    case Method::kSmodel:
      return "smodel";
    case Method::kMeta:
      return "meta";
  }
  return "ce";
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods{Method::kCe,  Method::kFinetune, Method::kForward,
                                           Method::kGlc, Method::kSmodel,   Method::kMeta};
  return methods;
}

Method parse_method(const std::string& text) {
  for (Method m : all_methods()) {
    if (to_string(m) == text) return m;
  }
  throw InvalidConfig("unknown method '" + text +
                      "' (valid: ce, finetune, forward, glc, smodel, meta)");
}

bool requires_meta_split(Method method) {
  return method == Method::kFinetune || method == Method::kGlc || method == Method::kMeta;
}

bool estimates_transition(Method method) {
  return method == Method::kForward || method == Method::kGlc || method == Method::kSmodel ||
         method == Method::kMeta;
}

MixtureSpec ReferenceTask::mixture() const {
  const std::size_t total = n_train + n_meta + n_test;
  return circle_mixture(classes, (total + classes - 1) / classes, radius, stddev);
}

ExperimentConfig reference_config(std::uint64_t seed) {
  ExperimentConfig config;
  config.seed = seed;
  config.meta.seed = seed;
  config.meta.alpha = 0.1;
  config.meta.beta = 0.5;
  config.meta.train_batch = 128;
  config.meta.meta_batch = 32;
  config.meta.iterations = 1500;
  config.meta.log_every = 100;
  return config;
}

NoiseSpec make_noise_spec(NoiseKind kind, double rate, std::size_t classes,
                          std::vector<std::pair<int, int>> pairs) {
  NoiseSpec spec;
  spec.kind = kind;
  spec.rate = rate;
  if (kind == NoiseKind::kPairs) spec.pairs = pairs.empty() ? cyclic_pairs(classes) : pairs;
  return spec;
}

NoisyTask make_noisy_task(const ReferenceTask& task, const NoiseSpec& noise, std::uint64_t seed) {
  SeededRng gen_rng(SeededRng::derive(seed, 10));
  SeededRng split_rng(SeededRng::derive(seed, 11));
  SeededRng noise_rng(SeededRng::derive(seed, 12));
  const LabeledDataset raw = generate_mixture(task.mixture(), gen_rng);
  LabeledDataset ds = split_dataset(raw, task.n_train, task.n_meta, task.n_test, split_rng);
  DenseMatrix truth = noise_matrix(task.classes, noise);
  const Batch train = clean_view(ds, Split::kTrain);
  Corruption corruption = corrupt_labels(train.labels, truth, noise_rng);
  return {with_noisy_labels(ds, corruption.noisy_labels), std::move(truth), noise};
}

std::string format_record(const ExperimentRecord& r) {
  return to_string(r.method) + ',' + to_string(r.noise_kind) + ',' + format_double(r.rate) + ',' +
         std::to_string(r.seed) + ',' + format_double(r.test_accuracy) + ',' +
         opt_field(r.estimation_error) + ',' + opt_field(r.bound_value) + ',' +
         format_double(r.wall_time_seconds) + ',' + r.status;
}

ExperimentRecord parse_record(const std::string& line, std::size_t line_no) {
  const auto cells = split_fields(line);
  if (cells.size() != 9) throw ParseError(line_no, "expected 9 result fields");
  try {
    ExperimentRecord r;
    r.method = parse_method(cells[0]);
    r.noise_kind = parse_noise_kind(cells[1]);
    r.rate = parse_double(cells[2]);
    r.seed = std::stoull(cells[3]);
    r.test_accuracy = parse_double(cells[4]);
    if (!cells[5].empty()) r.estimation_error = parse_double(cells[5]);
    if (!cells[6].empty()) r.bound_value = parse_double(cells[6]);
    r.wall_time_seconds = parse_double(cells[7]);
    r.status = cells[8];
    return r;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(line_no, e.what());
  }
}

std::vector<ExperimentRecord> read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader) {
    throw ParseError(1, "unexpected results header");
  }
  std::vector<ExperimentRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty()) out.push_back(parse_record(line, line_no));
  }
  return out;
}

void append_results_csv(const std::filesystem::path& path,
                        const std::vector<ExperimentRecord>& records) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for appending");
  if (fresh) out << kResultsHeader << '\n';
  for (const auto& r : records) out << format_record(r) << '\n';
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

ExperimentSession::ExperimentSession(LabeledDataset dataset, NoiseSpec noise,
                                     std::optional<DenseMatrix> truth, ExperimentConfig config)
    : dataset_(std::move(dataset)),
      noise_(std::move(noise)),
      truth_(std::move(truth)),
      config_(std::move(config)) {
  dataset_.validate();
  config_.meta.seed = config_.seed;
  config_.meta.validate();
  train_ = view(dataset_, Split::kTrain);
  meta_ = clean_view(dataset_, Split::kMeta);
  test_ = clean_view(dataset_, Split::kTest);
  if (train_.size() == 0) throw InvalidConfig("dataset has no train split");
  if (truth_ && (truth_->rows() != dataset_.classes || truth_->cols() != dataset_.classes)) {
    throw ShapeError("ground-truth transition does not match the class count");
  }
}

const MlpParams& ExperimentSession::ce_model() {
  if (!ce_model_) ce_model_ = train_ce(train_, dataset_.classes, config_.mlp, config_.ce, config_.seed);
  return *ce_model_;
}

const EstimatorOutput& ExperimentSession::glc_estimate() {
  if (!glc_) {
    if (meta_.size() == 0) throw InvalidConfig("glc estimate requires a meta split");
    glc_ = estimate_glc(ce_model(), meta_);
  }
  return *glc_;
}

const EstimatorOutput& ExperimentSession::forward_estimate() {
  if (!forward_) forward_ = estimate_forward(ce_model(), train_.features);
  return *forward_;
}

DenseMatrix ExperimentSession::initial_transition(InitSource source) {
  switch (source) {
    case InitSource::kGlc:
      return glc_estimate().matrix;
    case InitSource::kForward:
      return forward_estimate().matrix;
    case InitSource::kUniform:
      return uniform_state(dataset_.classes).matrix();
    case InitSource::kIdentityish:
      return identityish_state(dataset_.classes).matrix();
  }
  return glc_estimate().matrix;
}

Monitor ExperimentSession::monitor() const {
  return Monitor{meta_.size() > 0 ? &meta_ : nullptr, test_.size() > 0 ? &test_ : nullptr,
                 truth_};
}

double ExperimentSession::bound_for(const MlpParams& params) const {
  BoundInputs in;
  in.input_norm = input_norm_bound(train_.features);
  in.depth = params.depth();
  in.layer_norms = frobenius_norms(params);
  in.train_size = train_.size();
  in.classes = dataset_.classes;
  in.loss_bound = clamped_loss_bound(kDefaultProbEps);
  in.delta = kBoundDelta;
  for (double m : in.layer_norms) {
    if (!(m > 0.0)) return 0.0;
  }
  return rademacher_bound(in);
}

ExperimentOutcome ExperimentSession::run(Method method) {
  const auto start = std::chrono::steady_clock::now();
  if (requires_meta_split(method) && meta_.size() == 0) {
    throw InvalidConfig("method " + to_string(method) + " requires a meta split");
  }
  if (test_.size() == 0) throw InvalidConfig("dataset has no test split");

  ExperimentOutcome out;
  const TrainConfig& mc = config_.meta;
  SmodelConfig stage_two;
  stage_two.lr = mc.alpha;
  stage_two.batch_size = mc.train_batch;
  stage_two.iterations = mc.iterations;
  stage_two.seed = config_.seed;
  stage_two.log_every = mc.log_every;

  switch (method) {
    case Method::kCe:
      out.params = ce_model();
      break;
    case Method::kFinetune:
      out.params = finetune(ce_model(), meta_, config_.finetune, config_.seed);
      break;
    case Method::kForward:
    case Method::kGlc: {
      const EstimatorOutput& est =
          method == Method::kForward ? forward_estimate() : glc_estimate();
      out.estimate = est.matrix;
      out.initial_estimate = est.matrix;
      stage_two.lr_transition = 0.0;
      SmodelResult fit =
          config_.warm_start
              ? train_smodel_from(train_, ce_model(),
                                  TransitionState::from_logits(logits_from_estimate(est.matrix)),
                                  stage_two, monitor())
              : train_with_fixed_transition(train_, config_.mlp, est.matrix, stage_two,
                                            monitor());
      out.params = std::move(fit.params);
      out.trace = std::move(fit.trace);
      break;
    }
    case Method::kSmodel: {
      const DenseMatrix init = initial_transition(mc.init);
      out.initial_estimate = init;
      stage_two.lr_transition = config_.smodel_lr_transition;
      SmodelResult fit = train_smodel(train_, config_.mlp,
                                      TransitionState::from_logits(logits_from_estimate(init)),
                                      stage_two, monitor());
      out.params = std::move(fit.params);
      out.estimate = fit.state.matrix();
      out.trace = std::move(fit.trace);
      break;
    }
    case Method::kMeta: {
      const DenseMatrix init = initial_transition(mc.init);
      out.initial_estimate = init;
      MetaResult fit =
          run_meta_adaptation(train_, meta_, mc, config_.mlp,
                              TransitionState::from_logits(logits_from_estimate(init)), monitor());
      out.params = std::move(fit.params);
      out.estimate = fit.state.matrix();
      out.trace = std::move(fit.trace);
      break;
    }
  }

  ExperimentRecord& r = out.record;
  r.method = method;
  r.noise_kind = noise_.kind;
  r.rate = noise_.rate;
  r.seed = config_.seed;
  r.test_accuracy = accuracy(predict(out.params, test_.features), test_.labels);
  if (out.estimate && truth_) r.estimation_error = estimation_error(*truth_, *out.estimate);
  r.bound_value = bound_for(out.params);
  r.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::string run_metadata_json(const ExperimentConfig& config, Method method,
                              const NoiseSpec& noise) {
  nlohmann::ordered_json j;
  j["method"] = to_string(method);
  j["seed"] = config.seed;
  j["noise"] = {{"kind", to_string(noise.kind)},
                {"rate", noise.rate},
                {"pairs", format_pairs(noise.pairs)}};
  j["mlp"] = {{"hidden", config.mlp.hidden}, {"init_scale", config.mlp.init_scale}};
  j["ce"] = {{"lr", config.ce.lr},
             {"batch_size", config.ce.batch_size},
             {"epochs", config.ce.epochs}};
  j["finetune"] = {{"lr", config.finetune.lr},
                   {"batch_size", config.finetune.batch_size},
                   {"epochs", config.finetune.epochs}};
  const TrainConfig& m = config.meta;
  j["train"] = {{"alpha", m.alpha},
                {"beta", m.meta_step_size()},
                {"train_batch", m.train_batch},
                {"meta_batch", m.meta_batch},
                {"iterations", m.iterations},
                {"init", to_string(m.init)},
                {"hypergrad_mode", to_string(m.mode)},
                {"log_every", m.log_every}};
  if (config.smodel_lr_transition) j["smodel_lr_transition"] = *config.smodel_lr_transition;
  j["warm_start"] = config.warm_start;
  return j.dump(2) + "\n";
}

}  // namespace mta
