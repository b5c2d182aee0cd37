#include "mta/meta.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "mta/error.hpp"
#include "mta/io.hpp"
#include "mta/metrics.hpp"

namespace mta {

namespace {

void require_batch(const Batch& batch, std::size_t classes, const char* what) {
  if (batch.size() == 0) throw InvalidInput(std::string(what) + ": empty batch");
  if (batch.features.rows() != batch.size()) {
    throw ShapeError(std::string(what) + ": features and labels differ in length");
  }
  for (int y : batch.labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= classes) {
      throw InvalidInput(std::string(what) + ": label " + std::to_string(y) + " out of range");
    }
  }
}

void require_classes(const MlpParams& params, const TransitionState& state, const char* what) {
  if (params.num_classes() != state.classes()) {
    throw ShapeError(std::string(what) + ": classifier has " +
                     std::to_string(params.num_classes()) + " outputs but transition is " +
                     std::to_string(state.classes()) + "x" + std::to_string(state.classes()));
  }
}

void guard_loss(double loss, std::size_t iteration, const char* which) {
  if (!std::isfinite(loss) || loss > kDivergenceLoss) {
    std::ostringstream msg;
    msg << which << " loss " << loss;
    throw DivergenceError(static_cast<long>(iteration), msg.str());
  }
}

// ∂/∂T of the directional derivative of the noisy loss along the weight
// direction that produced `tangent`.
DenseMatrix mixed_transition_derivative(const TransitionState& state, const TangentResult& tangent,
                                        const Batch& batch, double eps) {
  const DenseMatrix& t = state.matrix();
  const std::size_t c = t.rows();
  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  DenseMatrix out(c, c);
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto y = static_cast<std::size_t>(batch.labels[b]);
    const auto f = tangent.cache.probs.row(b);
    const auto f_dot = tangent.probs_tangent.row(b);
    double q = 0.0;
    double q_dot = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
      q += t(k, y) * f[k];
      q_dot += t(k, y) * f_dot[k];
    }
    if (!(q > eps)) continue;
    for (std::size_t k = 0; k < c; ++k) {
      out(k, y) += (-f_dot[k] / q + f[k] * q_dot / (q * q)) * inv_batch;
    }
  }
  return out;
}

}  // namespace

NoisyLossGrads noisy_loss_and_grads(const MlpParams& params, const TransitionState& state,
                                    const Batch& batch, double eps) {
  require_classes(params, state, "noisy_loss_and_grads");
  require_batch(batch, state.classes(), "noisy_loss_and_grads");
  const ForwardCache cache = forward(params, batch.features);
  const DenseMatrix& t = state.matrix();
  const std::size_t c = t.rows();
  const double inv_batch = 1.0 / static_cast<double>(batch.size());

  NoisyLossGrads out;
  out.d_matrix = DenseMatrix(c, c);
  DenseMatrix upstream(batch.size(), c);
  double total = 0.0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto y = static_cast<std::size_t>(batch.labels[b]);
    const auto f = cache.probs.row(b);
    double q = 0.0;
    for (std::size_t k = 0; k < c; ++k) q += t(k, y) * f[k];
    if (q > eps) {
      total += -std::log(q);
      for (std::size_t k = 0; k < c; ++k) {
        upstream(b, k) = -t(k, y) / q;
        out.d_matrix(k, y) += -f[k] / q * inv_batch;
      }
    } else {
      total += -std::log(eps);
    }
  }
  out.loss = total * inv_batch;
  out.d_weights = backward(params, cache, upstream);
  return out;
}

CleanLossGrads clean_loss_and_grads(const MlpParams& params, const Batch& batch, double eps) {
  require_batch(batch, params.num_classes(), "clean_loss_and_grads");
  const ForwardCache cache = forward(params, batch.features);
  DenseMatrix upstream(batch.size(), params.num_classes());
  double total = 0.0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto y = static_cast<std::size_t>(batch.labels[b]);
    const double p = cache.probs(b, y);
    total += cross_entropy(cache.probs.row(b), batch.labels[b], eps);
    if (p > eps) upstream(b, y) = -1.0 / p;
  }
  CleanLossGrads out;
  out.loss = total / static_cast<double>(batch.size());
  out.d_weights = backward(params, cache, upstream);
  return out;
}

double clean_loss(const MlpParams& params, const Batch& batch, double eps) {
  require_batch(batch, params.num_classes(), "clean_loss");
  const ForwardCache cache = forward(params, batch.features);
  double total = 0.0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    total += cross_entropy(cache.probs.row(b), batch.labels[b], eps);
  }
  return total / static_cast<double>(batch.size());
}

MlpParams virtual_update(const MlpParams& params, const TransitionState& state,
                         const Batch& train_batch, double alpha) {
  if (!(alpha >= 0.0)) throw InvalidConfig("virtual_update: alpha must be non-negative");
  const NoisyLossGrads g = noisy_loss_and_grads(params, state, train_batch);
  return sgd_step(params, g.d_weights, alpha);
}

std::string to_string(HypergradMode mode) {
  return mode == HypergradMode::kExact ? "exact" : "fd-trick";
}

HypergradMode parse_hypergrad_mode(const std::string& text) {
  if (text == "exact") return HypergradMode::kExact;
  if (text == "fd-trick" || text == "fd") return HypergradMode::kFdTrick;
  throw InvalidConfig("unknown hypergradient mode '" + text + "' (expected exact or fd-trick)");
}

Hypergradient compute_hypergradient(const TransitionState& state, const MlpParams& params,
                                    const Batch& train_batch, const Batch& meta_batch,
                                    double alpha, HypergradMode mode) {
  if (!(alpha >= 0.0)) throw InvalidConfig("hypergradient: alpha must be non-negative");
  require_batch(meta_batch, state.classes(), "hypergradient");
  const std::size_t c = state.classes();

  Hypergradient out;
  const NoisyLossGrads train = noisy_loss_and_grads(params, state, train_batch);
  out.train_loss = train.loss;
  const MlpParams virtual_params = sgd_step(params, train.d_weights, alpha);
  const CleanLossGrads meta = clean_loss_and_grads(virtual_params, meta_batch);
  out.meta_loss = meta.loss;
  if (alpha == 0.0) {
    out.d_logits = DenseMatrix(c, c);
    return out;
  }
  const WeightList& v = meta.d_weights;

  DenseMatrix mixed;
  if (mode == HypergradMode::kExact) {
    const TangentResult tangent = forward_tangent(params, v, train_batch.features);
    mixed = grad_wrt_logits(state,
                            mixed_transition_derivative(state, tangent, train_batch,
                                                        kDefaultProbEps));
  } else {
    const double r = kFdTrickEps / (norm(v) + kFdTrickEps);
    MlpParams plus = params;
    MlpParams minus = params;
    axpy(r, v, plus.weights);
    axpy(-r, v, minus.weights);
    const DenseMatrix g_plus =
        grad_wrt_logits(state, noisy_loss_and_grads(plus, state, train_batch).d_matrix);
    const DenseMatrix g_minus =
        grad_wrt_logits(state, noisy_loss_and_grads(minus, state, train_batch).d_matrix);
    mixed = scaled(subtract(g_plus, g_minus), 1.0 / (2.0 * r));
  }
  out.d_logits = scaled(mixed, -alpha);
  return out;
}

DenseMatrix hypergradient(const TransitionState& state, const MlpParams& params,
                          const Batch& train_batch, const Batch& meta_batch, double alpha,
                          HypergradMode mode) {
  return compute_hypergradient(state, params, train_batch, meta_batch, alpha, mode).d_logits;
}

TransitionState meta_step(const TransitionState& state, const MlpParams& params,
                          const Batch& train_batch, const Batch& meta_batch, double alpha,
                          double beta, HypergradMode mode) {
  if (!(beta >= 0.0)) throw InvalidConfig("meta_step: beta must be non-negative");
  const DenseMatrix grad = hypergradient(state, params, train_batch, meta_batch, alpha, mode);
  DenseMatrix logits = state.logits();
  axpy(-beta, grad, logits);
  return TransitionState::from_logits(std::move(logits));
}

MlpParams classifier_step(const MlpParams& params, const TransitionState& state,
                          const Batch& train_batch, double alpha) {
  return virtual_update(params, state, train_batch, alpha);
}

BatchSampler::BatchSampler(std::size_t population, std::size_t batch_size, std::uint64_t seed)
    : batch_size_(batch_size), order_(population), rng_(seed) {
  if (population == 0) throw InvalidConfig("BatchSampler: empty population");
  if (batch_size == 0) throw InvalidConfig("BatchSampler: batch size must be positive");
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  reshuffle();
}

void BatchSampler::reshuffle() {
  rng_.shuffle(std::span<std::size_t>(order_));
  cursor_ = 0;
}

std::vector<std::size_t> BatchSampler::next() {
  std::vector<std::size_t> batch;
  batch.reserve(batch_size_);
  while (batch.size() < batch_size_) {
    if (cursor_ == order_.size()) reshuffle();
    batch.push_back(order_[cursor_++]);
  }
  return batch;
}

Batch gather(const Batch& source, const std::vector<std::size_t>& rows) {
  Batch out;
  out.features = gather_rows(source.features, rows);
  out.labels.reserve(rows.size());
  for (std::size_t r : rows) out.labels.push_back(source.labels[r]);
  return out;
}

std::string to_string(InitSource source) {
  switch (source) {
    case InitSource::kGlc:
      return "glc";
    case InitSource::kForward:
      return "forward";
    case InitSource::kUniform:
      return "uniform";
    case InitSource::kIdentityish:
      return "identity";
  }
  return "glc";
}

InitSource parse_init_source(const std::string& text) {
  if (text == "glc") return InitSource::kGlc;
  if (text == "forward") return InitSource::kForward;
  if (text == "uniform") return InitSource::kUniform;
  if (text == "identity" || text == "identity-ish" || text == "identityish") {
    return InitSource::kIdentityish;
  }
  throw InvalidConfig("unknown init source '" + text +
                      "' (expected glc, forward, uniform or identity)");
}

void TrainConfig::validate() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidConfig("alpha must be >= 0");
  if (beta && (!(*beta >= 0.0) || !std::isfinite(*beta))) throw InvalidConfig("beta must be >= 0");
  if (train_batch == 0 || meta_batch == 0) throw InvalidConfig("batch sizes must be >= 1");
  if (log_every == 0) throw InvalidConfig("log_every must be >= 1");
}

std::string TrainTrace::to_csv() const {
  std::string out = "iter,noisy_loss,meta_loss,est_error,test_acc\n";
  const auto opt = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
  };
  for (const auto& r : rows) {
    out += std::to_string(r.iteration) + ',' + format_double(r.noisy_loss) + ',' +
           opt(r.meta_loss) + ',' + opt(r.estimation_error) + ',' + opt(r.test_accuracy) + '\n';
  }
  return out;
}

TrainTrace TrainTrace::from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || line != "iter,noisy_loss,meta_loss,est_error,test_acc") {
    throw ParseError(1, "unexpected trace header");
  }
  TrainTrace trace;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (cells.size() != 5) throw ParseError(line_no, "expected 5 fields");
    const auto opt = [](const std::string& s) -> std::optional<double> {
      if (s.empty()) return std::nullopt;
      return parse_double(s);
    };
    try {
      TraceRow row;
      row.iteration = static_cast<std::size_t>(parse_int(cells[0]));
      row.noisy_loss = parse_double(cells[1]);
      row.meta_loss = opt(cells[2]);
      row.estimation_error = opt(cells[3]);
      row.test_accuracy = opt(cells[4]);
      trace.rows.push_back(row);
    } catch (const InvalidInput& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return trace;
}

TraceRow Monitor::observe(std::size_t iteration, double noisy_loss, const MlpParams& params,
                          const TransitionState& state) const {
  TraceRow row;
  row.iteration = iteration;
  row.noisy_loss = noisy_loss;
  if (meta != nullptr && meta->size() > 0) row.meta_loss = clean_loss(params, *meta);
  if (truth) row.estimation_error = estimation_error(*truth, state.matrix());
  if (test != nullptr && test->size() > 0) {
    row.test_accuracy = accuracy(predict(params, test->features), test->labels);
  }
  return row;
}

MlpParams initial_classifier(const std::vector<std::size_t>& dims, double init_scale,
                             std::uint64_t seed) {
  SeededRng rng(SeededRng::derive(seed, 0));
  return init_mlp(dims, init_scale, rng);
}

std::uint64_t train_stream_seed(std::uint64_t seed) { return SeededRng::derive(seed, 1); }
std::uint64_t meta_stream_seed(std::uint64_t seed) { return SeededRng::derive(seed, 2); }

TransitionState identityish_state(std::size_t classes) {
  const double off = (1.0 - kIdentityishDiagonal) / static_cast<double>(classes - 1);
  DenseMatrix t(classes, classes, off);
  for (std::size_t i = 0; i < classes; ++i) t(i, i) = kIdentityishDiagonal;
  return TransitionState::from_logits(logits_from_estimate(t));
}

TransitionState uniform_state(std::size_t classes) {
  return TransitionState::from_logits(DenseMatrix(classes, classes));
}

MetaResult run_meta_adaptation(const Batch& train, const Batch& meta, const TrainConfig& config,
                               const MlpConfig& mlp, const TransitionState& init,
                               const Monitor& monitor) {
  config.validate();
  if (train.size() == 0) throw InvalidConfig("run_meta_adaptation: empty train split");
  if (meta.size() == 0) throw InvalidConfig("run_meta_adaptation: empty meta split");
  const std::size_t c = init.classes();
  const double alpha = config.alpha;
  const double beta = config.meta_step_size();

  MetaResult result{initial_classifier(mlp.dims(train.features.cols(), c), mlp.init_scale,
                                       config.seed),
                    init, {}};
  BatchSampler train_sampler(train.size(), config.train_batch, train_stream_seed(config.seed));
  BatchSampler meta_sampler(meta.size(), config.meta_batch, meta_stream_seed(config.seed));

  for (std::size_t t = 1; t <= config.iterations; ++t) {
    const Batch train_batch = gather(train, train_sampler.next());
    const Batch meta_batch = gather(meta, meta_sampler.next());

    const Hypergradient hg = compute_hypergradient(result.state, result.params, train_batch,
                                                   meta_batch, alpha, config.mode);
    guard_loss(hg.meta_loss, t, "meta");
    DenseMatrix logits = result.state.logits();
    axpy(-beta, hg.d_logits, logits);
    if (!logits.all_finite()) throw DivergenceError(static_cast<long>(t), "non-finite logits");
    result.state = TransitionState::from_logits(std::move(logits));

    const NoisyLossGrads step = noisy_loss_and_grads(result.params, result.state, train_batch);
    guard_loss(step.loss, t, "noisy");
    result.params = sgd_step(result.params, step.d_weights, alpha);

    if (t % config.log_every == 0 || t == config.iterations) {
      result.trace.rows.push_back(monitor.observe(t, step.loss, result.params, result.state));
    }
  }
  return result;
}

MetaResult run_meta_adaptation(const LabeledDataset& dataset, const TrainConfig& config,
                               const MlpConfig& mlp, std::optional<TransitionState> init,
                               std::optional<DenseMatrix> truth) {
  dataset.validate();
  if (dataset.count(Split::kTrain) == 0) throw InvalidConfig("dataset has no train split");
  if (dataset.count(Split::kMeta) == 0) throw InvalidConfig("dataset has no meta split");
  if (!init) {
    switch (config.init) {
      case InitSource::kUniform:
        init = uniform_state(dataset.classes);
        break;
      case InitSource::kIdentityish:
        init = identityish_state(dataset.classes);
        break;
      default:
        throw InvalidConfig("run_meta_adaptation: " + to_string(config.init) +
                            " initialization requires an estimated transition");
    }
  }
  const Batch train = view(dataset, Split::kTrain);
  const Batch meta = clean_view(dataset, Split::kMeta);
  const Batch test = clean_view(dataset, Split::kTest);
  Monitor monitor{&meta, test.size() > 0 ? &test : nullptr, std::move(truth)};
  return run_meta_adaptation(train, meta, config, mlp, *init, monitor);
}

}  // namespace mta
