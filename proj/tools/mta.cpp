// mta: generate mixtures, inject label noise, train and evaluate transition
// estimators, and sweep noise grids into a results CSV.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mta/error.hpp"
#include "mta/experiment.hpp"
#include "mta/io.hpp"
#include "mta/metrics.hpp"
#include "mta/noise.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kRuntime = 2, kIo = 3 };

fs::path output_root() {
  if (const char* env = std::getenv("MTA_OUTPUT_DIR"); env && *env) return env;
  return "mta-out";
}

fs::path sidecar(const fs::path& data, const std::string& suffix) {
  fs::path p = data;
  p.replace_extension(suffix);
  return p;
}

json matrix_json(const mta::DenseMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

mta::DenseMatrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw mta::InvalidInput("transition must be a non-empty array");
  const std::size_t n = j.size();
  mta::DenseMatrix m(n, j[0].size());
  for (std::size_t r = 0; r < n; ++r) {
    if (j[r].size() != m.cols()) throw mta::ShapeError("ragged transition matrix");
    for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

json parse_json_file(const fs::path& path) {
  const std::string text = mta::read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw mta::ParseError(1, path.string() + ": " + e.what());
  }
}

std::string describe(const mta::DenseMatrix& m) {
  std::ostringstream out;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out << "  ";
    for (std::size_t c = 0; c < m.cols(); ++c) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%8.4f", m(r, c));
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

// Shared training knobs for train and sweep.
struct TrainFlags {
  std::vector<std::size_t> hidden{32, 32};
  double init_scale = 0.3;
  double alpha = 0.1;
  std::optional<double> beta;
  std::size_t train_batch = 128;
  std::size_t meta_batch = 32;
  std::size_t iterations = 1500;
  std::size_t log_every = 100;
  std::string init = "glc";
  std::string mode = "exact";
  std::size_t ce_epochs = 30;
  std::size_t finetune_epochs = 20;
  std::optional<double> smodel_lr_transition;
  bool warm_start = false;

  void attach(CLI::App* app) {
    app->add_option("--hidden", hidden, "Hidden layer widths, comma separated")->delimiter(',');
    app->add_option("--init-scale", init_scale, "Uniform weight init half-width");
    app->add_option("--alpha", alpha, "Classifier step size");
    app->add_option("--beta", beta, "Transition step size (default 0.5)");
    app->add_option("--train-batch", train_batch, "Noisy mini-batch size");
    app->add_option("--meta-batch", meta_batch, "Meta mini-batch size");
    app->add_option("--iterations", iterations, "Training iterations");
    app->add_option("--log-every", log_every, "Trace interval in iterations");
    app->add_option("--init", init, "Transition init: glc, forward, uniform, identity");
    app->add_option("--mode", mode, "Hypergradient mode: exact or fd-trick");
    app->add_option("--ce-epochs", ce_epochs, "Epochs of the cross-entropy stage");
    app->add_option("--finetune-epochs", finetune_epochs, "Fine-tuning epochs on meta data");
    app->add_option("--smodel-lr-transition", smodel_lr_transition,
                    "S-Model transition step size (default: alpha)");
    app->add_flag("--warm-start", warm_start,
                  "Start Forward/GLC retraining from the cross-entropy weights");
  }

  mta::ExperimentConfig config(std::uint64_t seed) const {
    mta::ExperimentConfig c = mta::reference_config(seed);
    c.mlp.hidden = hidden;
    c.mlp.init_scale = init_scale;
    c.meta.alpha = alpha;
    if (beta) c.meta.beta = *beta;
    c.meta.train_batch = train_batch;
    c.meta.meta_batch = meta_batch;
    c.meta.iterations = iterations;
    c.meta.log_every = log_every;
    c.meta.init = mta::parse_init_source(init);
    c.meta.mode = mta::parse_hypergrad_mode(mode);
    c.ce.epochs = ce_epochs;
    c.finetune.epochs = finetune_epochs;
    c.smodel_lr_transition = smodel_lr_transition;
    c.warm_start = warm_start;
    c.meta.validate();
    return c;
  }
};

// ---- generate --------------------------------------------------------------

struct GenerateArgs {
  std::size_t classes = 3;
  std::size_t per_class = 0;
  double radius = 2.5;
  double stddev = 1.0;
  std::optional<std::size_t> n_train, n_meta, n_test;
  std::uint64_t seed = 0;
  fs::path out;
};

int cmd_generate(const GenerateArgs& a) {
  mta::SeededRng gen_rng(mta::SeededRng::derive(a.seed, 10));
  const mta::MixtureSpec spec = mta::circle_mixture(a.classes, a.per_class, a.radius, a.stddev);
  mta::LabeledDataset ds = mta::generate_mixture(spec, gen_rng);
  const bool split = a.n_train || a.n_meta || a.n_test;
  if (split) {
    mta::SeededRng split_rng(mta::SeededRng::derive(a.seed, 11));
    ds = mta::split_dataset(ds, a.n_train.value_or(0), a.n_meta.value_or(0),
                            a.n_test.value_or(0), split_rng);
  }
  mta::write_dataset_csv(ds, a.out);
  json meta;
  meta["classes"] = a.classes;
  meta["per_class"] = a.per_class;
  meta["radius"] = a.radius;
  meta["stddev"] = a.stddev;
  meta["seed"] = a.seed;
  meta["means"] = matrix_json(spec.means);
  meta["rows"] = ds.size();
  meta["splits"] = {{"train", ds.count(mta::Split::kTrain)},
                    {"meta", ds.count(mta::Split::kMeta)},
                    {"test", ds.count(mta::Split::kTest)}};
  mta::write_text_file(sidecar(a.out, ".meta.json"), meta.dump(2) + "\n");
  std::cerr << "generated " << ds.size() << " rows (" << ds.count(mta::Split::kTrain)
            << " train, " << ds.count(mta::Split::kMeta) << " meta, "
            << ds.count(mta::Split::kTest) << " test)\n";
  std::cout << a.out.string() << '\n';
  return kOk;
}

// ---- corrupt ---------------------------------------------------------------

struct CorruptArgs {
  fs::path data;
  std::string kind = "symmetric";
  double rate = 0.0;
  std::string pairs;
  std::uint64_t seed = 0;
  fs::path out;
};

int cmd_corrupt(const CorruptArgs& a) {
  mta::LabeledDataset ds = mta::read_dataset_csv(a.data);
  const mta::NoiseSpec noise = mta::make_noise_spec(mta::parse_noise_kind(a.kind), a.rate,
                                                    ds.classes, mta::parse_pairs(a.pairs));
  const mta::DenseMatrix truth = mta::noise_matrix(ds.classes, noise);
  const mta::SplitView train = mta::clean_view(ds, mta::Split::kTrain);
  if (train.size() == 0) throw mta::InvalidConfig("dataset has no train split to corrupt");
  mta::SeededRng rng(mta::SeededRng::derive(a.seed, 12));
  const mta::Corruption c = mta::corrupt_labels(train.labels, truth, rng);
  ds.noisy_labels.reset();
  ds = mta::with_noisy_labels(ds, c.noisy_labels);
  mta::write_dataset_csv(ds, a.out);

  json report;
  report["kind"] = mta::to_string(noise.kind);
  report["rate"] = noise.rate;
  report["pairs"] = mta::format_pairs(noise.pairs);
  report["seed"] = a.seed;
  report["transition"] = matrix_json(truth);
  report["empirical"] = matrix_json(c.report.empirical);
  report["class_counts"] = c.report.class_counts;
  mta::write_text_file(sidecar(a.out, ".noise.json"), report.dump(2) + "\n");
  std::cerr << "empirical flip matrix over " << train.size() << " train labels:\n"
            << describe(c.report.empirical);
  std::cout << a.out.string() << '\n';
  return kOk;
}

// ---- train -----------------------------------------------------------------

struct TruthInfo {
  std::optional<mta::DenseMatrix> matrix;
  mta::NoiseSpec noise;
};

TruthInfo load_truth(const std::optional<fs::path>& explicit_path, const fs::path& data) {
  TruthInfo info;
  fs::path path;
  if (explicit_path) {
    path = *explicit_path;
  } else if (fs::exists(sidecar(data, ".noise.json"))) {
    path = sidecar(data, ".noise.json");
  } else {
    return info;
  }
  if (path.extension() == ".json") {
    const json j = parse_json_file(path);
    info.matrix = matrix_from_json(j.at("transition"));
    info.noise.kind = mta::parse_noise_kind(j.value("kind", "symmetric"));
    info.noise.rate = j.value("rate", 0.0);
    info.noise.pairs = mta::parse_pairs(j.value("pairs", ""));
  } else {
    info.matrix = mta::read_matrix_csv(path);
  }
  mta::require_row_stochastic(*info.matrix, 1e-6, "ground-truth transition");
  return info;
}

struct TrainArgs {
  std::string method;
  fs::path data;
  std::optional<fs::path> truth;
  std::optional<std::string> noise_kind;
  std::optional<double> noise_rate;
  std::uint64_t seed = 0;
  std::optional<fs::path> out_dir;
  std::optional<fs::path> results;
  TrainFlags flags;
};

std::string rate_tag(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", rate);
  return buf;
}

int cmd_train(const TrainArgs& a) {
  const mta::Method method = mta::parse_method(a.method);
  const mta::ExperimentConfig config = a.flags.config(a.seed);
  const mta::LabeledDataset ds = mta::read_dataset_csv(a.data);
  TruthInfo truth = load_truth(a.truth, a.data);
  if (a.noise_kind) truth.noise.kind = mta::parse_noise_kind(*a.noise_kind);
  if (a.noise_rate) truth.noise.rate = *a.noise_rate;

  const fs::path out_dir =
      a.out_dir.value_or(output_root() / (a.method + "-" + mta::to_string(truth.noise.kind) + "-" +
                                          rate_tag(truth.noise.rate) + "-s" +
                                          std::to_string(a.seed)));
  const fs::path results = a.results.value_or(output_root() / "results.csv");

  std::cerr << "training " << a.method << " on " << ds.count(mta::Split::kTrain)
            << " train rows, seed " << a.seed << '\n';
  mta::ExperimentSession session(ds, truth.noise, truth.matrix, config);
  const mta::ExperimentOutcome out = session.run(method);

  mta::write_checkpoint(out.params, out_dir / "model.txt");
  if (out.estimate) mta::write_matrix_csv(*out.estimate, out_dir / "transition.csv");
  if (out.initial_estimate) {
    mta::write_matrix_csv(*out.initial_estimate, out_dir / "initial_transition.csv");
  }
  if (out.trace) mta::write_text_file(out_dir / "trace.csv", out.trace->to_csv());
  json run = json::parse(mta::run_metadata_json(config, method, truth.noise));
  run["data"] = a.data.filename().string();
  run["test_accuracy"] = out.record.test_accuracy;
  if (out.record.estimation_error) run["estimation_error"] = *out.record.estimation_error;
  if (out.record.bound_value) run["bound_value"] = *out.record.bound_value;
  mta::write_text_file(out_dir / "run.json", run.dump(2) + "\n");
  mta::append_results_csv(results, {out.record});

  std::cerr << "test accuracy " << out.record.test_accuracy;
  if (out.record.estimation_error) std::cerr << ", estimation error " << *out.record.estimation_error;
  std::cerr << '\n';
  if (out.estimate) std::cerr << "estimated transition:\n" << describe(*out.estimate);
  std::cout << mta::format_record(out.record) << '\n';
  return kOk;
}

// ---- eval ------------------------------------------------------------------

struct EvalArgs {
  fs::path model;
  fs::path data;
  std::string split = "test";
  std::optional<fs::path> transition;
  std::optional<fs::path> truth;
  std::optional<fs::path> out;
};

int cmd_eval(const EvalArgs& a) {
  const mta::MlpParams params = mta::read_checkpoint(a.model);
  const mta::LabeledDataset ds = mta::read_dataset_csv(a.data);
  const mta::SplitView view = mta::clean_view(ds, mta::parse_split(a.split));
  if (view.size() == 0) throw mta::InvalidConfig("dataset has no " + a.split + " split");
  json result;
  result["split"] = a.split;
  result["rows"] = view.size();
  result["accuracy"] = mta::accuracy(mta::predict(params, view.features), view.labels);
  if (a.transition) {
    const TruthInfo truth = load_truth(a.truth, a.data);
    if (!truth.matrix) throw mta::InvalidConfig("--transition needs a ground truth (--truth)");
    result["estimation_error"] =
        mta::estimation_error(*truth.matrix, mta::read_matrix_csv(*a.transition));
  }
  const std::string text = result.dump(2) + "\n";
  if (a.out) mta::write_text_file(*a.out, text);
  std::cout << text;
  return kOk;
}

// ---- sweep -----------------------------------------------------------------

struct SweepArgs {
  std::vector<std::string> methods{"ce", "glc", "smodel", "meta"};
  std::vector<std::string> kinds{"symmetric"};
  std::vector<double> rates{0.0, 0.2, 0.4, 0.6, 0.8};
  std::vector<std::uint64_t> seeds{1};
  std::optional<fs::path> manifest;
  std::optional<fs::path> results;
  std::size_t jobs = 1;
  std::size_t n_train = 6000;
  std::size_t n_meta = 60;
  std::size_t n_test = 3000;
  TrainFlags flags;
};

using CellKey = std::tuple<mta::Method, mta::NoiseKind, std::string, std::uint64_t>;

CellKey key_of(const mta::ExperimentRecord& r) {
  return {r.method, r.noise_kind, mta::format_double(r.rate), r.seed};
}

void apply_manifest(SweepArgs& a) {
  const json j = parse_json_file(*a.manifest);
  if (j.contains("methods")) a.methods = j["methods"].get<std::vector<std::string>>();
  if (j.contains("kinds")) a.kinds = j["kinds"].get<std::vector<std::string>>();
  if (j.contains("rates")) a.rates = j["rates"].get<std::vector<double>>();
  if (j.contains("seeds")) a.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
  if (j.contains("n_train")) a.n_train = j["n_train"].get<std::size_t>();
  if (j.contains("n_meta")) a.n_meta = j["n_meta"].get<std::size_t>();
  if (j.contains("n_test")) a.n_test = j["n_test"].get<std::size_t>();
  if (j.contains("iterations")) a.flags.iterations = j["iterations"].get<std::size_t>();
  if (j.contains("alpha")) a.flags.alpha = j["alpha"].get<double>();
  if (j.contains("beta")) a.flags.beta = j["beta"].get<double>();
  if (j.contains("init")) a.flags.init = j["init"].get<std::string>();
  if (j.contains("mode")) a.flags.mode = j["mode"].get<std::string>();
  if (j.contains("hidden")) a.flags.hidden = j["hidden"].get<std::vector<std::size_t>>();
  if (j.contains("ce_epochs")) a.flags.ce_epochs = j["ce_epochs"].get<std::size_t>();
}

int cmd_sweep(SweepArgs a) {
  if (a.manifest) {
    try {
      apply_manifest(a);
    } catch (const json::exception& e) {
      throw mta::ParseError(1, a.manifest->string() + ": " + e.what());
    }
  }
  std::vector<mta::Method> methods;
  for (const auto& m : a.methods) methods.push_back(mta::parse_method(m));
  std::vector<mta::NoiseKind> kinds;
  for (const auto& k : a.kinds) kinds.push_back(mta::parse_noise_kind(k));
  for (double r : a.rates) {
    if (!(r >= 0.0 && r <= 1.0)) throw mta::InvalidConfig("noise rates must lie in [0, 1]");
  }
  if (a.jobs == 0) throw mta::InvalidConfig("--jobs must be >= 1");
  (void)a.flags.config(0);

  const fs::path results = a.results.value_or(output_root() / "sweep.csv");
  std::set<CellKey> done;
  if (fs::exists(results)) {
    for (const auto& r : mta::read_results_csv(results)) {
      if (r.status == "ok") done.insert(key_of(r));
    }
  }

  // One group per (kind, rate, seed) shares the generated task and CE model.
  struct Group {
    mta::NoiseKind kind;
    double rate;
    std::uint64_t seed;
    std::vector<mta::Method> todo;
  };
  std::vector<Group> groups;
  std::size_t skipped = 0;
  for (mta::NoiseKind kind : kinds) {
    for (double rate : a.rates) {
      for (std::uint64_t seed : a.seeds) {
        Group g{kind, rate, seed, {}};
        for (mta::Method m : methods) {
          if (done.count({m, kind, mta::format_double(rate), seed})) {
            ++skipped;
          } else {
            g.todo.push_back(m);
          }
        }
        if (!g.todo.empty()) groups.push_back(std::move(g));
      }
    }
  }
  std::cerr << "sweep: " << skipped << " cells already done, " << groups.size()
            << " task groups to run\n";

  mta::ReferenceTask task;
  task.n_train = a.n_train;
  task.n_meta = a.n_meta;
  task.n_test = a.n_test;

  std::mutex write_mutex;
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> failures{0};
  auto run_group = [&](const Group& g) {
    std::vector<mta::ExperimentRecord> rows;
    auto failed_row = [&](mta::Method m) {
      mta::ExperimentRecord r;
      r.method = m;
      r.noise_kind = g.kind;
      r.rate = g.rate;
      r.seed = g.seed;
      r.status = "failed";
      return r;
    };
    try {
      const mta::NoiseSpec noise = mta::make_noise_spec(g.kind, g.rate, task.classes);
      const mta::NoisyTask nt = mta::make_noisy_task(task, noise, g.seed);
      mta::ExperimentSession session(nt.dataset, noise, nt.truth, a.flags.config(g.seed));
      for (mta::Method m : g.todo) {
        try {
          rows.push_back(session.run(m).record);
        } catch (const std::exception& e) {
          std::lock_guard lock(write_mutex);
          std::cerr << "  cell " << mta::to_string(m) << " " << mta::to_string(g.kind) << " "
                    << g.rate << " seed " << g.seed << " failed: " << e.what() << '\n';
          rows.push_back(failed_row(m));
        }
      }
    } catch (const std::exception& e) {
      std::lock_guard lock(write_mutex);
      std::cerr << "  task " << mta::to_string(g.kind) << " " << g.rate << " seed " << g.seed
                << " failed: " << e.what() << '\n';
      rows.clear();
      for (mta::Method m : g.todo) rows.push_back(failed_row(m));
    }
    std::lock_guard lock(write_mutex);
    for (const auto& r : rows) {
      if (r.status != "ok") ++failures;
    }
    mta::append_results_csv(results, rows);
    std::cerr << "  done " << mta::to_string(g.kind) << " " << g.rate << " seed " << g.seed
              << " (" << rows.size() << " cells)\n";
  };
  auto worker = [&] {
    for (std::size_t i = next++; i < groups.size(); i = next++) run_group(groups[i]);
  };
  const std::size_t n_workers = std::min(a.jobs, std::max<std::size_t>(groups.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  if (!fs::exists(results)) mta::append_results_csv(results, {});
  std::cout << results.string() << '\n';
  if (failures > 0) {
    std::cerr << "sweep: " << failures << " cells failed\n";
    return kRuntime;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noise transition estimation with meta-learned transition matrices"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Sample a Gaussian mixture dataset");
  g->add_option("--classes", gen.classes, "Number of classes")->check(CLI::Range(2, 1000));
  g->add_option("--per-class", gen.per_class, "Samples per class")
      ->required()
      ->check(CLI::PositiveNumber);
  g->add_option("--radius", gen.radius, "Radius of the circle holding the class means")
      ->check(CLI::PositiveNumber);
  g->add_option("--std", gen.stddev, "Per-coordinate standard deviation")
      ->check(CLI::PositiveNumber);
  g->add_option("--n-train", gen.n_train, "Rows tagged train (stratified)");
  g->add_option("--n-meta", gen.n_meta, "Rows tagged meta (stratified)");
  g->add_option("--n-test", gen.n_test, "Rows tagged test (stratified)");
  g->add_option("--seed", gen.seed, "Random seed");
  g->add_option("--out", gen.out, "Output CSV")->required();

  CorruptArgs cor;
  auto* c = app.add_subcommand("corrupt", "Inject label noise into the train split");
  c->add_option("--data", cor.data, "Input dataset CSV")->required();
  c->add_option("--kind", cor.kind, "symmetric or pairs");
  c->add_option("--rate", cor.rate, "Noise rate in [0, 1]");
  c->add_option("--pairs", cor.pairs, "Pair list src:dst,... (default i:i+1 mod c)");
  c->add_option("--seed", cor.seed, "Random seed");
  c->add_option("--out", cor.out, "Output CSV")->required();

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train one method and record the result");
  t->add_option("--method", tr.method, "ce, finetune, forward, glc, smodel or meta")->required();
  t->add_option("--data", tr.data, "Dataset CSV with train/meta/test splits")->required();
  t->add_option("--truth", tr.truth,
                "Ground-truth transition (.noise.json or matrix CSV); defaults to the "
                "dataset's .noise.json sidecar when present");
  t->add_option("--noise-kind", tr.noise_kind, "Noise kind recorded in the results row");
  t->add_option("--noise-rate", tr.noise_rate, "Noise rate recorded in the results row");
  t->add_option("--seed", tr.seed, "Random seed");
  t->add_option("--out-dir", tr.out_dir, "Artifact directory (default under $MTA_OUTPUT_DIR)");
  t->add_option("--results", tr.results, "Results CSV to append to");
  tr.flags.attach(t);

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset split");
  e->add_option("--model", ev.model, "Checkpoint file")->required();
  e->add_option("--data", ev.data, "Dataset CSV")->required();
  e->add_option("--split", ev.split, "train, meta or test");
  e->add_option("--transition", ev.transition, "Estimated transition CSV to score");
  e->add_option("--truth", ev.truth, "Ground-truth transition (.noise.json or CSV)");
  e->add_option("--out", ev.out, "Also write the JSON result here");

  SweepArgs sw;
  auto* s = app.add_subcommand("sweep", "Run methods over a noise grid on the reference task");
  s->add_option("--methods", sw.methods, "Methods, comma separated")->delimiter(',');
  s->add_option("--kinds", sw.kinds, "Noise kinds, comma separated")->delimiter(',');
  s->add_option("--rates", sw.rates, "Noise rates, comma separated")->delimiter(',');
  s->add_option("--seeds", sw.seeds, "Seeds, comma separated")->delimiter(',');
  s->add_option("--manifest", sw.manifest, "JSON manifest overriding the grid and settings");
  s->add_option("--results", sw.results, "Results CSV (default $MTA_OUTPUT_DIR/sweep.csv)");
  s->add_option("--jobs", sw.jobs, "Parallel workers");
  s->add_option("--n-train", sw.n_train, "Train rows per task");
  s->add_option("--n-meta", sw.n_meta, "Meta rows per task");
  s->add_option("--n-test", sw.n_test, "Test rows per task");
  sw.flags.attach(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*g) return cmd_generate(gen);
    if (*c) return cmd_corrupt(cor);
    if (*t) return cmd_train(tr);
    if (*e) return cmd_eval(ev);
    if (*s) return cmd_sweep(sw);
  } catch (const mta::InvalidConfig& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kUsage;
  } catch (const mta::IoError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kIo;
  } catch (const mta::ParseError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kIo;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kRuntime;
  }
  return kUsage;
}
