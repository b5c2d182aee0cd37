#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mta/dataset.hpp"
#include "mta/estimators.hpp"
#include "mta/meta.hpp"
#include "mta/transition.hpp"

namespace mta {

enum class Method { kCe, kFinetune, kForward, kGlc, kSmodel, kMeta };

std::string to_string(Method method);
// Throws InvalidConfig listing the valid names.
Method parse_method(const std::string& text);
const std::vector<Method>& all_methods();
bool requires_meta_split(Method method);
bool estimates_transition(Method method);

struct ExperimentConfig {
  MlpConfig mlp;
  // Stage-one cross-entropy model: the CE baseline and the noisy-posterior
  // approximator behind Forward and GLC.
  SgdConfig ce{0.1, 128, 30};
  SgdConfig finetune{0.01, 32, 20};
  // Step sizes, batch sizes and iteration budget for meta adaptation. S-Model
  // and the two-stage retraining reuse alpha, train_batch, iterations and
  // log_every so every transition-aware method gets the same budget.
  TrainConfig meta{};
  std::optional<double> smodel_lr_transition;
  // Forward/GLC second stage starts from the CE weights instead of a fresh
  // initialization.
  bool warm_start = false;
  std::uint64_t seed = 0;
};

// Desk-scale reference task: c Gaussian classes on a circle, split into
// train/meta/test.
struct ReferenceTask {
  std::size_t classes = 3;
  double radius = 2.5;
  double stddev = 1.0;
  std::size_t n_train = 6000;
  std::size_t n_meta = 60;
  std::size_t n_test = 3000;

  MixtureSpec mixture() const;
};

// Experiment defaults tuned for ReferenceTask.
ExperimentConfig reference_config(std::uint64_t seed);

struct NoisyTask {
  LabeledDataset dataset;
  DenseMatrix truth;
  NoiseSpec noise;
};

// Generates, splits and corrupts (train split only); every stage draws from its
// own stream derived from `seed`.
NoisyTask make_noisy_task(const ReferenceTask& task, const NoiseSpec& noise, std::uint64_t seed);

// Default pair list for pair-flip noise on c classes (i → i+1 mod c).
NoiseSpec make_noise_spec(NoiseKind kind, double rate, std::size_t classes,
                          std::vector<std::pair<int, int>> pairs = {});

struct ExperimentRecord {
  Method method = Method::kCe;
  NoiseKind noise_kind = NoiseKind::kSymmetric;
  double rate = 0.0;
  std::uint64_t seed = 0;
  double test_accuracy = 0.0;
  std::optional<double> estimation_error;
  std::optional<double> bound_value;
  double wall_time_seconds = 0.0;
  std::string status = "ok";
};

inline constexpr const char* kResultsHeader =
    "method,noise_kind,rate,seed,test_accuracy,estimation_error,bound_value,wall_time_seconds,"
    "status";

std::string format_record(const ExperimentRecord& record);
ExperimentRecord parse_record(const std::string& line, std::size_t line_no = 0);
std::vector<ExperimentRecord> read_results_csv(const std::filesystem::path& path);
// Creates the file with a header when missing.
void append_results_csv(const std::filesystem::path& path,
                        const std::vector<ExperimentRecord>& records);

struct ExperimentOutcome {
  ExperimentRecord record;
  MlpParams params;
  std::optional<DenseMatrix> estimate;
  // Estimate the transition-learning methods started from.
  std::optional<DenseMatrix> initial_estimate;
  std::optional<TrainTrace> trace;
};

// Runs methods against one noisy dataset, training the stage-one CE model once
// and sharing it between methods.
class ExperimentSession {
 public:
  ExperimentSession(LabeledDataset dataset, NoiseSpec noise, std::optional<DenseMatrix> truth,
                    ExperimentConfig config);

  ExperimentOutcome run(Method method);

  const MlpParams& ce_model();
  const EstimatorOutput& glc_estimate();
  const EstimatorOutput& forward_estimate();
  const LabeledDataset& dataset() const noexcept { return dataset_; }
  const ExperimentConfig& config() const noexcept { return config_; }

 private:
  DenseMatrix initial_transition(InitSource source);
  Monitor monitor() const;
  double bound_for(const MlpParams& params) const;

  LabeledDataset dataset_;
  NoiseSpec noise_;
  std::optional<DenseMatrix> truth_;
  ExperimentConfig config_;
  Batch train_;
  Batch meta_;
  Batch test_;
  std::optional<MlpParams> ce_model_;
  std::optional<EstimatorOutput> glc_;
  std::optional<EstimatorOutput> forward_;
};

// Structured description of a run (config, seeds, noise) as JSON text.
std::string run_metadata_json(const ExperimentConfig& config, Method method,
                              const NoiseSpec& noise);

}  // namespace mta
