#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mta/meta.hpp"

namespace mta {

enum class Provenance { kForwardAnchor, kGlc, kSmodel, kOracle };

std::string to_string(Provenance p);

struct EstimatorOutput {
  DenseMatrix matrix;  // row-stochastic estimate
  Provenance provenance = Provenance::kOracle;
  // Forward: the anchor sample index per class. GLC: meta samples per class.
  std::vector<std::size_t> diagnostics;
};

struct SgdConfig {
  double lr = 0.1;
  std::size_t batch_size = 128;
  std::size_t epochs = 20;

  // ceil(n / batch_size) steps per epoch.
  std::size_t iterations_for(std::size_t n) const;
};

// Mini-batch SGD on plain cross-entropy, labels taken as given.
MlpParams train_ce(const Batch& train, std::size_t classes, const MlpConfig& mlp,
                   const SgdConfig& sgd, std::uint64_t seed);
MlpParams finetune(const MlpParams& params, const Batch& meta, const SgdConfig& sgd,
                   std::uint64_t seed);
// CE SGD continued from `params` for exactly `iterations` steps.
MlpParams continue_ce(MlpParams params, const Batch& data, double lr, std::size_t batch_size,
                      std::size_t iterations, std::uint64_t seed);

// Anchor for class i is the row maximizing posteriors(:, i); ties go to the
// lowest row index. Row i of the estimate is the posterior at that anchor.
EstimatorOutput estimate_forward_from_posteriors(const DenseMatrix& noisy_posteriors);
EstimatorOutput estimate_forward(const MlpParams& noisy_model, const DenseMatrix& train_features);

// Row i is the mean noisy posterior over meta samples whose clean label is i.
EstimatorOutput estimate_glc_from_posteriors(const DenseMatrix& noisy_posteriors,
                                             const std::vector<int>& clean_labels,
                                             std::size_t classes);
EstimatorOutput estimate_glc(const MlpParams& noisy_model, const Batch& meta);

struct SmodelConfig {
  double lr = 0.1;
  // Step size on the transition logits; 0 freezes the transition layer.
  std::optional<double> lr_transition;
  std::size_t batch_size = 128;
  std::size_t iterations = 1000;
  std::uint64_t seed = 0;
  std::size_t log_every = 100;

  double transition_step_size() const { return lr_transition.value_or(lr); }
};

struct SmodelResult {
  MlpParams params;
  TransitionState state;
  TrainTrace trace;
};

// Joint SGD of weights and transition logits on the noisy loss alone. The
// classifier is initialized and batched exactly as run_meta_adaptation does
// for the same seed.
SmodelResult train_smodel(const Batch& train, const MlpConfig& mlp, const TransitionState& init,
                          const SmodelConfig& config, const Monitor& monitor = {});
// Same loop starting from given weights.
SmodelResult train_smodel_from(const Batch& train, MlpParams params, const TransitionState& init,
                               const SmodelConfig& config, const Monitor& monitor = {});

// Second stage of the two-stage estimators: minimize the noisy loss against a
// fixed estimate (train_smodel with a frozen transition layer).
SmodelResult train_with_fixed_transition(const Batch& train, const MlpConfig& mlp,
                                         const DenseMatrix& estimate, const SmodelConfig& config,
                                         const Monitor& monitor = {});

}  // namespace mta
