#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mta/dataset.hpp"
#include "mta/matrix.hpp"
#include "mta/mlp.hpp"
#include "mta/numeric.hpp"
#include "mta/transition.hpp"

namespace mta {

using Batch = SplitView;

// Loss (1/n)Σ −log((Tᵀ f(x_b))_{ỹ_b}) with its gradients in W and in T.
struct NoisyLossGrads {
  double loss = 0.0;
  WeightList d_weights;
  DenseMatrix d_matrix;  // ∂loss/∂T, c×c
};

NoisyLossGrads noisy_loss_and_grads(const MlpParams& params, const TransitionState& state,
                                    const Batch& batch, double eps = kDefaultProbEps);

// Plain cross-entropy on the clean head f; this is the meta objective.
struct CleanLossGrads {
  double loss = 0.0;
  WeightList d_weights;
};

CleanLossGrads clean_loss_and_grads(const MlpParams& params, const Batch& batch,
                                    double eps = kDefaultProbEps);
double clean_loss(const MlpParams& params, const Batch& batch, double eps = kDefaultProbEps);

// One SGD step on the noisy loss, kept as a function of the transition.
MlpParams virtual_update(const MlpParams& params, const TransitionState& state,
                         const Batch& train_batch, double alpha);

enum class HypergradMode { kExact, kFdTrick };

std::string to_string(HypergradMode mode);
HypergradMode parse_hypergrad_mode(const std::string& text);

inline constexpr double kFdTrickEps = 1e-4;

struct Hypergradient {
  DenseMatrix d_logits;     // ∂(meta loss at virtual weights)/∂Θ
  double meta_loss = 0.0;   // meta-batch loss at the virtual weights
  double train_loss = 0.0;  // noisy train-batch loss at the current weights
};

// Gradient of g(Θ) = meta_loss(W − α ∇_W noisy_loss(W, T(Θ))) with respect to
// the logits. Zero (not merely small) when alpha == 0.
Hypergradient compute_hypergradient(const TransitionState& state, const MlpParams& params,
                                    const Batch& train_batch, const Batch& meta_batch,
                                    double alpha, HypergradMode mode);
DenseMatrix hypergradient(const TransitionState& state, const MlpParams& params,
                          const Batch& train_batch, const Batch& meta_batch, double alpha,
                          HypergradMode mode);

TransitionState meta_step(const TransitionState& state, const MlpParams& params,
                          const Batch& train_batch, const Batch& meta_batch, double alpha,
                          double beta, HypergradMode mode);

MlpParams classifier_step(const MlpParams& params, const TransitionState& state,
                          const Batch& train_batch, double alpha);

// Epoch-style sampler: walks a seeded permutation of [0, population) and
// reshuffles on wraparound, so a batch may straddle two passes.
class BatchSampler {
 public:
  BatchSampler(std::size_t population, std::size_t batch_size, std::uint64_t seed);
  std::vector<std::size_t> next();

 private:
  void reshuffle();

  std::size_t batch_size_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
  SeededRng rng_;
};

Batch gather(const Batch& source, const std::vector<std::size_t>& rows);

enum class InitSource { kGlc, kForward, kUniform, kIdentityish };

std::string to_string(InitSource source);
InitSource parse_init_source(const std::string& text);

// Diagonal mass of the identity-ish initialization.
inline constexpr double kIdentityishDiagonal = 0.95;

struct TrainConfig {
  double alpha = 0.1;
  // Meta step size; falls back to alpha when unset.
  std::optional<double> beta;
  std::size_t train_batch = 128;
  std::size_t meta_batch = 32;
  std::size_t iterations = 1000;
  std::uint64_t seed = 0;
  InitSource init = InitSource::kGlc;
  HypergradMode mode = HypergradMode::kExact;
  std::size_t log_every = 100;

  double meta_step_size() const { return beta.value_or(alpha); }
  void validate() const;
};

struct TraceRow {
  std::size_t iteration = 0;
  double noisy_loss = 0.0;
  // Clean cross-entropy of the logged weights on the whole meta split.
  std::optional<double> meta_loss;
  std::optional<double> estimation_error;
  std::optional<double> test_accuracy;

  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

struct TrainTrace {
  std::vector<TraceRow> rows;

  // Header iter,noisy_loss,meta_loss,est_error,test_acc; missing values blank.
  std::string to_csv() const;
  static TrainTrace from_csv(const std::string& text);
};

// What a training loop reports on at each logged step. Every member is optional.
struct Monitor {
  const Batch* meta = nullptr;
  const Batch* test = nullptr;
  std::optional<DenseMatrix> truth;

  TraceRow observe(std::size_t iteration, double noisy_loss, const MlpParams& params,
                   const TransitionState& state) const;
};

// Loss above which a run is declared divergent.
inline constexpr double kDivergenceLoss = 1e6;

// Classifier initialization and batch streams shared by every trainer that
// uses a TrainConfig-style seed, so runs with the same seed see the same
// weights and the same train-batch schedule.
MlpParams initial_classifier(const std::vector<std::size_t>& dims, double init_scale,
                             std::uint64_t seed);
std::uint64_t train_stream_seed(std::uint64_t seed);
std::uint64_t meta_stream_seed(std::uint64_t seed);

TransitionState identityish_state(std::size_t classes);
TransitionState uniform_state(std::size_t classes);

struct MetaResult {
  MlpParams params;
  TransitionState state;
  TrainTrace trace;
};

// Alternates meta_step (transition logits) and classifier_step (weights) for
// config.iterations steps, starting from `init`.
MetaResult run_meta_adaptation(const Batch& train, const Batch& meta, const TrainConfig& config,
                               const MlpConfig& mlp, const TransitionState& init,
                               const Monitor& monitor = {});
// Reads the train and meta splits from a dataset. uniform and identity-ish
// initializations are resolved here; glc and forward need an explicit state.
MetaResult run_meta_adaptation(const LabeledDataset& dataset, const TrainConfig& config,
                               const MlpConfig& mlp, std::optional<TransitionState> init = {},
                               std::optional<DenseMatrix> truth = {});

}  // namespace mta
