#pragma once

#include <cstddef>
#include <vector>

#include "mta/matrix.hpp"
#include "mta/rng.hpp"

namespace mta {

// One gradient (or direction) per weight matrix, shaped like MlpParams::weights.
using WeightList = std::vector<DenseMatrix>;

// Bias-free ReLU network with a softmax head. weights[i] has shape
// layer_dims[i+1] × layer_dims[i].
struct MlpParams {
  std::vector<std::size_t> layer_dims;
  WeightList weights;

  std::size_t depth() const noexcept { return weights.size(); }
  std::size_t input_dim() const { return layer_dims.front(); }
  std::size_t num_classes() const { return layer_dims.back(); }
  // Throws ShapeError when the weights do not conform to layer_dims.
  void validate() const;

  friend bool operator==(const MlpParams&, const MlpParams&) = default;
};

struct MlpConfig {
  std::vector<std::size_t> hidden{32, 32};
  double init_scale = 0.3;

  std::vector<std::size_t> dims(std::size_t input_dim, std::size_t classes) const;
};

struct ForwardCache {
  // layer_inputs[i] feeds weights[i]; layer_inputs[0] is the batch itself.
  std::vector<DenseMatrix> layer_inputs;
  std::vector<DenseMatrix> pre_activations;
  DenseMatrix probs;
};

struct TangentResult {
  ForwardCache cache;
  // d probs / d eps of forward(W + eps·direction) at eps = 0.
  DenseMatrix probs_tangent;
};

MlpParams init_mlp(const std::vector<std::size_t>& layer_dims, double scale, SeededRng& rng);

ForwardCache forward(const MlpParams& params, const DenseMatrix& batch);

// upstream(b, k) is ∂ℓ_b/∂f_k for sample b. Returns the gradient of the batch
// mean loss (1/B)Σ ℓ_b with respect to every weight matrix.
WeightList backward(const MlpParams& params, const ForwardCache& cache,
                    const DenseMatrix& upstream);

// Forward-mode derivative of the softmax outputs along a weight direction.
TangentResult forward_tangent(const MlpParams& params, const WeightList& direction,
                              const DenseMatrix& batch);

MlpParams sgd_step(const MlpParams& params, const WeightList& grads, double lr);

// Argmax per row, ties to the lowest class index.
std::vector<int> argmax_rows(const DenseMatrix& probs);
std::vector<int> predict(const MlpParams& params, const DenseMatrix& batch);

WeightList zeros_like(const MlpParams& params);
void axpy(double alpha, const WeightList& x, WeightList& y);
double dot(const WeightList& a, const WeightList& b);
double norm(const WeightList& a);
bool all_finite(const WeightList& a);

}  // namespace mta
