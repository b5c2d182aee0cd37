#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mta/matrix.hpp"
#include "mta/mlp.hpp"

namespace mta {

double accuracy(std::span<const int> predictions, std::span<const int> labels);

// ‖truth − estimate‖₁ / ‖truth‖₁ with the entrywise absolute-sum norm.
double estimation_error(const DenseMatrix& truth, const DenseMatrix& estimate);

struct BoundInputs {
  double input_norm = 1.0;           // B
  std::size_t depth = 1;             // d
  std::vector<double> layer_norms;   // M_i, one per layer
  std::size_t train_size = 1;        // N
  std::size_t classes = 2;           // c
  double loss_bound = 1.0;           // M
  double delta = 0.05;               // confidence parameter
};

// 2cMB(√(2 ln(2) d) + 1)∏M_i / √N + 3M √(ln(2/δ) / (2N)).
double rademacher_bound(const BoundInputs& in);

// Frobenius norm of every weight matrix.
std::vector<double> frobenius_norms(const MlpParams& params);
// Largest Euclidean row norm.
double input_norm_bound(const DenseMatrix& features);

// Loss range of the eps-clamped cross-entropy, −log(eps).
double clamped_loss_bound(double eps);

}  // namespace mta
