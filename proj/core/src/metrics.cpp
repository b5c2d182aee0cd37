#include "mta/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mta/error.hpp"

namespace mta {

double accuracy(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) {
    throw InvalidInput("accuracy: prediction and label counts differ");
  }
  if (labels.empty()) throw InvalidInput("accuracy: no labels");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += predictions[i] == labels[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

double estimation_error(const DenseMatrix& truth, const DenseMatrix& estimate) {
  if (!truth.same_shape(estimate)) throw ShapeError("estimation_error: shape mismatch");
  const double denom = l1_norm(truth);
  if (!(denom > 0.0)) throw InvalidInput("estimation_error: reference matrix has zero norm");
  return l1_norm(subtract(truth, estimate)) / denom;
}

double rademacher_bound(const BoundInputs& in) {
  if (!(in.delta > 0.0 && in.delta < 1.0)) {
    throw InvalidConfig("rademacher_bound: delta must lie in (0, 1)");
  }
  if (in.depth == 0 || in.layer_norms.size() != in.depth) {
    throw InvalidConfig("rademacher_bound: need one layer norm per layer");
  }
  if (in.train_size == 0 || in.classes == 0 || !(in.input_norm > 0.0) || !(in.loss_bound > 0.0)) {
    throw InvalidConfig("rademacher_bound: inputs must be positive");
  }
  double product = 1.0;
  for (double m : in.layer_norms) {
    if (!(m > 0.0)) throw InvalidConfig("rademacher_bound: layer norms must be positive");
    product *= m;
  }
  const double n = static_cast<double>(in.train_size);
  const double depth = static_cast<double>(in.depth);
  const double complexity = 2.0 * static_cast<double>(in.classes) * in.loss_bound *
                            in.input_norm * (std::sqrt(2.0 * std::numbers::ln2 * depth) + 1.0) *
                            product / std::sqrt(n);
  const double confidence = 3.0 * in.loss_bound * std::sqrt(std::log(2.0 / in.delta) / (2.0 * n));
  return complexity + confidence;
}

std::vector<double> frobenius_norms(const MlpParams& params) {
  std::vector<double> out;
  out.reserve(params.weights.size());
  for (const auto& w : params.weights) out.push_back(frobenius_norm(w));
  return out;
}

double input_norm_bound(const DenseMatrix& features) {
  double best = 0.0;
  for (std::size_t r = 0; r < features.rows(); ++r) {
    double sq = 0.0;
    for (double v : features.row(r)) sq += v * v;
    best = std::max(best, std::sqrt(sq));
  }
  return best;
}

double clamped_loss_bound(double eps) { return -std::log(eps); }

}  // namespace mta
