#include "mta/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mta/error.hpp"

namespace mta {

void softmax_inplace(std::span<double> values) {
  if (values.empty()) throw InvalidInput("softmax: empty input");
  double max_v = values[0];
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidInput("softmax: non-finite logit");
    max_v = std::max(max_v, v);
  }
  double total = 0.0;
  for (double& v : values) {
    v = std::exp(v - max_v);
    total += v;
  }
  for (double& v : values) v /= total;
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.begin(), logits.end());
  softmax_inplace(out);
  return out;
}

DenseMatrix softmax_rows(const DenseMatrix& logits) {
  DenseMatrix out = logits;
  for (std::size_t r = 0; r < out.rows(); ++r) softmax_inplace(out.row(r));
  return out;
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) throw InvalidInput("log_sum_exp: empty input");
  const double max_v = *std::max_element(values.begin(), values.end());
  double total = 0.0;
  for (double v : values) total += std::exp(v - max_v);
  return max_v + std::log(total);
}

double cross_entropy(std::span<const double> probs, int label, double eps) {
  if (label < 0 || static_cast<std::size_t>(label) >= probs.size()) {
    throw InvalidInput("cross_entropy: label " + std::to_string(label) + " out of range");
  }
  if (!(eps > 0.0)) throw InvalidInput("cross_entropy: eps must be positive");
  return -std::log(std::max(probs[static_cast<std::size_t>(label)], eps));
}

}  // namespace mta
