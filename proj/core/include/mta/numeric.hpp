#pragma once

#include <span>
#include <vector>

#include "mta/matrix.hpp"

namespace mta {

inline constexpr double kDefaultProbEps = 1e-12;

// Max-subtracted softmax. Throws InvalidInput on empty or non-finite input.
std::vector<double> softmax(std::span<const double> logits);
void softmax_inplace(std::span<double> values);
// Row-wise softmax of a matrix.
DenseMatrix softmax_rows(const DenseMatrix& logits);

double log_sum_exp(std::span<const double> values);

// −log(max(probs[label], eps)).
double cross_entropy(std::span<const double> probs, int label, double eps = kDefaultProbEps);

}  // namespace mta
