#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mta/matrix.hpp"
#include "mta/rng.hpp"

namespace mta {

struct CorruptionReport {
  DenseMatrix truth;
  // Row i: observed frequencies of noisy labels among samples of clean class i.
  DenseMatrix empirical;
  std::vector<std::size_t> class_counts;
};

struct Corruption {
  std::vector<int> noisy_labels;
  CorruptionReport report;
};

// Resamples each label i from categorical(transition row i) using one uniform
// draw per label and inverse-CDF lookup.
Corruption corrupt_labels(std::span<const int> clean_labels, const DenseMatrix& transition,
                          SeededRng& rng);

// Rows with no samples of that clean class are uniform.
DenseMatrix empirical_transition(std::span<const int> clean_labels,
                                 std::span<const int> noisy_labels, std::size_t classes);

}  // namespace mta
