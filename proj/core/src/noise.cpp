#include "mta/noise.hpp"

#include <string>

#include "mta/error.hpp"

namespace mta {

namespace {

void require_label(int label, std::size_t classes, const char* what) {
  if (label < 0 || static_cast<std::size_t>(label) >= classes) {
    throw InvalidInput(std::string(what) + ": label " + std::to_string(label) + " out of range");
  }
}

}  // namespace

Corruption corrupt_labels(std::span<const int> clean_labels, const DenseMatrix& transition,
                          SeededRng& rng) {
  if (transition.rows() != transition.cols()) throw ShapeError("corrupt_labels: T not square");
  require_row_stochastic(transition, 1e-9, "corrupt_labels");
  const std::size_t c = transition.rows();

  Corruption out;
  out.noisy_labels.reserve(clean_labels.size());
  for (int y : clean_labels) {
    require_label(y, c, "corrupt_labels");
    const auto row = transition.row(static_cast<std::size_t>(y));
    const double u = rng.uniform01();
    double cumulative = 0.0;
    // Falls back to the last class with positive mass when rounding leaves the
    // CDF slightly below 1.
    std::size_t chosen = c;
    std::size_t last_positive = 0;
    for (std::size_t j = 0; j < c; ++j) {
      if (row[j] > 0.0) last_positive = j;
      cumulative += row[j];
      if (u < cumulative && row[j] > 0.0) {
        chosen = j;
        break;
      }
    }
    if (chosen == c) chosen = last_positive;
    out.noisy_labels.push_back(static_cast<int>(chosen));
  }

  out.report.truth = transition;
  out.report.empirical = empirical_transition(clean_labels, out.noisy_labels, c);
  out.report.class_counts.assign(c, 0);
  for (int y : clean_labels) ++out.report.class_counts[static_cast<std::size_t>(y)];
  return out;
}

DenseMatrix empirical_transition(std::span<const int> clean_labels,
                                 std::span<const int> noisy_labels, std::size_t classes) {
  if (clean_labels.size() != noisy_labels.size()) {
    throw InvalidInput("empirical_transition: label arrays differ in length");
  }
  if (classes == 0) throw InvalidInput("empirical_transition: zero classes");
  DenseMatrix counts(classes, classes);
  for (std::size_t i = 0; i < clean_labels.size(); ++i) {
    require_label(clean_labels[i], classes, "empirical_transition");
    require_label(noisy_labels[i], classes, "empirical_transition");
    counts(static_cast<std::size_t>(clean_labels[i]), static_cast<std::size_t>(noisy_labels[i])) +=
        1.0;
  }
  for (std::size_t r = 0; r < classes; ++r) {
    auto row = counts.row(r);
    double total = 0.0;
    for (double v : row) total += v;
    for (double& v : row) v = total > 0.0 ? v / total : 1.0 / static_cast<double>(classes);
  }
  return counts;
}

}  // namespace mta
