#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mta/matrix.hpp"
#include "mta/rng.hpp"

namespace mta {

enum class Split { kTrain, kMeta, kTest };

std::string to_string(Split split);
Split parse_split(const std::string& text);

struct LabeledDataset {
  DenseMatrix features;
  std::vector<int> clean_labels;
  // Present iff corruption has been applied. Meta and test rows always carry
  // their clean label here.
  std::optional<std::vector<int>> noisy_labels;
  std::vector<Split> split;
  std::size_t classes = 0;

  std::size_t size() const noexcept { return clean_labels.size(); }
  std::size_t count(Split s) const;
  std::vector<std::size_t> indices(Split s) const;
  // Throws InvalidInput on inconsistent lengths or labels out of range.
  void validate() const;

  friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;
};

// Features and one label array restricted to a split, in dataset order.
struct SplitView {
  DenseMatrix features;
  std::vector<int> labels;

  std::size_t size() const noexcept { return labels.size(); }
};

// Training rows use noisy labels when present, every other split uses clean
// labels.
SplitView view(const LabeledDataset& ds, Split s);
SplitView clean_view(const LabeledDataset& ds, Split s);

struct MixtureSpec {
  DenseMatrix means;  // classes × feature dim
  double stddev = 1.0;
  std::size_t per_class = 0;

  std::size_t classes() const noexcept { return means.rows(); }
  void validate() const;
};

// Means evenly spaced on a circle of the given radius in 2-D, first at (radius, 0).
MixtureSpec circle_mixture(std::size_t classes, std::size_t per_class, double radius = 2.5,
                           double stddev = 1.0);

// All rows are tagged train; use split_dataset to assign meta/test.
LabeledDataset generate_mixture(const MixtureSpec& spec, SeededRng& rng);

// Closed-form p(Y | x) under uniform class priors.
DenseMatrix bayes_posterior(const MixtureSpec& spec, const DenseMatrix& features);

// Stratified by class: each split takes count / c rows per class, the
// remainder going to the lowest class indices. Rows not assigned are dropped.
LabeledDataset split_dataset(const LabeledDataset& ds, std::size_t n_train, std::size_t n_meta,
                             std::size_t n_test, SeededRng& rng);

// Replaces the train-split labels with noisy ones; meta/test keep clean labels.
LabeledDataset with_noisy_labels(const LabeledDataset& ds, const std::vector<int>& train_noisy);

}  // namespace mta
