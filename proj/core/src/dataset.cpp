#include "mta/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mta/error.hpp"
#include "mta/numeric.hpp"

namespace mta {

std::string to_string(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kMeta:
      return "meta";
    case Split::kTest:
      return "test";
  }
  return "train";
}

Split parse_split(const std::string& text) {
  if (text == "train") return Split::kTrain;
  if (text == "meta") return Split::kMeta;
  if (text == "test") return Split::kTest;
  throw InvalidInput("unknown split tag '" + text + "'");
}

std::size_t LabeledDataset::count(Split s) const {
  std::size_t n = 0;
  for (Split t : split) n += t == s ? 1 : 0;
  return n;
}

std::vector<std::size_t> LabeledDataset::indices(Split s) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < split.size(); ++i) {
    if (split[i] == s) out.push_back(i);
  }
  return out;
}

void LabeledDataset::validate() const {
  const std::size_t n = clean_labels.size();
  if (features.rows() != n || split.size() != n) {
    throw InvalidInput("dataset: features, labels and split tags differ in length");
  }
  if (noisy_labels && noisy_labels->size() != n) {
    throw InvalidInput("dataset: noisy labels differ in length");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const int y = clean_labels[i];
    if (y < 0 || static_cast<std::size_t>(y) >= classes) {
      throw InvalidInput("dataset: clean label out of range at row " + std::to_string(i));
    }
    if (noisy_labels) {
      const int z = (*noisy_labels)[i];
      if (z < 0 || static_cast<std::size_t>(z) >= classes) {
        throw InvalidInput("dataset: noisy label out of range at row " + std::to_string(i));
      }
      if (split[i] != Split::kTrain && z != y) {
        throw InvalidInput("dataset: non-train row " + std::to_string(i) + " carries label noise");
      }
    }
  }
}

namespace {

SplitView make_view(const LabeledDataset& ds, Split s, bool use_noisy) {
  const auto idx = ds.indices(s);
  SplitView v;
  v.features = gather_rows(ds.features, idx);
  const auto& labels = use_noisy && ds.noisy_labels ? *ds.noisy_labels : ds.clean_labels;
  v.labels.reserve(idx.size());
  for (std::size_t i : idx) v.labels.push_back(labels[i]);
  return v;
}

}  // namespace

SplitView view(const LabeledDataset& ds, Split s) {
  return make_view(ds, s, s == Split::kTrain);
}

SplitView clean_view(const LabeledDataset& ds, Split s) { return make_view(ds, s, false); }

void MixtureSpec::validate() const {
  if (means.rows() < 2 || means.cols() == 0) {
    throw InvalidConfig("mixture: need at least 2 classes and 1 feature");
  }
  if (!(stddev > 0.0) || !std::isfinite(stddev)) {
    throw InvalidConfig("mixture: stddev must be positive");
  }
  if (per_class == 0) throw InvalidConfig("mixture: per_class must be positive");
  if (!means.all_finite()) throw InvalidConfig("mixture: non-finite mean");
  for (std::size_t a = 0; a < means.rows(); ++a) {
    for (std::size_t b = a + 1; b < means.rows(); ++b) {
      bool same = true;
      for (std::size_t k = 0; k < means.cols(); ++k) same = same && means(a, k) == means(b, k);
      if (same) throw InvalidConfig("mixture: class means must be distinct");
    }
  }
}

MixtureSpec circle_mixture(std::size_t classes, std::size_t per_class, double radius,
                           double stddev) {
  MixtureSpec spec;
  spec.means = DenseMatrix(classes, 2);
  for (std::size_t k = 0; k < classes; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) /
                         static_cast<double>(classes);
    spec.means(k, 0) = radius * std::cos(angle);
    spec.means(k, 1) = radius * std::sin(angle);
  }
  spec.stddev = stddev;
  spec.per_class = per_class;
  return spec;
}

LabeledDataset generate_mixture(const MixtureSpec& spec, SeededRng& rng) {
  spec.validate();
  const std::size_t c = spec.classes();
  const std::size_t dim = spec.means.cols();
  LabeledDataset ds;
  ds.classes = c;
  ds.features = DenseMatrix(c * spec.per_class, dim);
  ds.clean_labels.reserve(c * spec.per_class);
  std::size_t row = 0;
  for (std::size_t s = 0; s < spec.per_class; ++s) {
    for (std::size_t k = 0; k < c; ++k, ++row) {
      for (std::size_t j = 0; j < dim; ++j) {
        ds.features(row, j) = spec.means(k, j) + spec.stddev * rng.normal();
      }
      ds.clean_labels.push_back(static_cast<int>(k));
    }
  }
  ds.split.assign(ds.clean_labels.size(), Split::kTrain);
  return ds;
}

DenseMatrix bayes_posterior(const MixtureSpec& spec, const DenseMatrix& features) {
  if (features.cols() != spec.means.cols()) throw ShapeError("bayes_posterior: feature dim");
  const double inv_two_var = 1.0 / (2.0 * spec.stddev * spec.stddev);
  DenseMatrix logits(features.rows(), spec.classes());
  for (std::size_t b = 0; b < features.rows(); ++b) {
    for (std::size_t k = 0; k < spec.classes(); ++k) {
      double sq = 0.0;
      for (std::size_t j = 0; j < features.cols(); ++j) {
        const double d = features(b, j) - spec.means(k, j);
        sq += d * d;
      }
      logits(b, k) = -sq * inv_two_var;
    }
  }
  return softmax_rows(logits);
}

LabeledDataset split_dataset(const LabeledDataset& ds, std::size_t n_train, std::size_t n_meta,
                             std::size_t n_test, SeededRng& rng) {
  ds.validate();
  const std::size_t c = ds.classes;
  if (n_train + n_meta + n_test > ds.size()) {
    throw InvalidConfig("split_dataset: requested " + std::to_string(n_train + n_meta + n_test) +
                        " rows but dataset has " + std::to_string(ds.size()));
  }
  std::vector<std::vector<std::size_t>> by_class(c);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    by_class[static_cast<std::size_t>(ds.clean_labels[i])].push_back(i);
  }
  for (auto& rows : by_class) rng.shuffle(std::span<std::size_t>(rows));

  std::vector<std::size_t> cursor(c, 0);
  std::vector<std::pair<std::size_t, Split>> assigned;
  const std::pair<std::size_t, Split> plan[] = {
      {n_meta, Split::kMeta}, {n_test, Split::kTest}, {n_train, Split::kTrain}};
  for (const auto& [count, tag] : plan) {
    for (std::size_t k = 0; k < c; ++k) {
      const std::size_t quota = count / c + (k < count % c ? 1 : 0);
      if (cursor[k] + quota > by_class[k].size()) {
        throw InvalidConfig("split_dataset: class " + std::to_string(k) +
                            " has too few samples for the requested splits");
      }
      for (std::size_t q = 0; q < quota; ++q) assigned.emplace_back(by_class[k][cursor[k]++], tag);
    }
  }
  std::sort(assigned.begin(), assigned.end());

  LabeledDataset out;
  out.classes = c;
  std::vector<std::size_t> rows;
  rows.reserve(assigned.size());
  for (const auto& [row, tag] : assigned) {
    rows.push_back(row);
    out.clean_labels.push_back(ds.clean_labels[row]);
    out.split.push_back(tag);
  }
  out.features = gather_rows(ds.features, rows);
  if (ds.noisy_labels) {
    std::vector<int> noisy;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      noisy.push_back(out.split[i] == Split::kTrain ? (*ds.noisy_labels)[rows[i]]
                                                    : out.clean_labels[i]);
    }
    out.noisy_labels = std::move(noisy);
  }
  return out;
}

LabeledDataset with_noisy_labels(const LabeledDataset& ds, const std::vector<int>& train_noisy) {
  const auto train_idx = ds.indices(Split::kTrain);
  if (train_noisy.size() != train_idx.size()) {
    throw InvalidInput("with_noisy_labels: expected one label per training row");
  }
  LabeledDataset out = ds;
  std::vector<int> noisy = ds.clean_labels;
  for (std::size_t i = 0; i < train_idx.size(); ++i) noisy[train_idx[i]] = train_noisy[i];
  out.noisy_labels = std::move(noisy);
  out.validate();
  return out;
}

}  // namespace mta
