#pragma once

// Random small instances and finite-difference oracles shared by the unit and
// acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "mta/meta.hpp"
#include "mta/mlp.hpp"
#include "mta/rng.hpp"
#include "mta/transition.hpp"

namespace mta::oracle {

inline DenseMatrix random_matrix(std::size_t rows, std::size_t cols, SeededRng& rng,
                                 double scale = 1.0) {
  DenseMatrix m(rows, cols);
  for (double& v : m.data()) v = scale * rng.normal();
  return m;
}

inline Batch random_batch(std::size_t n, std::size_t dim, std::size_t classes, SeededRng& rng) {
  Batch b{random_matrix(n, dim, rng), {}};
  for (std::size_t i = 0; i < n; ++i) b.labels.push_back(static_cast<int>(rng.uniform_index(classes)));
  return b;
}

inline TransitionState random_state(std::size_t classes, SeededRng& rng, double scale = 1.0) {
  return TransitionState::from_logits(random_matrix(classes, classes, rng, scale));
}

inline MlpParams random_mlp(const std::vector<std::size_t>& dims, SeededRng& rng,
                            double scale = 0.6) {
  MlpParams p;
  p.layer_dims = dims;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    p.weights.push_back(random_matrix(dims[i + 1], dims[i], rng, scale));
  }
  return p;
}

struct Instance {
  MlpParams params;
  TransitionState state;
  Batch train;
  Batch meta;
  double alpha = 0.1;
};

// c in {2,3,5}; one or two layers with dims bounded by [6,8,c]; n, m in [1,8];
// alpha in {0.1, 0.01}.
inline Instance random_instance(std::uint64_t seed) {
  SeededRng rng(seed);
  static constexpr std::size_t kClasses[] = {2, 3, 5};
  const std::size_t c = kClasses[rng.uniform_index(3)];
  const std::size_t d0 = 1 + rng.uniform_index(6);
  std::vector<std::size_t> dims{d0};
  if (rng.uniform_index(3) != 0) dims.push_back(1 + rng.uniform_index(8));
  dims.push_back(c);
  const std::size_t n = 1 + rng.uniform_index(8);
  const std::size_t m = 1 + rng.uniform_index(8);
  const double alpha = rng.uniform_index(2) == 0 ? 0.1 : 0.01;
  MlpParams params = random_mlp(dims, rng);
  TransitionState state = random_state(c, rng);
  Batch train = random_batch(n, d0, c, rng);
  Batch meta = random_batch(m, d0, c, rng);
  return {std::move(params), std::move(state), std::move(train), std::move(meta), alpha};
}

// Meta objective g(Θ): clean loss on the meta batch after one virtual step.
inline double meta_objective(const Instance& in, const DenseMatrix& logits) {
  const MlpParams ahead =
      virtual_update(in.params, TransitionState::from_logits(logits), in.train, in.alpha);
  return clean_loss(ahead, in.meta);
}

inline DenseMatrix central_difference(const DenseMatrix& at,
                                      const std::function<double(const DenseMatrix&)>& f,
                                      double h) {
  DenseMatrix grad(at.rows(), at.cols());
  DenseMatrix probe = at;
  for (std::size_t i = 0; i < at.size(); ++i) {
    const double saved = probe.data()[i];
    probe.data()[i] = saved + h;
    const double up = f(probe);
    probe.data()[i] = saved - h;
    const double down = f(probe);
    probe.data()[i] = saved;
    grad.data()[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

inline WeightList central_difference(const MlpParams& at,
                                     const std::function<double(const MlpParams&)>& f,
                                     double h) {
  WeightList grads;
  MlpParams probe = at;
  for (std::size_t l = 0; l < at.weights.size(); ++l) {
    DenseMatrix g(at.weights[l].rows(), at.weights[l].cols());
    for (std::size_t i = 0; i < g.size(); ++i) {
      double& w = probe.weights[l].data()[i];
      const double saved = w;
      w = saved + h;
      const double up = f(probe);
      w = saved - h;
      const double down = f(probe);
      w = saved;
      g.data()[i] = (up - down) / (2.0 * h);
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

// ‖a − b‖_F / ‖b‖_F, with a tiny floor on the denominator.
inline double relative_error(const DenseMatrix& a, const DenseMatrix& b) {
  return frobenius_norm(subtract(a, b)) / std::max(frobenius_norm(b), 1e-12);
}

// Worst coordinate of |a − b| / max(|a|, |b|, floor).
inline double worst_coordinate_error(const DenseMatrix& a, const DenseMatrix& b,
                                     double floor = 1e-4) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a.data()[i];
    const double y = b.data()[i];
    const double denom = std::max({std::abs(x), std::abs(y), floor});
    worst = std::max(worst, std::abs(x - y) / denom);
  }
  return worst;
}

inline double worst_coordinate_error(const WeightList& a, const WeightList& b,
                                     double floor = 1e-4) {
  double worst = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) {
    worst = std::max(worst, worst_coordinate_error(a[l], b[l], floor));
  }
  return worst;
}

}  // namespace mta::oracle
