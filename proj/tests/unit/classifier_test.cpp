#include <cmath>

#include "doctest.h"
#include "mta/error.hpp"
#include "mta/meta.hpp"
#include "mta/mlp.hpp"
#include "mta/numeric.hpp"
#include "oracles.hpp"

using namespace mta;
using doctest::Approx;

namespace {

// Mean CE of the batch, used as the scalar for finite differences.
double mean_ce(const MlpParams& p, const Batch& b) { return clean_loss(p, b); }

DenseMatrix ce_upstream(const DenseMatrix& probs, const std::vector<int>& labels) {
  DenseMatrix up(probs.rows(), probs.cols());
  for (std::size_t r = 0; r < probs.rows(); ++r) {
    const auto y = static_cast<std::size_t>(labels[r]);
    up(r, y) = -1.0 / probs(r, y);
  }
  return up;
}

}  // namespace

TEST_CASE("init is deterministic per seed") {
  SeededRng a(7);
  SeededRng b(7);
  CHECK(init_mlp({2, 3}, 0.3, a) == init_mlp({2, 3}, 0.3, b));
}

TEST_CASE("init shapes and scale bounds") {
  SeededRng rng(1);
  const MlpParams p = init_mlp({4, 8, 3}, 0.3, rng);
  REQUIRE(p.depth() == 2);
  CHECK(p.weights[0].rows() == 8);
  CHECK(p.weights[0].cols() == 4);
  CHECK(p.weights[1].rows() == 3);
  CHECK(p.weights[1].cols() == 8);
  for (const auto& w : p.weights) {
    for (double v : w.data()) CHECK(std::abs(v) <= 0.3);
  }
  CHECK_THROWS_AS(init_mlp({4}, 0.3, rng), InvalidConfig);
  CHECK_THROWS_AS(init_mlp({4, 0, 3}, 0.3, rng), InvalidConfig);
  CHECK_THROWS_AS(init_mlp({4, 3}, -1.0, rng), InvalidConfig);
}

TEST_CASE("zero weights give uniform outputs") {
  SeededRng rng(7);
  const MlpParams p = init_mlp({2, 3}, 0.0, rng);
  for (const auto& w : p.weights) {
    for (double v : w.data()) CHECK(v == 0.0);
  }
  const ForwardCache c = forward(p, DenseMatrix{{1.5, -2.0}, {0.0, 9.0}});
  for (double v : c.probs.data()) CHECK(v == Approx(1.0 / 3.0));
}

TEST_CASE("single layer forward hand value") {
  MlpParams p{{2, 2}, {DenseMatrix::identity(2)}};
  const ForwardCache c = forward(p, DenseMatrix{{std::log(2.0), 0.0}});
  CHECK(c.probs(0, 0) == Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(c.probs(0, 1) == Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("positive input scaling scales logits") {
  SeededRng rng(11);
  const MlpParams p = oracle::random_mlp({3, 5, 4}, rng);
  const DenseMatrix x = oracle::random_matrix(6, 3, rng);
  const ForwardCache base = forward(p, x);
  const ForwardCache twice = forward(p, scaled(x, 2.5));
  const DenseMatrix& lb = base.pre_activations.back();
  const DenseMatrix& lt = twice.pre_activations.back();
  for (std::size_t i = 0; i < lb.size(); ++i) {
    CHECK(lt.data()[i] == Approx(2.5 * lb.data()[i]).epsilon(1e-12));
  }
}

TEST_CASE("forward rejects wrong feature width") {
  SeededRng rng(2);
  const MlpParams p = oracle::random_mlp({3, 2}, rng);
  CHECK_THROWS_AS(forward(p, DenseMatrix(1, 4)), ShapeError);
}

TEST_CASE("zero upstream gives zero gradients") {
  SeededRng rng(4);
  const MlpParams p = oracle::random_mlp({3, 4, 2}, rng);
  const DenseMatrix x = oracle::random_matrix(5, 3, rng);
  const ForwardCache c = forward(p, x);
  const WeightList g = backward(p, c, DenseMatrix(5, 2));
  for (const auto& m : g) {
    for (double v : m.data()) CHECK(v == 0.0);
  }
}

TEST_CASE("softmax regression gradient has closed form") {
  SeededRng rng(8);
  const MlpParams p = oracle::random_mlp({3, 4}, rng);
  const Batch b{DenseMatrix{{0.5, -1.0, 2.0}}, {2}};
  const ForwardCache c = forward(p, b.features);
  const WeightList g = backward(p, c, ce_upstream(c.probs, b.labels));
  for (std::size_t k = 0; k < 4; ++k) {
    const double residual = c.probs(0, k) - (k == 2 ? 1.0 : 0.0);
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(g[0](k, j) == Approx(residual * b.features(0, j)).epsilon(1e-12));
    }
  }
}

TEST_CASE("backward matches central differences") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SeededRng rng(seed);
    const MlpParams p = oracle::random_mlp({4, 6, 5, 3}, rng);
    const Batch b = oracle::random_batch(6, 4, 3, rng);
    const ForwardCache c = forward(p, b.features);
    const WeightList g = backward(p, c, ce_upstream(c.probs, b.labels));
    const WeightList fd = oracle::central_difference(
        p, [&](const MlpParams& q) { return mean_ce(q, b); }, 1e-5);
    CHECK(oracle::worst_coordinate_error(g, fd) <= 1e-5);
  }
}

TEST_CASE("backward rejects a stale cache") {
  SeededRng rng(3);
  const MlpParams p = oracle::random_mlp({2, 3, 2}, rng);
  const MlpParams other = oracle::random_mlp({2, 4, 2}, rng);
  const ForwardCache c = forward(p, oracle::random_matrix(2, 2, rng));
  CHECK_THROWS_AS(backward(other, c, DenseMatrix(2, 2)), ShapeError);
}

TEST_CASE("forward tangent matches a directional difference") {
  SeededRng rng(21);
  const MlpParams p = oracle::random_mlp({3, 5, 4}, rng);
  const DenseMatrix x = oracle::random_matrix(4, 3, rng);
  WeightList dir;
  for (const auto& w : p.weights) dir.push_back(oracle::random_matrix(w.rows(), w.cols(), rng));
  const TangentResult t = forward_tangent(p, dir, x);
  const double h = 1e-6;
  MlpParams up = p;
  MlpParams down = p;
  axpy(h, dir, up.weights);
  axpy(-h, dir, down.weights);
  const DenseMatrix diff =
      scaled(subtract(forward(up, x).probs, forward(down, x).probs), 1.0 / (2.0 * h));
  CHECK(oracle::worst_coordinate_error(t.probs_tangent, diff) <= 1e-6);
  CHECK(t.cache.probs == forward(p, x).probs);
}

TEST_CASE("sgd step arithmetic") {
  const MlpParams p{{1, 1}, {DenseMatrix{{1.0}}}};
  const WeightList g{DenseMatrix{{2.0}}};
  CHECK(sgd_step(p, g, 0.5).weights[0](0, 0) == 0.0);
  CHECK(sgd_step(p, g, 0.0) == p);
  const WeightList g2{DenseMatrix{{4.0}}};
  CHECK(sgd_step(sgd_step(p, g, 0.25), g, 0.25) == sgd_step(p, g2, 0.25));
  CHECK_THROWS_AS(sgd_step(p, g, -1.0), InvalidConfig);
}

TEST_CASE("argmax and prediction") {
  CHECK(argmax_rows(DenseMatrix{{0.2, 0.5, 0.3}}) == std::vector<int>{1});
  CHECK(argmax_rows(DenseMatrix{{0.5, 0.5}}) == std::vector<int>{0});
  SeededRng rng(17);
  const MlpParams p = oracle::random_mlp({3, 4}, rng);
  const DenseMatrix x = oracle::random_matrix(30, 3, rng);
  const auto pred = predict(p, x);
  const ForwardCache c = forward(p, x);
  CHECK(pred == argmax_rows(c.probs));
  DenseMatrix transformed = c.pre_activations.back();
  for (double& v : transformed.data()) v = std::exp(v) * 3.0 + 1.0;
  CHECK(argmax_rows(transformed) == pred);
}

TEST_CASE("weight list helpers") {
  SeededRng rng(5);
  const MlpParams p = oracle::random_mlp({2, 3, 2}, rng);
  WeightList z = zeros_like(p);
  CHECK(norm(z) == 0.0);
  axpy(2.0, p.weights, z);
  CHECK(dot(z, p.weights) == Approx(2.0 * dot(p.weights, p.weights)));
  CHECK(norm(p.weights) == Approx(std::sqrt(dot(p.weights, p.weights))));
  CHECK(all_finite(z));
}

TEST_CASE("params validation") {
  MlpParams p{{2, 3}, {DenseMatrix(2, 2)}};
  CHECK_THROWS_AS(p.validate(), ShapeError);
  p.weights[0] = DenseMatrix(3, 2);
  CHECK_NOTHROW(p.validate());
}
