#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "mta/error.hpp"
#include "mta/matrix.hpp"
#include "mta/numeric.hpp"
#include "mta/rng.hpp"

using namespace mta;
using doctest::Approx;

TEST_CASE("softmax of equal logits is uniform") {
  const std::vector<double> logits{0.0, 0.0, 0.0};
  const auto p = softmax(logits);
  for (double v : p) CHECK(v == Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("softmax hand value") {
  const std::vector<double> logits{std::log(2.0), 0.0};
  const auto p = softmax(logits);
  CHECK(p[0] == Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(p[1] == Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("softmax survives huge logits") {
  const std::vector<double> logits{1000.0, 1000.0};
  const auto p = softmax(logits);
  CHECK(p[0] == 0.5);
  CHECK(p[1] == 0.5);
  const std::vector<double> skewed{-1000.0, 1000.0};
  const auto q = softmax(skewed);
  CHECK(q[0] == 0.0);
  CHECK(q[1] == 1.0);
}

TEST_CASE("softmax rejects bad input") {
  CHECK_THROWS_AS(softmax(std::vector<double>{}), InvalidInput);
  CHECK_THROWS_AS(softmax(std::vector<double>{0.0, std::nan("")}), InvalidInput);
  CHECK_THROWS_AS(softmax(std::vector<double>{std::numeric_limits<double>::infinity()}),
                  InvalidInput);
}

TEST_CASE("softmax rows sum to one on random logits") {
  SeededRng rng(3);
  DenseMatrix logits(20, 7);
  for (double& v : logits.data()) v = 30.0 * rng.normal();
  const DenseMatrix p = softmax_rows(logits);
  CHECK(is_row_stochastic(p, 1e-12));
}

TEST_CASE("cross entropy equals logsumexp minus the label logit") {
  SeededRng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(4);
    for (double& x : v) x = 3.0 * rng.normal();
    const int label = static_cast<int>(rng.uniform_index(4));
    const double ce = cross_entropy(softmax(v), label);
    CHECK(ce == Approx(log_sum_exp(v) - v[static_cast<std::size_t>(label)]).epsilon(1e-12));
  }
}

TEST_CASE("cross entropy named values") {
  CHECK(cross_entropy(std::vector<double>{1.0, 0.0}, 0, 1e-12) == Approx(0.0));
  CHECK(cross_entropy(std::vector<double>{0.5, 0.5}, 1) == Approx(0.693147).epsilon(1e-6));
  CHECK(cross_entropy(std::vector<double>{0.0, 1.0}, 0, 1e-12) ==
        Approx(27.631021).epsilon(1e-6));
  CHECK_THROWS_AS(cross_entropy(std::vector<double>{0.5, 0.5}, 2), InvalidInput);
  CHECK_THROWS_AS(cross_entropy(std::vector<double>{0.5, 0.5}, -1), InvalidInput);
}

TEST_CASE("matrix products") {
  const DenseMatrix a{{1, 2}, {3, 4}};
  const DenseMatrix ones{{1}, {1}};
  CHECK(matmul(a, ones) == DenseMatrix{{3}, {7}});
  CHECK(matmul(DenseMatrix::identity(2), a) == a);
  CHECK(transpose(transpose(a)) == a);
  CHECK(transpose(a) == DenseMatrix{{1, 3}, {2, 4}});
  const DenseMatrix b{{0, 1}, {5, -2}};
  CHECK(matmul_transposed(a, b) == matmul(a, transpose(b)));
  CHECK(transposed_matmul(a, b) == matmul(transpose(a), b));
  CHECK_THROWS_AS(matmul(a, DenseMatrix(3, 1)), ShapeError);
}

TEST_CASE("matrix elementwise helpers") {
  DenseMatrix y{{1, 1}};
  axpy(2.0, DenseMatrix{{1, -1}}, y);
  CHECK(y == DenseMatrix{{3, -1}});
  CHECK(scaled(y, 2.0) == DenseMatrix{{6, -2}});
  CHECK(subtract(y, y) == DenseMatrix(1, 2));
  CHECK(l1_norm(y) == 4.0);
  CHECK(frobenius_norm(DenseMatrix{{3, 4}}) == 5.0);
  CHECK(dot(DenseMatrix{{1, 2}}, DenseMatrix{{3, 4}}) == 11.0);
  CHECK(max_abs_diff(DenseMatrix{{1, 2}}, DenseMatrix{{1.5, 0}}) == 2.0);
  const std::vector<std::size_t> pick{1, 1, 0};
  CHECK(gather_rows(DenseMatrix{{1}, {2}}, pick) == DenseMatrix{{2}, {2}, {1}});
  CHECK_THROWS_AS(axpy(1.0, DenseMatrix(2, 2), y), ShapeError);
}

TEST_CASE("row stochastic checks") {
  CHECK(is_row_stochastic(DenseMatrix{{0.25, 0.75}, {1, 0}}, 1e-12));
  CHECK_FALSE(is_row_stochastic(DenseMatrix{{0.5, 0.6}}, 1e-12));
  CHECK_FALSE(is_row_stochastic(DenseMatrix{{1.5, -0.5}}, 1e-12));
  CHECK_THROWS_AS(require_row_stochastic(DenseMatrix{{0.5, 0.6}}, 1e-9, "T"), InvalidInput);
}

TEST_CASE("seeded rng is deterministic and streams differ") {
  SeededRng a(42);
  SeededRng b(42);
  for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());
  CHECK(SeededRng::derive(42, 1) != SeededRng::derive(42, 2));
  CHECK(SeededRng::derive(42, 1) == SeededRng::derive(42, 1));
  SeededRng c(1);
  for (int i = 0; i < 1000; ++i) {
    const double u = c.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(c.uniform_index(7) < 7);
  }
}

TEST_CASE("normal draws have unit moments") {
  SeededRng rng(9);
  double sum = 0.0;
  double sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(sum / n == Approx(0.0).epsilon(0.01).scale(1.0));
  CHECK(sq / n == Approx(1.0).epsilon(0.02));
}
