#include <cmath>
#include <vector>

#include "doctest.h"
#include "mta/error.hpp"
#include "mta/metrics.hpp"

using namespace mta;
using doctest::Approx;

namespace {

BoundInputs reference_inputs() {
  BoundInputs in;
  in.input_norm = 1.0;
  in.depth = 1;
  in.layer_norms = {1.0};
  in.train_size = 100;
  in.classes = 2;
  in.loss_bound = 1.0;
  in.delta = 0.05;
  return in;
}

double first_term(const BoundInputs& in) {
  return rademacher_bound(in) - 3.0 * in.loss_bound *
                    std::sqrt(std::log(2.0 / in.delta) / (2.0 * static_cast<double>(in.train_size)));
}

}  // namespace

TEST_CASE("accuracy counts matches") {
  const std::vector<int> a{0, 1, 2};
  CHECK(accuracy(a, a) == 1.0);
  CHECK(accuracy(a, std::vector<int>{1, 2, 0}) == 0.0);
  CHECK(accuracy(a, std::vector<int>{0, 1, 0}) == Approx(2.0 / 3.0));
  CHECK_THROWS_AS(accuracy(a, std::vector<int>{0}), InvalidInput);
  CHECK_THROWS_AS(accuracy(std::vector<int>{}, std::vector<int>{}), InvalidInput);
}

TEST_CASE("estimation error") {
  const DenseMatrix t{{0.9, 0.1}, {0.2, 0.8}};
  const DenseMatrix e{{0.8, 0.2}, {0.3, 0.7}};
  CHECK(estimation_error(t, t) == 0.0);
  CHECK(estimation_error(t, e) == Approx(0.2).epsilon(1e-14));
  CHECK(estimation_error(e, t) == Approx(0.2).epsilon(1e-14));
  CHECK_THROWS_AS(estimation_error(t, DenseMatrix(3, 3)), ShapeError);
  CHECK_THROWS_AS(estimation_error(DenseMatrix(2, 2), t), InvalidInput);
}

TEST_CASE("bound reproduces the hand value") {
  const double expected = 2.0 * 2.0 * (std::sqrt(2.0 * std::log(2.0)) + 1.0) / 10.0 +
                          3.0 * std::sqrt(std::log(40.0) / 200.0);
  CHECK(rademacher_bound(reference_inputs()) == Approx(expected).epsilon(1e-14));
  CHECK(std::abs(rademacher_bound(reference_inputs()) - 1.27839) <= 1e-5);
}

TEST_CASE("bound scaling and monotonicity") {
  BoundInputs in = reference_inputs();
  BoundInputs four = in;
  four.train_size = 400;
  CHECK(first_term(four) == Approx(first_term(in) / 2.0).epsilon(1e-12));

  BoundInputs more_data = in;
  more_data.train_size = 1000;
  CHECK(rademacher_bound(more_data) < rademacher_bound(in));
  BoundInputs more_classes = in;
  more_classes.classes = 5;
  CHECK(rademacher_bound(more_classes) > rademacher_bound(in));
  BoundInputs bigger_norm = in;
  bigger_norm.layer_norms = {2.0};
  CHECK(rademacher_bound(bigger_norm) > rademacher_bound(in));
  BoundInputs tighter = in;
  tighter.delta = 0.01;
  CHECK(rademacher_bound(tighter) > rademacher_bound(in));
  BoundInputs deeper = in;
  deeper.depth = 3;
  deeper.layer_norms = {1.0, 1.0, 1.0};
  CHECK(rademacher_bound(deeper) > rademacher_bound(in));
  for (double m : {0.1, 1.0, 10.0}) {
    BoundInputs x = in;
    x.loss_bound = m;
    CHECK(rademacher_bound(x) > 0.0);
  }
}

TEST_CASE("bound input validation") {
  BoundInputs in = reference_inputs();
  in.delta = 0.0;
  CHECK_THROWS_AS(rademacher_bound(in), InvalidConfig);
  in.delta = 1.0;
  CHECK_THROWS_AS(rademacher_bound(in), InvalidConfig);
  in = reference_inputs();
  in.layer_norms = {1.0, 2.0};
  CHECK_THROWS_AS(rademacher_bound(in), InvalidConfig);
  in = reference_inputs();
  in.layer_norms = {0.0};
  CHECK_THROWS_AS(rademacher_bound(in), InvalidConfig);
}

TEST_CASE("norm helpers") {
  MlpParams zero{{2, 3, 2}, {DenseMatrix(3, 2), DenseMatrix(2, 3)}};
  CHECK(frobenius_norms(zero) == std::vector<double>{0.0, 0.0});
  MlpParams single{{2, 1}, {DenseMatrix{{3, 4}}}};
  CHECK(frobenius_norms(single) == std::vector<double>{5.0});
  MlpParams id{{2, 2}, {DenseMatrix::identity(2)}};
  CHECK(frobenius_norms(id)[0] == Approx(std::sqrt(2.0)));
  CHECK(input_norm_bound(DenseMatrix{{3, 4}, {1, 0}}) == 5.0);
  CHECK(clamped_loss_bound(1e-12) == Approx(27.631021).epsilon(1e-6));
}
