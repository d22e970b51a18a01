#include "doctest.h"

#include <cmath>

#include "burden/cost.hpp"
#include "test_support.hpp"

using namespace burden;
using namespace burden::testing;

TEST_CASE("gradient bounds for built-in 1-D costs are analytic") {
  const FeatureRange range{1.0, 100.0};

  const auto linear1 = gradient_bounds_1d(CostModel1D::scaled_linear(1.0, 1.0), range);
  CHECK(linear1[0].lower == -1.0);
  CHECK(linear1[0].upper == -1.0);

  const auto linear2 = gradient_bounds_1d(CostModel1D::scaled_linear(2.0, 3.0), range);
  CHECK(linear2[0].lower == -2.0);
  CHECK(linear2[0].upper == -2.0);
  CHECK(linear2[1].lower == -3.0);
  CHECK(linear2[1].upper == -3.0);

  // d/dx1 of (x2^2 - x1^2) is -2 x1, so over [1, 100] the range is [-200, -2].
  const auto quad = gradient_bounds_1d(CostModel1D::quadratic_separable(), range);
  CHECK(quad[0].lower == doctest::Approx(-200.0));
  CHECK(quad[0].upper == doctest::Approx(-2.0));
}

TEST_CASE("sampled bounds for a custom cost bracket the analytic gradient") {
  // Same shape as the quadratic built-in expressed as a custom function.
  auto d = [](double x1, double x2) { return x2 * x2 - x1 * x1; };
  const auto bounds =
      gradient_bounds_1d(CostModel1D::custom(d, d), FeatureRange{1.0, 10.0});
  // Analytic range is [-20, -2]; the sampled one is widened by 5%.
  CHECK(bounds[0].lower <= -20.0);
  CHECK(bounds[0].lower >= -20.0 * 1.1);
  CHECK(bounds[0].upper >= -2.0);
  CHECK(bounds[0].upper <= -2.0 * 0.90);
  CHECK(bounds[0].upper <= 0.0);
}

TEST_CASE("custom cost with positive gradient is rejected") {
  auto increasing = [](double x1, double x2) { return x1 + x2; };
  CHECK_THROWS_AS(
      gradient_bounds_1d(CostModel1D::custom(increasing, increasing),
                         FeatureRange{0.0, 1.0}),
      ValidationError);
}

TEST_CASE("1-D cost is zero on non-upward moves") {
  const auto cost = CostModel1D::scaled_linear(2.0, 1.0);
  CHECK(cost.cost(0, 5.0, 5.0) == 0.0);
  CHECK(cost.cost(0, 5.0, 4.0) == 0.0);
  CHECK(cost.cost(0, 3.0, 5.0) == doctest::Approx(4.0));
  CHECK(cost.cost(1, 3.0, 5.0) == doctest::Approx(2.0));
}

TEST_CASE("linear multi-D cost validates entries") {
  CHECK_THROWS_AS(LinearCostMultiD(vec({1.0, -1.0}), vec({1.0, 1.0})), ValidationError);
  CHECK_THROWS_AS(LinearCostMultiD(vec({kInfCost, kInfCost}), vec({1.0, 1.0})),
                  ValidationError);
  const LinearCostMultiD cost(vec({2.0, kInfCost}), vec({1.0, kInfCost}));
  CHECK(cost.cost(0, vec({0.0, 0.0}), vec({1.0, 0.0})) == doctest::Approx(2.0));
  CHECK(cost.cost(1, vec({0.0, 0.0}), vec({1.0, 0.0})) == doctest::Approx(1.0));
  // downward moves cost nothing
  CHECK(cost.cost(0, vec({1.0, 0.0}), vec({0.5, 0.0})) == 0.0);
}

TEST_CASE("cost/schema agreement") {
  FeatureSchema schema;
  schema.names = {"a", "b"};
  schema.manipulable = {true, false};
  const LinearCostMultiD good(vec({1.0, kInfCost}), vec({1.0, kInfCost}));
  CHECK_NOTHROW(check_cost_schema_agreement(good, schema));
  const LinearCostMultiD bad(vec({1.0, 1.0}), vec({1.0, 1.0}));
  CHECK_THROWS_AS(check_cost_schema_agreement(bad, schema), SchemaError);
}

TEST_CASE("quadratic cost validates the matrix") {
  Eigen::MatrixXd not_symmetric(2, 2);
  not_symmetric << 1.0, 0.5, 0.2, 1.0;
  CHECK_THROWS_AS((QuadraticCostMultiD{not_symmetric}), ValidationError);

  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS((QuadraticCostMultiD{indefinite}), NumericalError);

  Eigen::MatrixXd near_singular(2, 2);
  near_singular << 1.0, 0.0, 0.0, 1e-14;
  CHECK_THROWS_AS((QuadraticCostMultiD{near_singular}), NumericalError);

  const QuadraticCostMultiD cost(Eigen::MatrixXd::Identity(2, 2));
  CHECK(cost.cost(vec({0.0, 0.0}), vec({1.0, 1.0})) == doctest::Approx(2.0));
  CHECK(cost.cost(vec({1.0, 1.0}), vec({0.0, 0.0})) == 0.0);
}
