#include "doctest.h"

#include <cmath>

#include "burden/bounds.hpp"
#include "burden/response.hpp"
#include "burden/rng.hpp"
#include "test_support.hpp"

using namespace burden;
using namespace burden::testing;

namespace {

const SubPopCondition kAll{SubPop::All};

// Brute-force burden gap straight from per-sample best responses; the
// independent oracle for every bound in this file.
double brute_force_gap_1d(const Dataset& data, const ThresholdClassifier& f,
                          const SubPopCondition& psi, const CostModel1D& cost) {
  double sum[2] = {0.0, 0.0};
  std::int64_t count[2] = {0, 0};
  for (const Sample& s : data.samples) {
    if (!evaluate_psi(psi, s)) continue;
    ++count[s.group];
    sum[s.group] += best_response_1d(s.features[0], f, s.group, cost,
                                     ResponseSemantics::BoundaryCost)
                        .cost_paid;
  }
  REQUIRE(count[0] > 0);
  REQUIRE(count[1] > 0);
  return sum[0] / count[0] - sum[1] / count[1];
}

Dataset random_dataset(Rng& rng, int max_per_group) {
  Dataset data;
  data.schema.names = {"score"};
  data.schema.manipulable = {true};
  const int n0 = 1 + static_cast<int>(rng.below(max_per_group));
  const int n1 = 1 + static_cast<int>(rng.below(max_per_group));
  for (int i = 0; i < n0; ++i)
    data.samples.push_back(sample1d(rng.uniform(1, 100), rng.bernoulli(0.6) ? 1 : 0, 0));
  for (int i = 0; i < n1; ++i)
    data.samples.push_back(sample1d(rng.uniform(1, 100), rng.bernoulli(0.6) ? 1 : 0, 1));
  // keep psi=PositiveLabel usable
  data.samples.push_back(sample1d(rng.uniform(1, 100), 1, 0));
  data.samples.push_back(sample1d(rng.uniform(1, 100), 1, 1));
  return data;
}

}  // namespace

TEST_CASE("linear-cost bounds collapse onto the exact gap") {
  // H = 0, P0 = 0.5, E0 = 0.5, E1 = 1 gives lower = upper = 0.5.
  const Dataset data = dataset1d({1.0, 3.0}, {2.0, 4.0});
  const ThresholdClassifier f{3.0, 3.0};
  const auto cost = CostModel1D::scaled_linear(1.0, 1.0);
  const auto [lower, upper] = burden_gap_bounds_1d(data, f, kAll, cost);
  CHECK(lower == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(upper == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(lower == upper);
  CHECK(brute_force_gap_1d(data, f, kAll, cost) == doctest::Approx(0.5));
}

TEST_CASE("bounds vanish for identical groups under a shared threshold") {
  const Dataset data = dataset1d({1.0, 2.0, 5.0}, {1.0, 2.0, 5.0});
  const ThresholdClassifier f{3.0, 3.0};
  const auto [lower, upper] =
      burden_gap_bounds_1d(data, f, kAll, CostModel1D::scaled_linear(1.0, 1.0));
  CHECK(lower == doctest::Approx(0.0));
  CHECK(upper == doctest::Approx(0.0));
}

TEST_CASE("sandwich property on random quadratic-separable instances") {
  Rng rng(314);
  for (int trial = 0; trial < 200; ++trial) {
    const Dataset data = random_dataset(rng, 60);
    const ThresholdClassifier f{rng.uniform(1, 100), rng.uniform(1, 100)};
    const auto cost =
        CostModel1D::quadratic_separable(rng.uniform(0.5, 3.0), rng.uniform(0.5, 3.0));
    const SubPopCondition psi =
        rng.bernoulli(0.5) ? kAll : SubPopCondition{SubPop::PositiveLabel};
    const auto [lower, upper] = burden_gap_bounds_1d(
        data, f, psi, cost, FeatureRange{1.0, 100.0});
    const double gap = brute_force_gap_1d(data, f, psi, cost);
    const double tol = 1e-9 * std::max(1.0, std::abs(gap));
    CHECK(lower <= gap + tol);
    CHECK(gap <= upper + tol);
  }
}

TEST_CASE("exact linear-cost expression equals the measured gap") {
  SUBCASE("symmetric instance gives zero") {
    Dataset data;
    data.schema.names = {"a", "b"};
    data.schema.manipulable = {true, true};
    data.samples = {sample_vec({1.0, 0.0}, 1, 0), sample_vec({3.0, 1.0}, 1, 0),
                    sample_vec({1.0, 0.0}, 1, 1), sample_vec({3.0, 1.0}, 1, 1)};
    LinearClassifier f;
    f.weights = vec({1.0, 1.0});
    f.v0 = f.v1 = 2.0;
    const LinearCostMultiD cost(vec({1.0, 2.0}), vec({1.0, 2.0}));
    const auto result = burden_gap_exact_linear(data, f, kAll, cost);
    CHECK(result.exact == doctest::Approx(0.0));
    CHECK(result.delta == doctest::Approx(0.0));
  }
  SUBCASE("random instances match the response-module measurement") {
    Rng rng(2718);
    for (int trial = 0; trial < 120; ++trial) {
      const int n = 1 + static_cast<int>(rng.below(6));
      Dataset data;
      data.schema.names.resize(n, "f");
      data.schema.manipulable.assign(n, true);
      const int per_group = 2 + static_cast<int>(rng.below(40));
      for (int z = 0; z < 2; ++z)
        for (int i = 0; i < per_group; ++i) {
          Sample s;
          s.features = Eigen::VectorXd::NullaryExpr(
              n, [&](Eigen::Index) { return rng.normal(0.0, 2.0); });
          s.label = rng.bernoulli(0.6) ? 1 : 0;
          s.group = z;
          data.samples.push_back(std::move(s));
        }
      data.samples[0].label = 1;
      data.samples[static_cast<std::size_t>(per_group)].label = 1;
      Eigen::VectorXd u(n), d0(n), d1(n);
      bool any_finite = false;
      for (int i = 0; i < n; ++i) {
        u[i] = rng.uniform(0.1, 2.0);
        const bool manipulable = rng.bernoulli(0.7);
        d0[i] = manipulable ? rng.uniform(0.2, 5.0) : kInfCost;
        d1[i] = manipulable ? rng.uniform(0.2, 5.0) : kInfCost;
        any_finite = any_finite || manipulable;
      }
      if (!any_finite) {
        d0[0] = 1.0;
        d1[0] = 2.0;
      }
      LinearClassifier f;
      f.weights = u;
      f.v0 = rng.normal(0.0, 2.0);
      f.v1 = rng.normal(0.0, 2.0);
      const LinearCostMultiD cost(d0, d1);
      const SubPopCondition psi =
          rng.bernoulli(0.5) ? kAll : SubPopCondition{SubPop::PositiveLabel};

      const auto result = burden_gap_exact_linear(data, f, psi, cost);
      const double measured = social_burden_gap(data, f, cost, psi,
                                                ResponseSemantics::BoundaryCost);
      CHECK(std::abs(result.exact - measured) <= 1e-6);
    }
  }
}

TEST_CASE("quadratic upper bound") {
  SUBCASE("degenerate when group 0 has no negatives") {
    Dataset data;
    data.schema.names = {"a"};
    data.schema.manipulable = {true};
    data.samples = {sample_vec({5.0}, 1, 0), sample_vec({1.0}, 1, 1)};
    LinearClassifier f;
    f.weights = vec({1.0});
    f.v0 = f.v1 = 2.0;
    const QuadraticCostMultiD cost(Eigen::MatrixXd::Identity(1, 1));
    const auto result = burden_gap_upper_quadratic(data, f, kAll, cost);
    CHECK(result.degenerate);
    CHECK(result.upper == 0.0);
  }
  SUBCASE("single deep negative drives the max term") {
    Dataset data;
    data.schema.names = {"a"};
    data.schema.manipulable = {true};
    data.samples = {sample_vec({1.0}, 1, 0), sample_vec({3.0}, 1, 1)};
    LinearClassifier f;
    f.weights = vec({1.0});
    f.v0 = f.v1 = 2.0;
    const QuadraticCostMultiD cost(Eigen::MatrixXd::Identity(1, 1));
    // H = 0 - 1 = -1, P1 = 0, E0 = 1, max deficit = 1, u'B^{-1}u = 1:
    // upper = -2 * (2*(-1) - 0 + 1) = 2
    const auto result = burden_gap_upper_quadratic(data, f, kAll, cost);
    CHECK_FALSE(result.degenerate);
    CHECK(result.upper == doctest::Approx(2.0));
  }
  SUBCASE("bounds the measured gap on random instances") {
    Rng rng(161803);
    for (int trial = 0; trial < 120; ++trial) {
      const int n = 2 + static_cast<int>(rng.below(4));
      Eigen::MatrixXd A(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = rng.normal();
      const QuadraticCostMultiD cost(
          Eigen::MatrixXd(A.transpose() * A + 0.2 * Eigen::MatrixXd::Identity(n, n)));
      Dataset data;
      data.schema.names.resize(n, "f");
      data.schema.manipulable.assign(n, true);
      for (int z = 0; z < 2; ++z)
        for (int i = 0; i < 30; ++i) {
          Sample s;
          s.features = Eigen::VectorXd::NullaryExpr(
              n, [&](Eigen::Index) { return rng.normal(0.0, 1.5); });
          s.label = 1;
          s.group = z;
          data.samples.push_back(std::move(s));
        }
      LinearClassifier f;
      f.weights = Eigen::VectorXd::NullaryExpr(
          n, [&](Eigen::Index) { return rng.uniform(0.1, 1.5); });
      f.v0 = rng.normal(0.0, 1.0);
      f.v1 = rng.normal(0.0, 1.0);
      const auto bound = burden_gap_upper_quadratic(data, f, kAll, cost);
      const double measured =
          social_burden_gap(data, f, cost, kAll, ResponseSemantics::BoundaryCost);
      if (bound.degenerate)
        CHECK(measured <= 1e-12);
      else
        CHECK(measured <= bound.upper + 1e-6);
    }
  }
}

TEST_CASE("constraint lhs") {
  const Dataset data = dataset1d({1.0, 3.0}, {2.0, 4.0});
  SUBCASE("hand-computed example") {
    // tau0 = tau1 = 3: H = 0, P0 = 0.5, E1 = 1, E0 = 0.5 -> 0 - 0 + 1 - 0.5
    CHECK(constraint_lhs_1d(data, 3.0, 3.0, kAll) == doctest::Approx(0.5));
  }
  SUBCASE("symmetric groups, shared threshold") {
    const Dataset sym = dataset1d({1.0, 4.0}, {1.0, 4.0});
    CHECK(constraint_lhs_1d(sym, 3.0, 3.0, kAll) == doctest::Approx(0.0));
  }
}

TEST_CASE("bounds are bit-reproducible") {
  Rng rng(555);
  const Dataset data = random_dataset(rng, 50);
  const ThresholdClassifier f{37.0, 61.0};
  const auto cost = CostModel1D::quadratic_separable(1.2, 0.9);
  const auto first = burden_gap_bounds_1d(data, f, kAll, cost);
  const auto second = burden_gap_bounds_1d(data, f, kAll, cost);
  CHECK(first.first == second.first);
  CHECK(first.second == second.second);
}
