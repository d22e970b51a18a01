#include "doctest.h"

#include <cmath>
#include <limits>

#include "burden/response.hpp"
#include "burden/rng.hpp"
#include "test_support.hpp"

using namespace burden;
using namespace burden::testing;

TEST_CASE("1-D best response") {
  const ThresholdClassifier f{3.0, 3.0};
  const auto cost = CostModel1D::scaled_linear(1.0, 1.0);

  SUBCASE("boundary cost charges the distance to the threshold") {
    const auto r = best_response_1d(1.0, f, 0, cost, ResponseSemantics::BoundaryCost);
    CHECK(r.moved_to == doctest::Approx(3.0));
    CHECK(r.cost_paid == doctest::Approx(2.0));
  }
  SUBCASE("rational individuals stay put when the cost exceeds the gain") {
    // utility of moving: 1 - 2 < 0
    const auto r = best_response_1d(1.0, f, 0, cost, ResponseSemantics::Rational);
    CHECK(r.moved_to == doctest::Approx(1.0));
    CHECK(r.cost_paid == 0.0);
  }
  SUBCASE("rational individuals move when worthwhile") {
    // utility of moving: 1 - 0.5 > 0
    const auto r = best_response_1d(2.5, f, 0, cost, ResponseSemantics::Rational);
    CHECK(r.moved_to == doctest::Approx(3.0));
    CHECK(r.cost_paid == doctest::Approx(0.5));
  }
  SUBCASE("positively classified individuals pay nothing") {
    const auto r = best_response_1d(3.0, f, 0, cost, ResponseSemantics::BoundaryCost);
    CHECK(r.cost_paid == 0.0);
    CHECK(r.moved_to == doctest::Approx(3.0));
  }
}

TEST_CASE("linear best response puts all mass on the best ratio") {
  LinearClassifier f;
  f.weights = vec({1.0, 2.0});
  f.v0 = f.v1 = 5.0;
  const LinearCostMultiD cost(vec({1.0, 1.0}), vec({1.0, 1.0}));

  // u'x = 3, gap 2, w* = max(1/1, 2/1) = 2 via feature 2.
  const auto r = best_response_linear(vec({1.0, 1.0}), f, 0, cost);
  CHECK(r.cost_paid == doctest::Approx(1.0));
  CHECK(r.moved_to[0] == doctest::Approx(1.0));
  CHECK(r.moved_to[1] == doctest::Approx(2.0));
  CHECK(f.weights.dot(r.moved_to) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("linear best response leaves positive individuals alone") {
  LinearClassifier f;
  f.weights = vec({1.0, 1.0});
  f.v0 = f.v1 = 4.0;
  const LinearCostMultiD cost(vec({1.0, 1.0}), vec({1.0, 1.0}));
  const auto r = best_response_linear(vec({5.0, 0.0}), f, 0, cost);
  CHECK(r.cost_paid == 0.0);
  CHECK(r.moved_to[0] == doctest::Approx(5.0));
}

TEST_CASE("infinite-cost features are skipped") {
  LinearClassifier f;
  f.weights = vec({1.0, 1.0});
  f.v0 = f.v1 = 2.0;
  const LinearCostMultiD cost(vec({2.0, kInfCost}), vec({2.0, kInfCost}));
  // only feature 1 manipulable: w* = 1/2, cost = 2 / (1/2) = 4, move = 4/2 = 2
  const auto r = best_response_linear(vec({0.0, 0.0}), f, 0, cost);
  CHECK(r.cost_paid == doctest::Approx(4.0));
  CHECK(r.moved_to[0] == doctest::Approx(2.0));
  CHECK(r.moved_to[1] == doctest::Approx(0.0));
}

TEST_CASE("ties in the best ratio break to the lowest index") {
  LinearClassifier f;
  f.weights = vec({1.0, 1.0, 1.0});
  f.v0 = f.v1 = 1.0;
  const LinearCostMultiD cost(vec({2.0, 2.0, 2.0}), vec({2.0, 2.0, 2.0}));
  const auto r = best_response_linear(vec({0.0, 0.0, 0.0}), f, 0, cost);
  CHECK(r.moved_to[0] > 0.0);
  CHECK(r.moved_to[1] == 0.0);
  CHECK(r.moved_to[2] == 0.0);
}

TEST_CASE("linear best response matches exhaustive boundary search") {
  Rng rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = trial % 2 == 0 ? 2 : 3;
    Eigen::VectorXd u(n), d(n), x(n);
    for (int i = 0; i < n; ++i) {
      u[i] = rng.uniform(0.2, 2.0);
      d[i] = rng.bernoulli(0.25) ? kInfCost : rng.uniform(0.3, 4.0);
      x[i] = rng.uniform(-2.0, 2.0);
    }
    if (!d.array().isFinite().any()) d[0] = rng.uniform(0.3, 4.0);
    LinearClassifier f;
    f.weights = u;
    f.v0 = f.v1 = u.dot(x) + rng.uniform(0.1, 3.0);  // force a negative sample
    const LinearCostMultiD cost(d, d);
    const auto r = best_response_linear(x, f, 0, cost);

    CHECK(std::abs(u.dot(r.moved_to) - f.v0) <= 1e-9);
    CHECK(r.cost_paid >= 0.0);

    // Exhaustive search over boundary moves x' = x + sum_i (t_i / d_i) e_i with
    // cost sum_i t_i: sweep the first manipulable coordinates on a fine grid
    // and solve the last one from the boundary equation.
    std::vector<int> manip;
    for (int i = 0; i < n; ++i)
      if (std::isfinite(d[i])) manip.push_back(i);
    const double gap = f.v0 - u.dot(x);
    double best_found = std::numeric_limits<double>::infinity();
    const int steps = 400;
    auto scan = [&](double t_fixed, int fixed_idx) {
      // remaining gap solved by the last manipulable feature
      const int last = manip.back();
      double remaining = gap;
      if (fixed_idx >= 0) remaining -= (u[fixed_idx] / d[fixed_idx]) * t_fixed;
      if (remaining < 0.0) return;
      const double t_last = remaining / (u[last] / d[last]);
      const double total = t_last + (fixed_idx >= 0 ? t_fixed : 0.0);
      best_found = std::min(best_found, total);
    };
    if (manip.size() == 1) {
      scan(0.0, -1);
    } else if (manip.size() == 2) {
      const double t_max = gap / (u[manip[0]] / d[manip[0]]);
      for (int s = 0; s <= steps; ++s) scan(t_max * s / steps, manip[0]);
    } else {
      const double t0_max = gap / (u[manip[0]] / d[manip[0]]);
      for (int s0 = 0; s0 <= 60; ++s0) {
        const double t0 = t0_max * s0 / 60;
        const double rest = gap - (u[manip[0]] / d[manip[0]]) * t0;
        if (rest < 0) continue;
        const double t1_max = rest / (u[manip[1]] / d[manip[1]]);
        for (int s1 = 0; s1 <= 60; ++s1) {
          const double t1 = t1_max * s1 / 60;
          const double remaining = rest - (u[manip[1]] / d[manip[1]]) * t1;
          if (remaining < -1e-12) continue;
          const double t_last =
              std::max(0.0, remaining) / (u[manip[2]] / d[manip[2]]);
          best_found = std::min(best_found, t0 + t1 + t_last);
        }
      }
    }
    CHECK(best_found >= r.cost_paid - 1e-6);   // nothing cheaper exists
    CHECK(r.cost_paid <= best_found + 1e-9);   // and the optimum beats the grid
  }
}

TEST_CASE("quadratic best response closed form") {
  const QuadraticCostMultiD cost(Eigen::MatrixXd::Identity(2, 2));

  SUBCASE("axis-aligned example") {
    LinearClassifier f;
    f.weights = vec({1.0, 0.0});
    f.v0 = f.v1 = 2.0;
    const auto r = best_response_quadratic(vec({1.0, 0.0}), f, 0, cost);
    CHECK(r.moved_to[0] == doctest::Approx(2.0));
    CHECK(r.moved_to[1] == doctest::Approx(0.0));
    CHECK(r.cost_paid == doctest::Approx(1.0));
  }
  SUBCASE("diagonal example") {
    LinearClassifier f;
    f.weights = vec({1.0, 1.0});
    f.v0 = f.v1 = 2.0;
    const auto r = best_response_quadratic(vec({0.0, 0.0}), f, 0, cost);
    CHECK(r.moved_to[0] == doctest::Approx(1.0));
    CHECK(r.moved_to[1] == doctest::Approx(1.0));
    CHECK(r.cost_paid == doctest::Approx(2.0));
  }
  SUBCASE("positively classified") {
    LinearClassifier f;
    f.weights = vec({1.0, 1.0});
    f.v0 = f.v1 = -1.0;
    const auto r = best_response_quadratic(vec({0.0, 0.0}), f, 0, cost);
    CHECK(r.cost_paid == 0.0);
  }
}

TEST_CASE("quadratic best response matches a boundary grid search") {
  Rng rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2;
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = rng.normal();
    Eigen::MatrixXd B = A.transpose() * A + 0.3 * Eigen::MatrixXd::Identity(n, n);
    const QuadraticCostMultiD cost(B);
    Eigen::VectorXd u = vec({rng.uniform(0.3, 2.0), rng.uniform(0.3, 2.0)});
    Eigen::VectorXd x = vec({rng.normal(), rng.normal()});
    LinearClassifier f;
    f.weights = u;
    f.v0 = f.v1 = u.dot(x) + rng.uniform(0.2, 2.0);
    const auto r = best_response_quadratic(x, f, 0, cost);
    CHECK(std::abs(u.dot(r.moved_to) - f.v0) <= 1e-9);

    // Boundary line: s = (gap/||u||^2) u + alpha * perp(u).
    const double gap = f.v0 - u.dot(x);
    const Eigen::VectorXd base = gap / u.squaredNorm() * u;
    const Eigen::VectorXd perp = vec({-u[1], u[0]}).normalized();
    double best_found = std::numeric_limits<double>::infinity();
    for (int s = -4000; s <= 4000; ++s) {
      const Eigen::VectorXd move = base + (s * 0.005) * perp;
      best_found = std::min(best_found, move.dot(B * move));
    }
    CHECK(best_found >= r.cost_paid - 1e-6);
    CHECK(r.cost_paid <= best_found + 1e-9);
  }
}

TEST_CASE("quadratic response flags component decreases") {
  Eigen::MatrixXd B(2, 2);
  B << 1.0, 0.9, 0.9, 1.0;  // strongly coupled; B^{-1} u has a negative entry
  const QuadraticCostMultiD cost(B);
  LinearClassifier f;
  f.weights = vec({1.0, 0.05});
  f.v0 = f.v1 = 1.0;
  const auto r = best_response_quadratic(vec({0.0, 0.0}), f, 0, cost);
  CHECK(r.decreased_component);
}

TEST_CASE("response invariants on random 1-D instances") {
  Rng rng(5);
  const auto cost = CostModel1D::quadratic_separable(1.5, 0.5);
  for (int trial = 0; trial < 300; ++trial) {
    const double x = rng.uniform(0.0, 10.0);
    const ThresholdClassifier f{rng.uniform(0.0, 10.0), rng.uniform(0.0, 10.0)};
    const int z = rng.bernoulli(0.5) ? 1 : 0;
    const auto boundary = best_response_1d(x, f, z, cost, ResponseSemantics::BoundaryCost);
    CHECK(boundary.cost_paid >= 0.0);
    // the boundary move is accepted by the classifier
    CHECK(classify(f, sample1d(boundary.moved_to, 0, z)) == 1);
    CHECK((boundary.cost_paid == 0.0) == (x >= f.tau(z)));

    const auto rational = best_response_1d(x, f, z, cost, ResponseSemantics::Rational);
    const double utility_after =
        classify(f, sample1d(rational.moved_to, 0, z)) - rational.cost_paid;
    const double utility_before = classify(f, sample1d(x, 0, z));
    CHECK(utility_after >= utility_before - 1e-12);
  }
}

TEST_CASE("all-infinite cost vectors are rejected at the response level") {
  LinearClassifier f;
  f.weights = vec({-1.0, -1.0});
  f.v0 = f.v1 = 1.0;
  // construction already rejects all-infinite vectors
  CHECK_THROWS_AS(LinearCostMultiD(vec({kInfCost, kInfCost}), vec({kInfCost, kInfCost})),
                  ValidationError);
  // negative weights on all finite features leave no useful direction
  const LinearCostMultiD cost(vec({1.0, 1.0}), vec({1.0, 1.0}));
  CHECK_THROWS_AS(best_response_linear(vec({0.0, 0.0}), f, 0, cost),
                  InfeasibleManipulationError);
}
