#include "burden/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "burden/response.hpp"

namespace burden {

namespace {

using detail::ScoreStats;

ScoreStats require_stats(const Dataset& data, const Classifier& f,
                         const SubPopCondition& psi, int z) {
  ScoreStats stats = ScoreStats::build(data, f, psi, z);
  if (stats.empty())
    throw UndefinedMetricError(std::string("no psi-qualifying samples in group ") +
                               std::to_string(z));
  return stats;
}

}  // namespace

std::pair<double, double> burden_gap_bounds_1d(const Dataset& data,
                                               const ThresholdClassifier& f,
                                               const SubPopCondition& psi,
                                               const CostModel1D& cost,
                                               std::optional<FeatureRange> range) {
  const Classifier clf = f;
  const ScoreStats stats0 = require_stats(data, clf, psi, 0);
  const ScoreStats stats1 = require_stats(data, clf, psi, 1);

  FeatureRange r;
  if (range) {
    r = *range;
  } else {
    r.lo = std::min({stats0.scores().front(), stats1.scores().front(), f.tau0, f.tau1});
    r.hi = std::max({stats0.scores().back(), stats1.scores().back(), f.tau0, f.tau1});
  }
  if (!(r.hi > r.lo)) r.hi = r.lo + 1e-9 * std::max(1.0, std::abs(r.lo));
  const auto grads = gradient_bounds_1d(cost, r);
  const double gl0 = grads[0].lower, gu0 = grads[0].upper;
  const double gl1 = grads[1].lower, gu1 = grads[1].upper;

  const double h_gap = stats0.positive_rate(f.tau0) - stats1.positive_rate(f.tau1);
  const double p0 = stats0.negative_fraction(f.tau0);
  const double e0 = stats0.negative_score_mass(f.tau0);
  const double e1 = stats1.negative_score_mass(f.tau1);

  const double upper =
      gu1 * f.tau1 * h_gap + (gu1 * f.tau1 - gl0 * f.tau0) * p0 - gu1 * e1 + gl0 * e0;
  const double lower =
      gl1 * f.tau1 * h_gap + (gl1 * f.tau1 - gu0 * f.tau0) * p0 - gl1 * e1 + gu0 * e0;
  return {lower, upper};
}

ExactLinearGap burden_gap_exact_linear(const Dataset& data, const LinearClassifier& f,
                                       const SubPopCondition& psi,
                                       const LinearCostMultiD& cost) {
  const Classifier clf = f;
  const ScoreStats stats0 = require_stats(data, clf, psi, 0);
  const ScoreStats stats1 = require_stats(data, clf, psi, 1);

  ExactLinearGap out;
  out.w0_star = best_ratio(f.weights, cost.d(0));
  out.w1_star = best_ratio(f.weights, cost.d(1));
  if (!(out.w0_star > 0.0) || !(out.w1_star > 0.0))
    throw InfeasibleManipulationError("best cost-efficiency ratio is not positive");

  const double h_gap = stats0.positive_rate(f.v0) - stats1.positive_rate(f.v1);
  const double p0 = stats0.negative_fraction(f.v0);
  const double e0 = stats0.negative_score_mass(f.v0);
  const double e1 = stats1.negative_score_mass(f.v1);

  out.delta = (f.v1 / out.w1_star - f.v0 / out.w0_star) * p0 - e1 / out.w1_star +
              e0 / out.w0_star;
  out.exact = -(f.v1 * h_gap) / out.w1_star - out.delta;
  return out;
}

QuadraticUpperBound burden_gap_upper_quadratic(const Dataset& data,
                                               const LinearClassifier& f,
                                               const SubPopCondition& psi,
                                               const QuadraticCostMultiD& cost) {
  const Classifier clf = f;
  const ScoreStats stats0 = require_stats(data, clf, psi, 0);
  const ScoreStats stats1 = require_stats(data, clf, psi, 1);

  const std::size_t k0 = stats0.count_below(f.v0);
  if (k0 == 0) return {0.0, true};

  // Scores are ascending, so the deepest group-0 negative is the first one.
  const double max_deficit = f.v0 - stats0.scores().front();
  const Eigen::VectorXd direction = cost.solve(f.weights);
  const double quad = f.weights.dot(direction);
  if (!(quad > 0.0)) throw NumericalError("u' B^{-1} u is not positive");

  const double h_gap = stats0.positive_rate(f.v0) - stats1.positive_rate(f.v1);
  const double p1 = stats1.negative_fraction(f.v1);
  const double e0 = stats0.negative_score_mass(f.v0);

  const double upper =
      -(2.0 * max_deficit / quad) * (f.v0 * h_gap - f.v0 * p1 + e0);
  return {upper, false};
}

double constraint_lhs_1d(const Dataset& data, double tau0, double tau1,
                         const SubPopCondition& psi) {
  const Classifier clf = ThresholdClassifier{tau0, tau1};
  const ScoreStats stats0 = require_stats(data, clf, psi, 0);
  const ScoreStats stats1 = require_stats(data, clf, psi, 1);
  const double h_gap = stats0.positive_rate(tau0) - stats1.positive_rate(tau1);
  const double p0 = stats0.negative_fraction(tau0);
  const double e0 = stats0.negative_score_mass(tau0);
  const double e1 = stats1.negative_score_mass(tau1);
  return detail::eq1_constraint_lhs(tau0, tau1, h_gap, p0, e0, e1);
}

}  // namespace burden
