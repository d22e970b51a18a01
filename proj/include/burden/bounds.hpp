#pragma once

#include <optional>
#include <utility>

#include "burden/cost.hpp"
#include "burden/metrics.hpp"
#include "burden/types.hpp"

namespace burden {

struct BoundsReport {
  double lower = 0.0;
  double upper = 0.0;
  std::optional<double> exact;
  std::optional<double> delta;
  std::optional<double> w0_star;
  std::optional<double> w1_star;
  std::optional<double> constraint_lhs;
  std::optional<double> quadratic_upper;
  bool quadratic_degenerate = false;  // no negatively classified group-0 samples
};

// Two-sided bounds on the burden gap of a group-threshold classifier from the
// per-group cost gradient bounds:
//   upper = g_{u,1} tau1 H + (g_{u,1} tau1 - g_{l,0} tau0) P0 - g_{u,1} E1 + g_{l,0} E0
//   lower = g_{l,1} tau1 H + (g_{l,1} tau1 - g_{u,0} tau0) P0 - g_{l,1} E1 + g_{u,0} E0
// Gradient bounds are taken over the span of the psi-qualifying scores and
// both thresholds unless an explicit range is supplied. With equal per-group
// gradient endpoints (linear costs) the two sides collapse onto the exact gap.
std::pair<double, double> burden_gap_bounds_1d(
    const Dataset& data, const ThresholdClassifier& f, const SubPopCondition& psi,
    const CostModel1D& cost, std::optional<FeatureRange> range = std::nullopt);

struct ExactLinearGap {
  double exact = 0.0;
  double delta = 0.0;
  double w0_star = 0.0;
  double w1_star = 0.0;
};

// Exact burden gap of a linear classifier under linear costs:
//   G = -(1/w1*) v1 H - delta,
//   delta = (v1/w1* - v0/w0*) P0 - E1/w1* + E0/w0*,
// with w_z* the best cost-efficiency ratio of group z. Equals the measured
// boundary-cost gap.
ExactLinearGap burden_gap_exact_linear(const Dataset& data, const LinearClassifier& f,
                                       const SubPopCondition& psi,
                                       const LinearCostMultiD& cost);

struct QuadraticUpperBound {
  double upper = 0.0;
  bool degenerate = false;
};

// Upper bound on the burden gap for the quadratic cost:
//   G <= -(2 max(v0 - u'x)) / (u' B^{-1} u) * (v0 H - v0 P1 + E0),
// the max taken over observed negatively classified group-0 psi-samples.
// Returns 0 with the degenerate flag when group 0 has no negatives.
QuadraticUpperBound burden_gap_upper_quadratic(const Dataset& data,
                                               const LinearClassifier& f,
                                               const SubPopCondition& psi,
                                               const QuadraticCostMultiD& cost);

// Left-hand side of the burden-gap training constraint for unit linear costs
// (the two-sided bound collapsed at gradient -1):
//   -tau1 H - (tau1 - tau0) P0 + E1 - E0.
// A classifier is feasible for target g iff this value is <= g.
double constraint_lhs_1d(const Dataset& data, double tau0, double tau1,
                         const SubPopCondition& psi);

}  // namespace burden
