#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "burden/cost.hpp"
#include "burden/response.hpp"
#include "burden/types.hpp"

namespace burden {

namespace detail {

// Neumaier-compensated accumulator; means and burdens are summed with it so
// results do not depend on reduction strategy beyond the fixed sorted order.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

// Decision scores of the psi-qualifying group-z samples, ascending, with
// compensated prefix sums of scores and squared scores. Built once per
// (group, psi) and shared between single evaluations and threshold sweeps,
// which makes the two paths bitwise identical.
class ScoreStats {
 public:
  static ScoreStats build(const Dataset& data, const Classifier& f,
                          const SubPopCondition& psi, int z);

  std::size_t count() const { return scores_.size(); }
  bool empty() const { return scores_.empty(); }

  // Number of scores strictly below t (the negatively classified ones under
  // the score >= threshold decision rule).
  std::size_t count_below(double t) const;

  // Compensated sum of the k smallest scores / squared scores.
  double prefix_sum(std::size_t k) const { return prefix_[k]; }
  double prefix_sq_sum(std::size_t k) const { return prefix_sq_[k]; }

  const std::vector<double>& scores() const { return scores_; }
  const std::vector<std::size_t>& sample_indices() const { return indices_; }

  // Shared metric kernels; every caller (metrics, bounds, sweep) goes
  // through these expressions.
  double positive_rate(double tau) const;                    // H_z
  double negative_fraction(double tau) const;                // P_z
  double negative_score_mass(double tau) const;              // E_z
  double burden_scaled_linear(double a, double tau) const;   // mean a*(tau - x)^+
  double burden_quadratic_separable(double a, double tau) const;

 private:
  std::vector<double> scores_;
  std::vector<std::size_t> indices_;  // original sample positions, tie order
  std::vector<double> prefix_;        // length count()+1
  std::vector<double> prefix_sq_;
};

// Per-group label counts over all samples (psi plays no role in accuracy),
// sorted by decision score.
class LabelStats {
 public:
  static LabelStats build(const Dataset& data, const Classifier& f, int z);

  std::int64_t correct_at(double tau) const;
  std::int64_t total() const { return static_cast<std::int64_t>(scores_.size()); }

 private:
  std::vector<double> scores_;
  std::vector<std::int64_t> pos_prefix_;  // # y==1 among the k smallest
  std::int64_t total_pos_ = 0;
};

double eq1_constraint_lhs(double tau0, double tau1, double h_gap, double p0,
                          double e0, double e1);

// Boundary-cost burden of group z at threshold tau for any 1-D cost model:
// prefix formulas for the built-ins, a compensated pass for custom costs.
double burden_1d(const ScoreStats& stats, const CostModel1D& cost, int z, double tau);

}  // namespace detail

struct MetricsReport {
  SubPopCondition psi;
  double accuracy = 0.0;
  double h0 = 0.0, h1 = 0.0, h_gap = 0.0;
  double g0 = 0.0, g1 = 0.0, g_gap = 0.0;
  double p0 = 0.0, p1 = 0.0;
  double e0 = 0.0, e1 = 0.0;
  std::int64_t n0 = 0, n1 = 0;  // psi-qualifying count per group
};

// H_z(f, psi): fraction of psi-qualifying group-z samples classified positive.
// Throws UndefinedMetricError when the conditioning set is empty.
double selection_rate(const Dataset& data, const Classifier& f,
                      const SubPopCondition& psi, int z);

// H(f, psi) = H_0 - H_1.
double selection_rate_gap(const Dataset& data, const Classifier& f,
                          const SubPopCondition& psi);

// G_z(f, psi): mean best-response cost over psi-qualifying group-z samples.
double social_burden(const Dataset& data, const Classifier& f, const CostModel& cost,
                     const SubPopCondition& psi, int z, ResponseSemantics semantics);

// G(f, psi) = G_0 - G_1.
double social_burden_gap(const Dataset& data, const Classifier& f,
                         const CostModel& cost, const SubPopCondition& psi,
                         ResponseSemantics semantics);

// P_z = fraction negatively classified, E_z = (mean score of negatives) * P_z.
// Returns (0, 0) when nobody is negative.
std::pair<double, double> empirical_P_E(const Dataset& data, const Classifier& f,
                                        const SubPopCondition& psi, int z);

double accuracy(const Dataset& data, const Classifier& f);

struct FeatureBiasReport {
  bool biased_against_0 = false;
  // max over pooled distinct values of F1(x) - F0(x); <= 0 when biased.
  double max_violation = 0.0;
};

// Empirical stochastic-dominance check on 1-D features: group 0 is
// feature-biased against when its CDF strictly dominates group 1's at every
// pooled distinct value where either CDF is interior, with no reversal
// anywhere. For multi-dimensional data use the projected overload.
FeatureBiasReport feature_bias_check(const Dataset& data, const SubPopCondition& psi);
FeatureBiasReport feature_bias_check(const Dataset& data, const SubPopCondition& psi,
                                     const LinearClassifier& projection);

MetricsReport compute_metrics(const Dataset& data, const Classifier& f,
                              const CostModel& cost, const SubPopCondition& psi,
                              ResponseSemantics semantics = ResponseSemantics::BoundaryCost);

}  // namespace burden
