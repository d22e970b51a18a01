#include "burden/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace burden {

namespace detail {

ScoreStats ScoreStats::build(const Dataset& data, const Classifier& f,
                             const SubPopCondition& psi, int z) {
  ScoreStats out;
  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const Sample& s = data.samples[i];
    if (s.group != z || !evaluate_psi(psi, s)) continue;
    scored.emplace_back(decision_score(f, s.features), i);
  }
  std::sort(scored.begin(), scored.end());
  out.scores_.reserve(scored.size());
  out.indices_.reserve(scored.size());
  for (const auto& [score, index] : scored) {
    out.scores_.push_back(score);
    out.indices_.push_back(index);
  }
  out.prefix_.resize(scored.size() + 1);
  out.prefix_sq_.resize(scored.size() + 1);
  CompensatedSum acc, acc_sq;
  out.prefix_[0] = 0.0;
  out.prefix_sq_[0] = 0.0;
  for (std::size_t k = 0; k < out.scores_.size(); ++k) {
    acc.add(out.scores_[k]);
    acc_sq.add(out.scores_[k] * out.scores_[k]);
    out.prefix_[k + 1] = acc.value();
    out.prefix_sq_[k + 1] = acc_sq.value();
  }
  return out;
}

std::size_t ScoreStats::count_below(double t) const {
  return static_cast<std::size_t>(
      std::lower_bound(scores_.begin(), scores_.end(), t) - scores_.begin());
}

double ScoreStats::positive_rate(double tau) const {
  const std::size_t m = count();
  const std::size_t k = count_below(tau);
  return static_cast<double>(m - k) / static_cast<double>(m);
}

double ScoreStats::negative_fraction(double tau) const {
  return static_cast<double>(count_below(tau)) / static_cast<double>(count());
}

double ScoreStats::negative_score_mass(double tau) const {
  const std::size_t k = count_below(tau);
  return prefix_sum(k) / static_cast<double>(count());
}

double ScoreStats::burden_scaled_linear(double a, double tau) const {
  const std::size_t k = count_below(tau);
  return a * (tau * static_cast<double>(k) - prefix_sum(k)) /
         static_cast<double>(count());
}

double ScoreStats::burden_quadratic_separable(double a, double tau) const {
  const std::size_t k = count_below(tau);
  return a * (tau * tau * static_cast<double>(k) - prefix_sq_sum(k)) /
         static_cast<double>(count());
}

LabelStats LabelStats::build(const Dataset& data, const Classifier& f, int z) {
  LabelStats out;
  std::vector<std::pair<double, int>> scored;
  for (const Sample& s : data.samples) {
    if (s.group != z) continue;
    scored.emplace_back(decision_score(f, s.features), s.label);
  }
  std::sort(scored.begin(), scored.end());
  out.scores_.reserve(scored.size());
  out.pos_prefix_.resize(scored.size() + 1);
  out.pos_prefix_[0] = 0;
  for (std::size_t k = 0; k < scored.size(); ++k) {
    out.scores_.push_back(scored[k].first);
    out.pos_prefix_[k + 1] = out.pos_prefix_[k] + scored[k].second;
  }
  out.total_pos_ = out.pos_prefix_[scored.size()];
  return out;
}

std::int64_t LabelStats::correct_at(double tau) const {
  const std::size_t k = static_cast<std::size_t>(
      std::lower_bound(scores_.begin(), scores_.end(), tau) - scores_.begin());
  const std::int64_t neg_correct = static_cast<std::int64_t>(k) - pos_prefix_[k];
  const std::int64_t pos_correct = total_pos_ - pos_prefix_[k];
  return neg_correct + pos_correct;
}

double eq1_constraint_lhs(double tau0, double tau1, double h_gap, double p0,
                          double e0, double e1) {
  // Burden-gap upper bound at unit linear cost; for that cost it coincides
  // with the gap itself, so lhs <= g certifies the gap target.
  return -tau1 * h_gap - (tau1 - tau0) * p0 + e1 - e0;
}

double burden_1d(const ScoreStats& stats, const CostModel1D& cost, int z, double tau) {
  if (cost.kind() == CostModel1D::Kind::ScaledLinear)
    return stats.burden_scaled_linear(cost.scale(z), tau);
  if (cost.kind() == CostModel1D::Kind::QuadraticSeparable)
    return stats.burden_quadratic_separable(cost.scale(z), tau);
  CompensatedSum acc;
  for (double x : stats.scores()) {
    if (x >= tau) break;
    acc.add(cost.base_cost(z, x, tau));
  }
  return acc.value() / static_cast<double>(stats.count());
}

namespace {

ScoreStats require_stats(const Dataset& data, const Classifier& f,
                         const SubPopCondition& psi, int z) {
  ScoreStats stats = ScoreStats::build(data, f, psi, z);
  if (stats.empty())
    throw UndefinedMetricError(std::string("no psi-qualifying samples in group ") +
                               std::to_string(z) + " (psi=" + psi_name(psi) + ")");
  return stats;
}

}  // namespace

}  // namespace detail

double selection_rate(const Dataset& data, const Classifier& f,
                      const SubPopCondition& psi, int z) {
  const auto stats = detail::require_stats(data, f, psi, z);
  return stats.positive_rate(decision_threshold(f, z));
}

double selection_rate_gap(const Dataset& data, const Classifier& f,
                          const SubPopCondition& psi) {
  return selection_rate(data, f, psi, 0) - selection_rate(data, f, psi, 1);
}

namespace {

// Burden via the prefix kernels when the per-sample cost depends on the
// decision score only; otherwise a compensated per-sample pass in ascending
// score order.
double burden_from_stats(const detail::ScoreStats& stats, const Dataset& data,
                         const Classifier& f, const CostModel& cost, int z,
                         ResponseSemantics semantics) {
  const double tau = decision_threshold(f, z);
  if (semantics == ResponseSemantics::BoundaryCost &&
      std::holds_alternative<ThresholdClassifier>(f) &&
      std::holds_alternative<CostModel1D>(cost)) {
    return detail::burden_1d(stats, std::get<CostModel1D>(cost), z, tau);
  }
  detail::CompensatedSum acc;
  for (std::size_t idx : stats.sample_indices())
    acc.add(response_cost(data.samples[idx], f, cost, semantics));
  return acc.value() / static_cast<double>(stats.count());
}

}  // namespace

double social_burden(const Dataset& data, const Classifier& f, const CostModel& cost,
                     const SubPopCondition& psi, int z, ResponseSemantics semantics) {
  const auto stats = detail::require_stats(data, f, psi, z);
  return burden_from_stats(stats, data, f, cost, z, semantics);
}

double social_burden_gap(const Dataset& data, const Classifier& f,
                         const CostModel& cost, const SubPopCondition& psi,
                         ResponseSemantics semantics) {
  return social_burden(data, f, cost, psi, 0, semantics) -
         social_burden(data, f, cost, psi, 1, semantics);
}

std::pair<double, double> empirical_P_E(const Dataset& data, const Classifier& f,
                                        const SubPopCondition& psi, int z) {
  const auto stats = detail::require_stats(data, f, psi, z);
  const double tau = decision_threshold(f, z);
  return {stats.negative_fraction(tau), stats.negative_score_mass(tau)};
}

double accuracy(const Dataset& data, const Classifier& f) {
  if (data.samples.empty()) throw UndefinedMetricError("accuracy of an empty dataset");
  std::int64_t correct = 0;
  for (int z = 0; z < 2; ++z) {
    const auto stats = detail::LabelStats::build(data, f, z);
    correct += stats.correct_at(decision_threshold(f, z));
  }
  return static_cast<double>(correct) / static_cast<double>(data.samples.size());
}

namespace {

FeatureBiasReport bias_from_scores(std::vector<double> s0, std::vector<double> s1) {
  std::sort(s0.begin(), s0.end());
  std::sort(s1.begin(), s1.end());
  std::vector<double> pooled;
  pooled.reserve(s0.size() + s1.size());
  pooled.insert(pooled.end(), s0.begin(), s0.end());
  pooled.insert(pooled.end(), s1.begin(), s1.end());
  std::sort(pooled.begin(), pooled.end());
  pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());

  const double m0 = static_cast<double>(s0.size());
  const double m1 = static_cast<double>(s1.size());
  auto cdf = [](const std::vector<double>& v, double x, double m) {
    return static_cast<double>(std::lower_bound(v.begin(), v.end(), x) - v.begin()) / m;
  };

  FeatureBiasReport report;
  double global_max = -std::numeric_limits<double>::infinity();
  double interior_max = -std::numeric_limits<double>::infinity();
  bool dominates_everywhere = true;   // F0 >= F1 at every pooled value
  bool strict_on_interior = true;     // F0 > F1 wherever either CDF is interior
  bool any_interior = false;
  for (double x : pooled) {
    const double f0 = cdf(s0, x, m0);
    const double f1 = cdf(s1, x, m1);
    global_max = std::max(global_max, f1 - f0);
    if (f0 < f1) dominates_everywhere = false;
    const bool interior = (f0 > 0.0 && f0 < 1.0) || (f1 > 0.0 && f1 < 1.0);
    if (interior) {
      any_interior = true;
      interior_max = std::max(interior_max, f1 - f0);
      if (!(f0 > f1)) strict_on_interior = false;
    }
  }
  report.biased_against_0 = any_interior && strict_on_interior && dominates_everywhere;
  report.max_violation = any_interior ? interior_max : global_max;
  return report;
}

}  // namespace

FeatureBiasReport feature_bias_check(const Dataset& data, const SubPopCondition& psi) {
  if (data.dimension() != 1)
    throw SchemaError("feature_bias_check on raw features requires 1-D data; "
                      "pass a linear classifier to project scores");
  std::vector<double> s0, s1;
  for (const Sample& s : data.samples) {
    if (!evaluate_psi(psi, s)) continue;
    (s.group == 0 ? s0 : s1).push_back(s.features[0]);
  }
  if (s0.empty() || s1.empty())
    throw UndefinedMetricError("feature bias check needs psi-qualifying samples in both groups");
  return bias_from_scores(std::move(s0), std::move(s1));
}

FeatureBiasReport feature_bias_check(const Dataset& data, const SubPopCondition& psi,
                                     const LinearClassifier& projection) {
  std::vector<double> s0, s1;
  for (const Sample& s : data.samples) {
    if (!evaluate_psi(psi, s)) continue;
    if (s.features.size() != projection.weights.size())
      throw SchemaError("projection dimension mismatch in feature_bias_check");
    (s.group == 0 ? s0 : s1).push_back(projection.weights.dot(s.features));
  }
  if (s0.empty() || s1.empty())
    throw UndefinedMetricError("feature bias check needs psi-qualifying samples in both groups");
  return bias_from_scores(std::move(s0), std::move(s1));
}

MetricsReport compute_metrics(const Dataset& data, const Classifier& f,
                              const CostModel& cost, const SubPopCondition& psi,
                              ResponseSemantics semantics) {
  MetricsReport r;
  r.psi = psi;
  const auto stats0 = detail::require_stats(data, f, psi, 0);
  const auto stats1 = detail::require_stats(data, f, psi, 1);
  const double tau0 = decision_threshold(f, 0);
  const double tau1 = decision_threshold(f, 1);
  r.n0 = static_cast<std::int64_t>(stats0.count());
  r.n1 = static_cast<std::int64_t>(stats1.count());
  r.h0 = stats0.positive_rate(tau0);
  r.h1 = stats1.positive_rate(tau1);
  r.h_gap = r.h0 - r.h1;
  r.p0 = stats0.negative_fraction(tau0);
  r.p1 = stats1.negative_fraction(tau1);
  r.e0 = stats0.negative_score_mass(tau0);
  r.e1 = stats1.negative_score_mass(tau1);
  r.g0 = burden_from_stats(stats0, data, f, cost, 0, semantics);
  r.g1 = burden_from_stats(stats1, data, f, cost, 1, semantics);
  r.g_gap = r.g0 - r.g1;
  r.accuracy = accuracy(data, f);
  return r;
}

}  // namespace burden
