#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "burden/bounds.hpp"
#include "burden/cost.hpp"
#include "burden/metrics.hpp"
#include "burden/types.hpp"

namespace burden {

// One cell of a (tau0, tau1) threshold sweep. Values are produced by the
// same kernels as a direct metrics/bounds evaluation, so they agree with a
// fresh evaluation bit for bit. Metrics whose conditioning set is empty are
// recorded as missing, not errors.
struct SweepRecord {
  double tau0 = 0.0;
  double tau1 = 0.0;
  double accuracy = 0.0;
  std::optional<double> h_sr, g_sr, h_tpr, g_tpr;
  std::optional<double> lhs_sr, lhs_tpr;
  std::optional<bool> feasible_sr, feasible_tpr;

  std::optional<double> h(SubPop p) const { return p == SubPop::All ? h_sr : h_tpr; }
  std::optional<double> g(SubPop p) const { return p == SubPop::All ? g_sr : g_tpr; }
  std::optional<double> lhs(SubPop p) const { return p == SubPop::All ? lhs_sr : lhs_tpr; }
};

// Evaluates every (tau0, tau1) grid cell, row-major over grid0 x grid1.
// feasibility_target g marks cells with constraint lhs <= g.
std::vector<SweepRecord> sweep_thresholds(const Dataset& data,
                                          const std::vector<double>& grid0,
                                          const std::vector<double>& grid1,
                                          const std::vector<SubPopCondition>& psi_list,
                                          const CostModel1D& cost,
                                          double feasibility_target = 0.0);

// Maximum-accuracy feasible record; ties broken by smaller burden gap under
// tie_break_psi, then lexicographically by (tau0, tau1). Throws
// InfeasibleError when nothing is feasible; when violation is supplied, the
// message names the tightest violation found.
const SweepRecord& select_optimal(
    const std::vector<SweepRecord>& records,
    const std::function<bool(const SweepRecord&)>& feasible,
    SubPop tie_break_psi = SubPop::All,
    const std::function<std::optional<double>(const SweepRecord&)>& violation = nullptr);

// Mean logistic log-loss of weights w = [u (n entries), v0, v1] with margin
// u'x - v_z; probabilities clipped to [1e-12, 1 - 1e-12].
double log_loss(const Eigen::VectorXd& w, const Dataset& data);
Eigen::VectorXd log_loss_gradient(const Eigen::VectorXd& w, const Dataset& data);
Eigen::MatrixXd log_loss_hessian(const Eigen::VectorXd& w, const Dataset& data);

enum class ConstraintKind {
  None,
  StatRateAtLeast,    // H(f, psi) >= bound
  BurdenGapAtMost,    // exact linear-cost gap expression <= bound
  AbsBurdenAtMost,    // |gap expression| <= bound
  AbsStatRateAtMost,  // |H(f, psi)| <= bound
};

struct SolverParams {
  int max_iterations = 100;
  double ftol = 1e-3;
  double fd_eps = 1e-3;
};

struct TrainConfig {
  ConstraintKind constraint = ConstraintKind::None;
  double bound = 0.0;
  SubPopCondition psi{SubPop::All};
  SolverParams solver{};
  std::uint64_t seed = 0;
  std::optional<LinearCostMultiD> cost;  // required by the burden constraints
};

struct TrainResult {
  LinearClassifier classifier;
  bool feasible = true;
  int iterations = 0;
  double objective = 0.0;
  double constraint_value = 0.0;  // c(w) in <= 0 form; meaningless for None
};

// Constrained log-loss minimization over (u, v0, v1): damped-Newton steps on
// the analytic objective with the single constraint linearized from central
// finite differences (step fd_eps) of its hard-decision value. Starts from
// zero weights; deterministic given the data order. When no feasible iterate
// is found within max_iterations the best-violation solution is returned
// with feasible = false.
TrainResult train_linear(const Dataset& data, const TrainConfig& config);

}  // namespace burden
