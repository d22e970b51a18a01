#include "burden/train.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "burden/response.hpp"

namespace burden {

std::vector<SweepRecord> sweep_thresholds(const Dataset& data,
                                          const std::vector<double>& grid0,
                                          const std::vector<double>& grid1,
                                          const std::vector<SubPopCondition>& psi_list,
                                          const CostModel1D& cost,
                                          double feasibility_target) {
  if (grid0.empty() || grid1.empty())
    throw ValidationError("threshold grids must be nonempty");
  if (data.dimension() != 1)
    throw SchemaError("threshold sweeps require 1-D data");
  if (data.samples.empty()) throw ValidationError("cannot sweep an empty dataset");

  const Classifier probe = ThresholdClassifier{0.0, 0.0};
  const auto labels0 = detail::LabelStats::build(data, probe, 0);
  const auto labels1 = detail::LabelStats::build(data, probe, 1);
  const double n_total = static_cast<double>(data.samples.size());

  struct PsiStats {
    SubPop kind;
    detail::ScoreStats s0, s1;
    bool usable = false;
  };
  std::vector<PsiStats> per_psi;
  for (const SubPopCondition& psi : psi_list) {
    PsiStats ps;
    ps.kind = psi.kind;
    ps.s0 = detail::ScoreStats::build(data, probe, psi, 0);
    ps.s1 = detail::ScoreStats::build(data, probe, psi, 1);
    ps.usable = !ps.s0.empty() && !ps.s1.empty();
    per_psi.push_back(std::move(ps));
  }

  std::vector<SweepRecord> records;
  records.reserve(grid0.size() * grid1.size());
  for (double tau0 : grid0) {
    const std::int64_t correct0 = labels0.correct_at(tau0);
    for (double tau1 : grid1) {
      SweepRecord rec;
      rec.tau0 = tau0;
      rec.tau1 = tau1;
      rec.accuracy =
          static_cast<double>(correct0 + labels1.correct_at(tau1)) / n_total;
      for (const PsiStats& ps : per_psi) {
        if (!ps.usable) continue;
        const double h = ps.s0.positive_rate(tau0) - ps.s1.positive_rate(tau1);
        const double g = detail::burden_1d(ps.s0, cost, 0, tau0) -
                         detail::burden_1d(ps.s1, cost, 1, tau1);
        const double lhs = detail::eq1_constraint_lhs(
            tau0, tau1, h, ps.s0.negative_fraction(tau0),
            ps.s0.negative_score_mass(tau0), ps.s1.negative_score_mass(tau1));
        const bool feasible = lhs <= feasibility_target;
        if (ps.kind == SubPop::All) {
          rec.h_sr = h;
          rec.g_sr = g;
          rec.lhs_sr = lhs;
          rec.feasible_sr = feasible;
        } else {
          rec.h_tpr = h;
          rec.g_tpr = g;
          rec.lhs_tpr = lhs;
          rec.feasible_tpr = feasible;
        }
      }
      records.push_back(rec);
    }
  }
  return records;
}

const SweepRecord& select_optimal(
    const std::vector<SweepRecord>& records,
    const std::function<bool(const SweepRecord&)>& feasible,
    SubPop tie_break_psi,
    const std::function<std::optional<double>(const SweepRecord&)>& violation) {
  const SweepRecord* best = nullptr;
  auto tie_value = [&](const SweepRecord& r) {
    const auto g = r.g(tie_break_psi);
    return g ? *g : std::numeric_limits<double>::infinity();
  };
  for (const SweepRecord& rec : records) {
    if (!feasible(rec)) continue;
    if (!best) {
      best = &rec;
      continue;
    }
    if (rec.accuracy != best->accuracy) {
      if (rec.accuracy > best->accuracy) best = &rec;
      continue;
    }
    const double tg = tie_value(rec), tb = tie_value(*best);
    if (tg != tb) {
      if (tg < tb) best = &rec;
      continue;
    }
    if (rec.tau0 < best->tau0 ||
        (rec.tau0 == best->tau0 && rec.tau1 < best->tau1))
      best = &rec;
  }
  if (!best) {
    std::string message = "no feasible record in sweep";
    if (violation) {
      const SweepRecord* tightest = nullptr;
      double tightest_violation = std::numeric_limits<double>::infinity();
      for (const SweepRecord& rec : records) {
        const auto v = violation(rec);
        if (v && *v < tightest_violation) {
          tightest_violation = *v;
          tightest = &rec;
        }
      }
      if (tightest)
        message += "; tightest violation " + std::to_string(tightest_violation) +
                   " at tau0=" + std::to_string(tightest->tau0) +
                   ", tau1=" + std::to_string(tightest->tau1);
    }
    throw InfeasibleError(message);
  }
  return *best;
}

namespace {

constexpr double kProbClip = 1e-12;

struct TrainingView {
  Eigen::MatrixXd extended;  // N x (n+2): [x, -1(z=0), -1(z=1)]
  Eigen::VectorXd labels;
  std::vector<int> group;
  std::vector<char> psi_mask;
  Eigen::Index n_features = 0;

  static TrainingView build(const Dataset& data, const SubPopCondition& psi) {
    TrainingView v;
    const Eigen::Index n = static_cast<Eigen::Index>(data.dimension());
    const Eigen::Index m = static_cast<Eigen::Index>(data.samples.size());
    v.n_features = n;
    v.extended.resize(m, n + 2);
    v.labels.resize(m);
    v.group.resize(m);
    v.psi_mask.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const Sample& s = data.samples[i];
      v.extended.row(i).head(n) = s.features.transpose();
      v.extended(i, n) = s.group == 0 ? -1.0 : 0.0;
      v.extended(i, n + 1) = s.group == 1 ? -1.0 : 0.0;
      v.labels[i] = s.label;
      v.group[i] = s.group;
      v.psi_mask[i] = evaluate_psi(psi, s) ? 1 : 0;
    }
    return v;
  }

  Eigen::VectorXd margins(const Eigen::VectorXd& w) const { return extended * w; }
};

double sigmoid(double m) { return 1.0 / (1.0 + std::exp(-m)); }

double loss_from_margins(const Eigen::VectorXd& margins, const Eigen::VectorXd& labels) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < margins.size(); ++i) {
    double p = sigmoid(margins[i]);
    p = std::min(std::max(p, kProbClip), 1.0 - kProbClip);
    total += labels[i] > 0.5 ? -std::log(p) : -std::log(1.0 - p);
  }
  return total / static_cast<double>(margins.size());
}

// Signed constraint value c(w); feasible iff c(w) <= 0. Hard decisions
// throughout; the burden expression falls back to a large flat value when a
// group with negatives has no score-raising manipulable feature.
class HardConstraint {
 public:
  HardConstraint(ConstraintKind kind, double bound, const TrainingView& view,
                 const std::optional<LinearCostMultiD>& cost)
      : kind_(kind), bound_(bound), view_(view), cost_(cost) {
    if ((kind == ConstraintKind::BurdenGapAtMost ||
         kind == ConstraintKind::AbsBurdenAtMost) &&
        !cost_)
      throw ValidationError("burden-gap constraints require a linear cost model");
  }

  double operator()(const Eigen::VectorXd& w) const {
    switch (kind_) {
      case ConstraintKind::None:
        return -1.0;
      case ConstraintKind::StatRateAtLeast:
        return bound_ - stat_rate(w);
      case ConstraintKind::AbsStatRateAtMost:
        return std::abs(stat_rate(w)) - bound_;
      case ConstraintKind::BurdenGapAtMost:
        return burden_gap(w) - bound_;
      case ConstraintKind::AbsBurdenAtMost:
        return std::abs(burden_gap(w)) - bound_;
    }
    return -1.0;
  }

 private:
  double stat_rate(const Eigen::VectorXd& w) const {
    const Eigen::VectorXd m = view_.margins(w);
    std::int64_t pos[2] = {0, 0}, count[2] = {0, 0};
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      if (!view_.psi_mask[i]) continue;
      const int z = view_.group[i];
      ++count[z];
      if (m[i] >= 0.0) ++pos[z];
    }
    if (count[0] == 0 || count[1] == 0)
      throw UndefinedMetricError("training constraint needs both groups under psi");
    return static_cast<double>(pos[0]) / static_cast<double>(count[0]) -
           static_cast<double>(pos[1]) / static_cast<double>(count[1]);
  }

  double burden_gap(const Eigen::VectorXd& w) const {
    const Eigen::Index n = view_.n_features;
    const Eigen::VectorXd u = w.head(n);
    const double v[2] = {w[n], w[n + 1]};
    const Eigen::VectorXd m = view_.margins(w);
    double neg_score_sum[2] = {0.0, 0.0};
    std::int64_t neg[2] = {0, 0}, count[2] = {0, 0};
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      if (!view_.psi_mask[i]) continue;
      const int z = view_.group[i];
      ++count[z];
      if (m[i] < 0.0) {
        ++neg[z];
        neg_score_sum[z] += m[i] + v[z];  // u'x
      }
    }
    if (count[0] == 0 || count[1] == 0)
      throw UndefinedMetricError("training constraint needs both groups under psi");
    double term[2];
    for (int z = 0; z < 2; ++z) {
      if (neg[z] == 0) {
        term[z] = 0.0;
        continue;
      }
      double w_star = -std::numeric_limits<double>::infinity();
      const Eigen::VectorXd& dz = cost_->d(z);
      for (Eigen::Index i = 0; i < n; ++i)
        if (std::isfinite(dz[i])) w_star = std::max(w_star, u[i] / dz[i]);
      if (!(w_star > 1e-12)) {
        term[z] = 1e6;  // flat penalty: manipulation infeasible for this group
        continue;
      }
      const double p = static_cast<double>(neg[z]) / static_cast<double>(count[z]);
      const double e = neg_score_sum[z] / static_cast<double>(count[z]);
      term[z] = (v[z] * p - e) / w_star;
    }
    return term[0] - term[1];
  }

  ConstraintKind kind_;
  double bound_;
  const TrainingView& view_;
  const std::optional<LinearCostMultiD>& cost_;
};

}  // namespace

double log_loss(const Eigen::VectorXd& w, const Dataset& data) {
  if (w.size() != static_cast<Eigen::Index>(data.dimension()) + 2)
    throw SchemaError("weight vector must have n_features + 2 entries");
  const TrainingView view = TrainingView::build(data, SubPopCondition{SubPop::All});
  return loss_from_margins(view.margins(w), view.labels);
}

Eigen::VectorXd log_loss_gradient(const Eigen::VectorXd& w, const Dataset& data) {
  if (w.size() != static_cast<Eigen::Index>(data.dimension()) + 2)
    throw SchemaError("weight vector must have n_features + 2 entries");
  const TrainingView view = TrainingView::build(data, SubPopCondition{SubPop::All});
  const Eigen::VectorXd m = view.margins(w);
  Eigen::VectorXd residual(m.size());
  for (Eigen::Index i = 0; i < m.size(); ++i)
    residual[i] = sigmoid(m[i]) - view.labels[i];
  return view.extended.transpose() * residual / static_cast<double>(m.size());
}

Eigen::MatrixXd log_loss_hessian(const Eigen::VectorXd& w, const Dataset& data) {
  const TrainingView view = TrainingView::build(data, SubPopCondition{SubPop::All});
  const Eigen::VectorXd m = view.margins(w);
  Eigen::VectorXd weights(m.size());
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const double p = sigmoid(m[i]);
    weights[i] = p * (1.0 - p);
  }
  return view.extended.transpose() * weights.asDiagonal() * view.extended /
         static_cast<double>(m.size());
}

namespace {

struct SqpOutcome {
  Eigen::VectorXd best_w;
  double best_f = 0.0;
  double best_c = -1.0;
  bool have_feasible = false;
  int iterations = 0;
};

// Damped-Newton loop on the log-loss; when a constraint is supplied, each
// step solves the quadratic model with the finite-difference linearization of
// c(w) <= 0 and is accepted through an l1 merit line search.
SqpOutcome sqp_loop(const TrainingView& view, const HardConstraint* constraint,
                    const Eigen::VectorXd& w_init, const SolverParams& params) {
  const Eigen::Index dim = w_init.size();
  const bool constrained = constraint != nullptr;
  const double fd = params.fd_eps;
  // Hard-decision constraints move in quanta of ~1/n; anything this close to
  // the boundary is satisfied for every purpose downstream.
  const double feas_tol = 1e-6;

  auto objective = [&](const Eigen::VectorXd& w) {
    return loss_from_margins(view.margins(w), view.labels);
  };
  auto grad = [&](const Eigen::VectorXd& w) {
    const Eigen::VectorXd m = view.margins(w);
    Eigen::VectorXd residual(m.size());
    for (Eigen::Index i = 0; i < m.size(); ++i)
      residual[i] = sigmoid(m[i]) - view.labels[i];
    return Eigen::VectorXd(view.extended.transpose() * residual /
                           static_cast<double>(m.size()));
  };
  auto hess = [&](const Eigen::VectorXd& w) {
    const Eigen::VectorXd m = view.margins(w);
    Eigen::VectorXd weights(m.size());
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      const double p = sigmoid(m[i]);
      weights[i] = p * (1.0 - p);
    }
    return Eigen::MatrixXd(view.extended.transpose() * weights.asDiagonal() *
                           view.extended / static_cast<double>(m.size()));
  };

  Eigen::VectorXd w = w_init;
  double f_val = objective(w);
  double c_val = constrained ? (*constraint)(w) : -1.0;

  SqpOutcome out;
  out.best_w = w;
  out.best_f = f_val;
  out.best_c = c_val;
  out.have_feasible = c_val <= feas_tol;
  double rho = 1.0;

  for (int iter = 0; iter < params.max_iterations; ++iter) {
    out.iterations = iter + 1;
    const Eigen::VectorXd g = grad(w);
    Eigen::MatrixXd H = hess(w);
    const double ridge = 1e-10 * std::max(1.0, H.trace());
    H.diagonal().array() += ridge;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(H);

    Eigen::VectorXd step = -ldlt.solve(g);
    Eigen::VectorXd feas_dir = Eigen::VectorXd::Zero(dim);
    double mu = 0.0;
    if (constrained) {
      // Central finite differences of the hard-decision constraint. Where the
      // staircase shows no change at the base step, the probe widens (the
      // step doubles as a smoothing scale) until a decision flips.
      Eigen::VectorXd a(dim);
      Eigen::VectorXd probe = w;
      for (Eigen::Index j = 0; j < dim; ++j) {
        double h = fd;
        double diff = 0.0;
        for (int widen = 0; widen < 9; ++widen) {
          probe[j] = w[j] + h;
          const double c_plus = (*constraint)(probe);
          probe[j] = w[j] - h;
          const double c_minus = (*constraint)(probe);
          probe[j] = w[j];
          diff = (c_plus - c_minus) / (2.0 * h);
          if (diff != 0.0) break;
          h *= 4.0;
        }
        a[j] = diff;
      }
      if (a.squaredNorm() > 1e-14 && c_val > 0.0)
        feas_dir = -(c_val / a.squaredNorm()) * a;
      const double linearized = c_val + a.dot(step);
      if (linearized > 0.0) {
        const Eigen::VectorXd h_inv_a = ldlt.solve(a);
        const double denom = a.dot(h_inv_a);
        if (denom > 1e-14) {
          mu = linearized / denom;
          step -= mu * h_inv_a;
        } else if (c_val > 0.0 && a.squaredNorm() > 1e-14) {
          // Flat objective direction: step toward feasibility along -a.
          step = feas_dir;
        }
      }
    }

    rho = std::max(rho, 2.0 * std::abs(mu) + 1.0);
    auto merit = [&](double f, double c) {
      return f + (constrained ? rho * std::max(0.0, c) : 0.0);
    };
    const double merit_now = merit(f_val, c_val);

    double alpha = 1.0;
    bool accepted = false;
    double f_new = f_val, c_new = c_val;
    Eigen::VectorXd w_new = w;
    for (int half = 0; half < 25; ++half) {
      w_new = w + alpha * step;
      f_new = objective(w_new);
      c_new = constrained ? (*constraint)(w_new) : -1.0;
      if (merit(f_new, c_new) < merit_now - 1e-12) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted && constrained && c_val > feas_tol && feas_dir.squaredNorm() > 1e-14) {
      // Restoration: scan step scales along the constraint linearization,
      // overshooting included (flat stretches of the hard-decision staircase
      // need it). A scale that lands feasible with the lowest objective wins;
      // otherwise take the largest violation decrease.
      double best_c = c_val, best_feasible_f = 0.0;
      double best_beta = 0.0, best_feasible_beta = 0.0;
      for (int k = 8; k >= -12; --k) {
        const double beta = std::ldexp(1.0, k);
        const Eigen::VectorXd probe_w = w + beta * feas_dir;
        const double c_probe = (*constraint)(probe_w);
        if (c_probe <= feas_tol) {
          const double f_probe = objective(probe_w);
          if (best_feasible_beta == 0.0 || f_probe < best_feasible_f) {
            best_feasible_beta = beta;
            best_feasible_f = f_probe;
          }
        } else if (c_probe < best_c - 1e-12) {
          best_c = c_probe;
          best_beta = beta;
        }
      }
      if (best_feasible_beta > 0.0) best_beta = best_feasible_beta;
      if (best_beta > 0.0) {
        w_new = w + best_beta * feas_dir;
        c_new = (*constraint)(w_new);
        f_new = objective(w_new);
        accepted = true;
      }
    }
    if (!accepted) {
      // Escalate the violation penalty so the merit search starts trading
      // objective for feasibility; give up once it is already dominant.
      if (constrained && c_val > feas_tol && rho < 1e7) {
        rho *= 10.0;
        continue;
      }
      break;
    }

    const double improvement = std::abs(f_val - f_new);
    w = w_new;
    f_val = f_new;
    c_val = c_new;

    if (c_val <= feas_tol) {
      if (!out.have_feasible || f_val < out.best_f) {
        out.have_feasible = true;
        out.best_w = w;
        out.best_f = f_val;
        out.best_c = c_val;
      }
    } else if (!out.have_feasible && c_val < out.best_c) {
      out.best_w = w;
      out.best_f = f_val;
      out.best_c = c_val;
    }

    if (improvement < params.ftol && c_val <= feas_tol) break;
  }

  if (!out.have_feasible && c_val < out.best_c) {
    out.best_w = w;
    out.best_f = f_val;
    out.best_c = c_val;
  }
  return out;
}

}  // namespace

TrainResult train_linear(const Dataset& data, const TrainConfig& config) {
  if (data.samples.empty()) throw ValidationError("cannot train on an empty dataset");
  if (config.solver.max_iterations <= 0 || !(config.solver.ftol > 0.0) ||
      !(config.solver.fd_eps > 0.0))
    throw ValidationError("solver parameters must be positive");

  const Eigen::Index dim = static_cast<Eigen::Index>(data.dimension()) + 2;
  const TrainingView view = TrainingView::build(data, config.psi);
  const HardConstraint constraint(config.constraint, config.bound, view, config.cost);
  const bool constrained = config.constraint != ConstraintKind::None;

  // Unconstrained fit from zero weights. Hard-decision constraints are scale
  // invariant at the all-positive origin, so the constrained phase starts from
  // this deterministic optimum instead, where margins actually spread.
  const SqpOutcome plain =
      sqp_loop(view, nullptr, Eigen::VectorXd::Zero(dim), config.solver);

  SqpOutcome final_outcome = plain;
  if (constrained) {
    final_outcome = sqp_loop(view, &constraint, plain.best_w, config.solver);
    final_outcome.iterations += plain.iterations;
  }

  TrainResult result;
  const Eigen::Index n = dim - 2;
  result.classifier.weights = final_outcome.best_w.head(n);
  result.classifier.v0 = final_outcome.best_w[n];
  result.classifier.v1 = final_outcome.best_w[n + 1];
  result.feasible = !constrained || final_outcome.have_feasible;
  result.iterations = final_outcome.iterations;
  result.objective = final_outcome.best_f;
  result.constraint_value = final_outcome.best_c;
  return result;
}

}  // namespace burden
