#include "burden/cost.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

namespace burden {

CostModel1D CostModel1D::scaled_linear(double a0, double a1) {
  if (!(a0 > 0.0) || !(a1 > 0.0))
    throw ValidationError("linear cost scales must be positive");
  CostModel1D m;
  m.kind_ = Kind::ScaledLinear;
  m.scale0_ = a0;
  m.scale1_ = a1;
  return m;
}

CostModel1D CostModel1D::quadratic_separable(double a0, double a1) {
  if (!(a0 > 0.0) || !(a1 > 0.0))
    throw ValidationError("quadratic cost scales must be positive");
  CostModel1D m;
  m.kind_ = Kind::QuadraticSeparable;
  m.scale0_ = a0;
  m.scale1_ = a1;
  return m;
}

CostModel1D CostModel1D::custom(CostFn d0, CostFn d1) {
  if (!d0 || !d1) throw ValidationError("custom cost functions must be callable");
  CostModel1D m;
  m.kind_ = Kind::Custom;
  m.custom0_ = std::move(d0);
  m.custom1_ = std::move(d1);
  return m;
}

double CostModel1D::base_cost(int z, double x1, double x2) const {
  switch (kind_) {
    case Kind::ScaledLinear:
      return scale(z) * (x2 - x1);
    case Kind::QuadraticSeparable:
      return scale(z) * (x2 * x2 - x1 * x1);
    case Kind::Custom:
      return (z == 0 ? custom0_ : custom1_)(x1, x2);
  }
  return 0.0;
}

namespace {

GradientBounds sample_custom_bounds(const CostModel1D::CostFn& d,
                                    const FeatureRange& range) {
  constexpr int kGridPoints = 1000;
  const double span = range.hi - range.lo;
  const double h = std::max(span * 1e-7, 1e-9);
  for (int i = 0; i < kGridPoints; i += 97) {
    const double x = range.lo + span * i / (kGridPoints - 1);
    if (std::abs(d(x, x)) > 1e-9)
      throw ValidationError("custom cost must vanish on the diagonal: d(x, x) != 0");
  }
  double g_min = std::numeric_limits<double>::infinity();
  double g_max = -std::numeric_limits<double>::infinity();
  for (int j = 1; j < kGridPoints; ++j) {
    const double x2 = range.lo + span * j / (kGridPoints - 1);
    for (int i = 0; i < j; ++i) {
      const double x1 = range.lo + span * i / (kGridPoints - 1);
      const double a = std::max(range.lo, x1 - h);
      const double b = std::min(x2, x1 + h);
      if (!(b > a)) continue;
      const double g = (d(b, x2) - d(a, x2)) / (b - a);
      g_min = std::min(g_min, g);
      g_max = std::max(g_max, g);
    }
  }
  if (g_max > 1e-9)
    throw ValidationError("custom cost is not outcome monotone: sampled gradient " +
                          std::to_string(g_max) + " > 0");
  g_max = std::min(g_max, 0.0);
  // 5% safety margin, widening the interval outward.
  return GradientBounds{g_min * 1.05, g_max * 0.95};
}

}  // namespace

std::array<GradientBounds, 2> gradient_bounds_1d(const CostModel1D& cost,
                                                 const FeatureRange& range) {
  if (!(range.hi > range.lo))
    throw ValidationError("feature range must be nonempty");
  std::array<GradientBounds, 2> out;
  for (int z = 0; z < 2; ++z) {
    switch (cost.kind()) {
      case CostModel1D::Kind::ScaledLinear:
        out[z] = GradientBounds{-cost.scale(z), -cost.scale(z)};
        break;
      case CostModel1D::Kind::QuadraticSeparable:
        out[z] = GradientBounds{-2.0 * cost.scale(z) * range.hi,
                                -2.0 * cost.scale(z) * range.lo};
        break;
      case CostModel1D::Kind::Custom:
        out[z] = sample_custom_bounds(z == 0 ? cost.custom0_ : cost.custom1_, range);
        break;
    }
    if (out[z].lower > out[z].upper || out[z].upper > 0.0)
      throw ValidationError("gradient bounds must satisfy g_l <= g_u <= 0");
  }
  return out;
}

LinearCostMultiD::LinearCostMultiD(Eigen::VectorXd d0, Eigen::VectorXd d1)
    : d0_(std::move(d0)), d1_(std::move(d1)) {
  if (d0_.size() != d1_.size())
    throw ValidationError("group cost vectors must have equal length");
  if (d0_.size() == 0) throw ValidationError("cost vectors must be non-empty");
  for (int z = 0; z < 2; ++z) {
    const Eigen::VectorXd& dz = d(z);
    bool any_finite = false;
    for (Eigen::Index i = 0; i < dz.size(); ++i) {
      if (!(dz[i] > 0.0))
        throw ValidationError("cost entries must be in (0, +inf], got " +
                              std::to_string(dz[i]) + " at index " + std::to_string(i));
      if (std::isfinite(dz[i])) any_finite = true;
    }
    if (!any_finite)
      throw ValidationError("group " + std::to_string(z) +
                            " cost vector has no finite (manipulable) entry");
  }
}

double LinearCostMultiD::cost(int z, const Eigen::VectorXd& from,
                              const Eigen::VectorXd& to) const {
  const Eigen::VectorXd& dz = d(z);
  if (from.size() != dz.size() || to.size() != dz.size())
    throw SchemaError("cost vector dimension mismatch");
  if (((to - from).array() < 0.0).any()) return 0.0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < dz.size(); ++i) {
    const double delta = to[i] - from[i];
    if (delta > 0.0) total += dz[i] * delta;  // inf * 0 avoided on purpose
  }
  return total;
}

void check_cost_schema_agreement(const LinearCostMultiD& cost,
                                 const FeatureSchema& schema) {
  if (schema.manipulable.empty()) return;
  if (schema.manipulable.size() != cost.dimension())
    throw SchemaError("cost vector length does not match schema");
  for (std::size_t i = 0; i < cost.dimension(); ++i) {
    const bool finite0 = std::isfinite(cost.d(0)[static_cast<Eigen::Index>(i)]);
    const bool finite1 = std::isfinite(cost.d(1)[static_cast<Eigen::Index>(i)]);
    if (finite0 != finite1)
      throw SchemaError("groups disagree on manipulability of feature '" +
                        schema.names[i] + "'");
    if (finite0 != schema.manipulable[i])
      throw SchemaError("cost vector and schema mask disagree on feature '" +
                        schema.names[i] + "'");
  }
}

QuadraticCostMultiD::QuadraticCostMultiD(Eigen::MatrixXd B) : B_(std::move(B)) {
  if (B_.rows() != B_.cols() || B_.rows() == 0)
    throw ValidationError("quadratic cost matrix must be square and non-empty");
  const double scale = std::max(1.0, B_.cwiseAbs().maxCoeff());
  if ((B_ - B_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ValidationError("quadratic cost matrix is not symmetric within 1e-12");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B_, Eigen::EigenvaluesOnly);
  const double lambda_min = es.eigenvalues().minCoeff();
  const double lambda_max = es.eigenvalues().maxCoeff();
  if (!(lambda_min > 0.0))
    throw NumericalError("quadratic cost matrix is not positive definite");
  if (lambda_max / lambda_min > 1e12)
    throw NumericalError("quadratic cost matrix is near-singular (condition number > 1e12)");
  llt_.compute(B_);
  if (llt_.info() != Eigen::Success)
    throw NumericalError("Cholesky factorization of quadratic cost matrix failed");
}

double QuadraticCostMultiD::cost(const Eigen::VectorXd& from,
                                 const Eigen::VectorXd& to) const {
  if (from.size() != B_.rows() || to.size() != B_.rows())
    throw SchemaError("quadratic cost dimension mismatch");
  if (((to - from).array() < 0.0).any()) return 0.0;
  const Eigen::VectorXd step = to - from;
  return step.dot(B_ * step);
}

}  // namespace burden
