#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <array>
#include <functional>
#include <limits>
#include <variant>

#include "burden/errors.hpp"
#include "burden/types.hpp"

namespace burden {

struct FeatureRange {
  double lo = 0.0;
  double hi = 1.0;
};

// Bounds on the gradient of d_z with respect to the starting feature over a
// feature range; both ends are non-positive (outcome monotonicity).
struct GradientBounds {
  double lower = 0.0;  // g_l
  double upper = 0.0;  // g_u, g_l <= g_u <= 0
};

// One-dimensional per-group manipulation cost d_z(x1, x2). The full cost
// charges d_z only for upward moves: c_z(x1, x2) = d_z(x1, x2) * 1(x2 > x1).
//
// Built-ins:
//   scaled linear        d_z(x1, x2) = a_z * (x2 - x1)
//   quadratic separable  d_z(x1, x2) = a_z * (x2^2 - x1^2)
// Custom functions get their gradient bounds by finite-difference sampling.
class CostModel1D {
 public:
  enum class Kind { ScaledLinear, QuadraticSeparable, Custom };

  using CostFn = std::function<double(double, double)>;

  static CostModel1D scaled_linear(double a0, double a1);
  static CostModel1D quadratic_separable(double a0 = 1.0, double a1 = 1.0);
  static CostModel1D custom(CostFn d0, CostFn d1);

  Kind kind() const { return kind_; }
  double scale(int z) const { return z == 0 ? scale0_ : scale1_; }

  // d_z(x1, x2), no indicator applied.
  double base_cost(int z, double x1, double x2) const;

  // c_z(x1, x2) = d_z(x1, x2) * 1(x2 > x1).
  double cost(int z, double x1, double x2) const {
    return x2 > x1 ? base_cost(z, x1, x2) : 0.0;
  }

 private:
  CostModel1D() = default;

  Kind kind_ = Kind::ScaledLinear;
  double scale0_ = 1.0;
  double scale1_ = 1.0;
  CostFn custom0_;
  CostFn custom1_;

  friend std::array<GradientBounds, 2> gradient_bounds_1d(const CostModel1D&,
                                                          const FeatureRange&);
};

// Per-group gradient bounds of d_z over the feature range. Analytic for the
// built-in variants; custom functions are sampled on a 1000-point grid and
// the observed range is widened by 5%. Throws ValidationError when a sampled
// gradient is positive (monotonicity violation).
std::array<GradientBounds, 2> gradient_bounds_1d(const CostModel1D& cost,
                                                 const FeatureRange& range);

// Multi-dimensional linear cost c_z(x, x') = d_z'(x' - x) for x' >= x
// componentwise, 0 otherwise. Infinite entries mark non-manipulable features.
class LinearCostMultiD {
 public:
  // Entries must be in (0, +inf]; each group needs at least one finite entry.
  LinearCostMultiD(Eigen::VectorXd d0, Eigen::VectorXd d1);

  const Eigen::VectorXd& d(int z) const { return z == 0 ? d0_ : d1_; }
  std::size_t dimension() const { return static_cast<std::size_t>(d0_.size()); }

  double cost(int z, const Eigen::VectorXd& from, const Eigen::VectorXd& to) const;

 private:
  Eigen::VectorXd d0_;
  Eigen::VectorXd d1_;
};

// The schema mask and the cost vectors must mark the same features as
// manipulable (finite cost <=> manipulable). Throws SchemaError.
void check_cost_schema_agreement(const LinearCostMultiD& cost,
                                 const FeatureSchema& schema);

// Generalized squared interpoint distance c(x, x') = (x'-x)' B (x'-x) for a
// symmetric positive-definite B (shared across groups).
class QuadraticCostMultiD {
 public:
  // Validates symmetry (1e-12) and positive-definiteness; throws
  // NumericalError when the condition number exceeds 1e12.
  explicit QuadraticCostMultiD(Eigen::MatrixXd B);

  const Eigen::MatrixXd& matrix() const { return B_; }
  std::size_t dimension() const { return static_cast<std::size_t>(B_.rows()); }

  double cost(const Eigen::VectorXd& from, const Eigen::VectorXd& to) const;

  // B^{ -1} rhs via the cached Cholesky factorization.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const { return llt_.solve(rhs); }

 private:
  Eigen::MatrixXd B_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

using CostModel = std::variant<CostModel1D, LinearCostMultiD, QuadraticCostMultiD>;

inline constexpr double kInfCost = std::numeric_limits<double>::infinity();

}  // namespace burden
