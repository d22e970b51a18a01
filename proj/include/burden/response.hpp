#pragma once

#include <Eigen/Core>

#include "burden/cost.hpp"
#include "burden/types.hpp"

namespace burden {

// BoundaryCost charges every negatively classified individual the minimum
// cost of reaching the decision boundary; this is the quantity the burden
// bounds integrate, and the default for all G computations. Rational
// manipulates only when the utility f(x') - c(x, x') does not decrease,
// i.e. when the boundary cost is <= 1; it is meant for simulation use.
enum class ResponseSemantics { BoundaryCost, Rational };

struct BestResponse1D {
  double moved_to = 0.0;
  double cost_paid = 0.0;
};

struct BestResponseMultiD {
  Eigen::VectorXd moved_to;
  double cost_paid = 0.0;
  // Set when a quadratic best response decreases some component (the
  // closed form drops the x' >= x constraint).
  bool decreased_component = false;
};

BestResponse1D best_response_1d(double x, const ThresholdClassifier& f, int z,
                                const CostModel1D& cost, ResponseSemantics semantics);

// Cheapest manipulation against a linear classifier under linear costs: all
// mass goes on the feature with the best ratio u_i / d_{z,i} (lowest index on
// ties). Throws InfeasibleManipulationError when no useful direction exists.
BestResponseMultiD best_response_linear(const Eigen::VectorXd& x,
                                        const LinearClassifier& f, int z,
                                        const LinearCostMultiD& cost);

// Closed-form best response under the quadratic cost: x' = x + (lambda/2) B^{-1} u
// with lambda = 2 (v_z - u'x) / (u' B^{-1} u).
BestResponseMultiD best_response_quadratic(const Eigen::VectorXd& x,
                                           const LinearClassifier& f, int z,
                                           const QuadraticCostMultiD& cost);

// Best cost-efficiency ratio w_z* = max_i u_i / d_i over finite-cost features;
// *argmax_index (optional) receives the lowest maximizing index.
double best_ratio(const Eigen::VectorXd& u, const Eigen::VectorXd& d,
                  Eigen::Index* argmax_index = nullptr);

// Boundary cost paid by one sample against any classifier/cost pairing under
// the given semantics; dispatch used by the metrics module.
double response_cost(const Sample& s, const Classifier& f, const CostModel& cost,
                     ResponseSemantics semantics);

}  // namespace burden
