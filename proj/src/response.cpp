#include "burden/response.hpp"

#include <cmath>
#include <string>

namespace burden {

BestResponse1D best_response_1d(double x, const ThresholdClassifier& f, int z,
                                const CostModel1D& cost, ResponseSemantics semantics) {
  const double tau = f.tau(z);
  if (x >= tau) return {x, 0.0};
  const double boundary_cost = cost.base_cost(z, x, tau);
  if (semantics == ResponseSemantics::Rational && boundary_cost > 1.0)
    return {x, 0.0};
  return {tau, boundary_cost};
}

double best_ratio(const Eigen::VectorXd& u, const Eigen::VectorXd& d,
                  Eigen::Index* argmax_index) {
  if (u.size() != d.size())
    throw SchemaError("weight and cost vectors must have equal length");
  double best = -std::numeric_limits<double>::infinity();
  Eigen::Index best_index = -1;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (!std::isfinite(d[i])) continue;
    const double ratio = u[i] / d[i];
    if (ratio > best) {
      best = ratio;
      best_index = i;
    }
  }
  if (best_index < 0)
    throw InfeasibleManipulationError("all features are non-manipulable");
  if (argmax_index) *argmax_index = best_index;
  return best;
}

BestResponseMultiD best_response_linear(const Eigen::VectorXd& x,
                                        const LinearClassifier& f, int z,
                                        const LinearCostMultiD& cost) {
  if (x.size() != f.weights.size())
    throw SchemaError("sample dimension does not match classifier");
  const double score = f.weights.dot(x);
  const double v = f.offset(z);
  if (score >= v) return {x, 0.0, false};

  Eigen::Index pivot = -1;
  const double w_star = best_ratio(f.weights, cost.d(z), &pivot);
  if (!(w_star > 0.0))
    throw InfeasibleManipulationError(
        "no manipulable feature raises the score (best ratio " +
        std::to_string(w_star) + ")");
  const double cost_paid = (v - score) / w_star;
  Eigen::VectorXd moved = x;
  moved[pivot] += cost_paid / cost.d(z)[pivot];
  return {std::move(moved), cost_paid, false};
}

BestResponseMultiD best_response_quadratic(const Eigen::VectorXd& x,
                                           const LinearClassifier& f, int z,
                                           const QuadraticCostMultiD& cost) {
  if (x.size() != f.weights.size())
    throw SchemaError("sample dimension does not match classifier");
  if (cost.dimension() != static_cast<std::size_t>(x.size()))
    throw SchemaError("quadratic cost dimension does not match sample");
  const double score = f.weights.dot(x);
  const double v = f.offset(z);
  if (score >= v) return {x, 0.0, false};

  const Eigen::VectorXd direction = cost.solve(f.weights);  // B^{-1} u
  const double quad = f.weights.dot(direction);             // u' B^{-1} u
  if (!(quad > 0.0))
    throw NumericalError("u' B^{-1} u is not positive");
  const double lambda = 2.0 * (v - score) / quad;
  Eigen::VectorXd moved = x + 0.5 * lambda * direction;
  const double cost_paid = (v - score) * (v - score) / quad;
  const bool decreased = (direction.array() < 0.0).any();
  return {std::move(moved), cost_paid, decreased};
}

double response_cost(const Sample& s, const Classifier& f, const CostModel& cost,
                     ResponseSemantics semantics) {
  if (std::holds_alternative<ThresholdClassifier>(f)) {
    if (!std::holds_alternative<CostModel1D>(cost))
      throw SchemaError("threshold classifiers require a 1-D cost model");
    if (s.features.size() != 1)
      throw SchemaError("threshold classifier expects 1-D features");
    return best_response_1d(s.features[0], std::get<ThresholdClassifier>(f), s.group,
                            std::get<CostModel1D>(cost), semantics)
        .cost_paid;
  }
  const auto& lin = std::get<LinearClassifier>(f);
  double paid = 0.0;
  if (std::holds_alternative<LinearCostMultiD>(cost)) {
    paid = best_response_linear(s.features, lin, s.group,
                                std::get<LinearCostMultiD>(cost))
               .cost_paid;
  } else if (std::holds_alternative<QuadraticCostMultiD>(cost)) {
    paid = best_response_quadratic(s.features, lin, s.group,
                                   std::get<QuadraticCostMultiD>(cost))
               .cost_paid;
  } else {
    throw SchemaError("linear classifiers require a multi-dimensional cost model");
  }
  if (semantics == ResponseSemantics::Rational && paid > 1.0) return 0.0;
  return paid;
}

}  // namespace burden
