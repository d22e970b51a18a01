#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "burden/errors.hpp"

namespace burden {

// One individual: feature vector x, binary label y, binary group z.
struct Sample {
  Eigen::VectorXd features;
  int label = 0;  // y in {0,1}
  int group = 0;  // z in {0,1}
};

struct NormPair {
  double mean = 0.0;
  double stddev = 1.0;
};

struct FeatureSchema {
  std::vector<std::string> names;
  std::vector<bool> manipulable;          // same length as names
  std::vector<NormPair> normalization;    // empty, or one pair per feature

  std::size_t dimension() const { return names.size(); }
};

struct Dataset {
  std::vector<Sample> samples;
  FeatureSchema schema;

  std::size_t dimension() const { return schema.dimension(); }
  std::size_t size() const { return samples.size(); }

  // Checks schema conformance, binary labels/groups, and positive
  // normalization stddevs. Throws SchemaError / ValidationError.
  void validate() const;
};

// Sub-population condition psi. All is the statistical-rate condition,
// PositiveLabel restricts to true-label-positive individuals (TPR metrics).
enum class SubPop { All, PositiveLabel };

struct SubPopCondition {
  SubPop kind = SubPop::All;
};

inline bool evaluate_psi(const SubPopCondition& psi, const Sample& s) {
  return psi.kind == SubPop::All || s.label == 1;
}

inline const char* psi_name(const SubPopCondition& psi) {
  return psi.kind == SubPop::All ? "sr" : "tpr";
}

// Group-threshold classifier on a single feature: positive iff x >= tau_z.
struct ThresholdClassifier {
  double tau0 = 0.0;
  double tau1 = 0.0;

  double tau(int z) const { return z == 0 ? tau0 : tau1; }
};

// Linear classifier with group-specific intercepts: positive iff u'x >= v_z.
// A shared-threshold classifier is the special case v0 == v1.
struct LinearClassifier {
  Eigen::VectorXd weights;  // u
  double v0 = 0.0;
  double v1 = 0.0;

  double offset(int z) const { return z == 0 ? v0 : v1; }
};

using Classifier = std::variant<ThresholdClassifier, LinearClassifier>;

int classify(const ThresholdClassifier& f, const Sample& s);
int classify(const LinearClassifier& f, const Sample& s);
int classify(const Classifier& f, const Sample& s);

// Scalar score the decision thresholds act on: the raw feature in 1-D,
// the projection u'x for linear classifiers.
double decision_score(const Classifier& f, const Eigen::VectorXd& x);

// tau_z for threshold classifiers, v_z for linear ones.
double decision_threshold(const Classifier& f, int z);

std::size_t classifier_dimension(const Classifier& f);

}  // namespace burden
