#include "burden/types.hpp"

#include <string>

namespace burden {

void Dataset::validate() const {
  const std::size_t d = schema.dimension();
  if (!schema.manipulable.empty() && schema.manipulable.size() != d)
    throw SchemaError("schema manipulable mask length does not match feature count");
  if (!schema.normalization.empty()) {
    if (schema.normalization.size() != d)
      throw SchemaError("schema normalization length does not match feature count");
    for (std::size_t j = 0; j < d; ++j)
      if (!(schema.normalization[j].stddev > 0.0))
        throw ValidationError("normalization stddev must be > 0 for feature '" +
                              schema.names[j] + "'");
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Sample& s = samples[i];
    if (static_cast<std::size_t>(s.features.size()) != d)
      throw SchemaError("sample " + std::to_string(i) +
                        " has dimension " + std::to_string(s.features.size()) +
                        ", schema declares " + std::to_string(d));
    if (s.label != 0 && s.label != 1)
      throw ValidationError("sample " + std::to_string(i) + " has non-binary label");
    if (s.group != 0 && s.group != 1)
      throw ValidationError("sample " + std::to_string(i) + " has non-binary group");
  }
}

int classify(const ThresholdClassifier& f, const Sample& s) {
  if (s.features.size() != 1)
    throw SchemaError("threshold classifier expects 1-D features, got dimension " +
                      std::to_string(s.features.size()));
  return s.features[0] >= f.tau(s.group) ? 1 : 0;
}

int classify(const LinearClassifier& f, const Sample& s) {
  if (s.features.size() != f.weights.size())
    throw SchemaError("linear classifier dimension " + std::to_string(f.weights.size()) +
                      " does not match sample dimension " +
                      std::to_string(s.features.size()));
  return f.weights.dot(s.features) >= f.offset(s.group) ? 1 : 0;
}

int classify(const Classifier& f, const Sample& s) {
  return std::visit([&](const auto& clf) { return classify(clf, s); }, f);
}

double decision_score(const Classifier& f, const Eigen::VectorXd& x) {
  if (std::holds_alternative<ThresholdClassifier>(f)) {
    if (x.size() != 1)
      throw SchemaError("threshold classifier expects 1-D features");
    return x[0];
  }
  const auto& lin = std::get<LinearClassifier>(f);
  if (x.size() != lin.weights.size())
    throw SchemaError("linear classifier dimension mismatch in decision_score");
  return lin.weights.dot(x);
}

double decision_threshold(const Classifier& f, int z) {
  if (std::holds_alternative<ThresholdClassifier>(f))
    return std::get<ThresholdClassifier>(f).tau(z);
  return std::get<LinearClassifier>(f).offset(z);
}

std::size_t classifier_dimension(const Classifier& f) {
  if (std::holds_alternative<ThresholdClassifier>(f)) return 1;
  return static_cast<std::size_t>(std::get<LinearClassifier>(f).weights.size());
}

}  // namespace burden
