#include "splitreg/ensemble.hpp"

namespace splitreg {

Vector average_coefficients(const CoefficientBundle& bundle) {
  if (bundle.beta.size() == 0) throw InvalidInput("average_coefficients: empty bundle");
  return bundle.beta.rowwise().mean();
}

AveragedModel average_model(const RawCoefficients& raw) {
  if (raw.beta.cols() != raw.intercepts.size())
    throw InvalidInput("average_model: coefficient columns and intercepts disagree");
  if (raw.beta.size() == 0) throw InvalidInput("average_model: empty coefficients");
  AveragedModel model;
  model.beta = raw.beta.rowwise().mean();
  model.intercept = raw.intercepts.mean();
  return model;
}

Vector predict(const Matrix& x_raw, const AveragedModel& model) {
  if (x_raw.cols() != model.beta.size())
    throw InvalidInput("predict: design has " + std::to_string(x_raw.cols()) +
                       " columns but the model has " + std::to_string(model.beta.size()) +
                       " coefficients");
  return (x_raw * model.beta).array() + model.intercept;
}

double overlap(const CoefficientBundle& bundle) {
  const Index p = bundle.p();
  const Index num_models = bundle.num_models();
  if (p == 0 || num_models == 0) throw InvalidInput("overlap: empty bundle");
  double numerator = 0.0;
  Index active_features = 0;
  for (Index j = 0; j < p; ++j) {
    Index active_models = 0;
    for (Index g = 0; g < num_models; ++g)
      if (bundle.beta(j, g) != 0.0) ++active_models;
    if (active_models > 0) {
      numerator += static_cast<double>(active_models) / static_cast<double>(num_models);
      ++active_features;
    }
  }
  if (active_features == 0) return 0.0;
  return numerator / static_cast<double>(active_features);
}

bool supports_disjoint(const CoefficientBundle& bundle) {
  for (Index j = 0; j < bundle.p(); ++j) {
    Index active_models = 0;
    for (Index g = 0; g < bundle.num_models(); ++g)
      if (bundle.beta(j, g) != 0.0) ++active_models;
    if (active_models > 1) return false;
  }
  return true;
}

PrecisionRecall precision_recall(const Vector& estimate, const Vector& truth) {
  if (estimate.size() != truth.size())
    throw InvalidInput("precision_recall: estimate and truth have different lengths");
  Index true_positive = 0, selected = 0, relevant = 0;
  for (Index j = 0; j < estimate.size(); ++j) {
    const bool est_active = estimate[j] != 0.0;
    const bool true_active = truth[j] != 0.0;
    selected += est_active;
    relevant += true_active;
    true_positive += est_active && true_active;
  }
  PrecisionRecall result;
  if (selected > 0)
    result.precision = static_cast<double>(true_positive) / static_cast<double>(selected);
  if (relevant > 0)
    result.recall = static_cast<double>(true_positive) / static_cast<double>(relevant);
  return result;
}

}  // namespace splitreg
