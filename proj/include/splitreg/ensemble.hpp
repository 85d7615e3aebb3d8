#pragma once

#include <optional>

#include "splitreg/standardize.hpp"
#include "splitreg/types.hpp"

namespace splitreg {

/// The pooled predictor: coefficients and intercept averaged across models
/// with equal weights, in raw data units.
struct AveragedModel {
  Vector beta;  // p, raw units
  double intercept = 0.0;
};

/// Equal-weight average of the per-model coefficient columns. Works on
/// whichever scale the bundle is on.
Vector average_coefficients(const CoefficientBundle& bundle);

/// Pools raw-unit per-model coefficients into the single averaged model.
AveragedModel average_model(const RawCoefficients& raw);

/// Predictions intercept + x_raw . beta for raw-unit inputs.
Vector predict(const Matrix& x_raw, const AveragedModel& model);

/// Overlap of the per-model supports. With o_j the fraction of models in
/// which feature j is active (nonzero by exact comparison), this is the mean
/// of o_j over the features active in at least one model, and 0 when no
/// feature is active anywhere. Lies in [1/G, 1] otherwise.
double overlap(const CoefficientBundle& bundle);

/// True when no feature is active in more than one model, i.e. the supports
/// are pairwise disjoint. Equivalent to overlap(bundle) <= 1/G.
bool supports_disjoint(const CoefficientBundle& bundle);

/// Support recovery of `estimate` against the generating `truth`, both by
/// exact-zero comparison. `precision` is empty when `estimate` selects
/// nothing, `recall` when `truth` has no nonzeros.
struct PrecisionRecall {
  std::optional<double> precision;
  std::optional<double> recall;
};

PrecisionRecall precision_recall(const Vector& estimate, const Vector& truth);

}  // namespace splitreg
