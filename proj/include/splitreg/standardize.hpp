#pragma once

#include "splitreg/types.hpp"

namespace splitreg {

/// Centers and scales predictors and response to the 1/n moment convention
/// (column mean 0, (1/n) sum of squares 1). Throws InvalidInput naming the
/// offending column when a predictor or the response is constant.
StandardizedDesign standardize(const Matrix& x_raw, const Vector& y_raw);

/// Coefficients mapped back to the units of the raw data, one intercept per
/// model. Predictions in raw units are intercept[g] + x_raw . beta.col(g).
struct RawCoefficients {
  Matrix beta;        // p x G, raw units
  Vector intercepts;  // G
};

/// Maps a standardized-scale bundle back to raw units using the stored
/// centering/scaling factors.
RawCoefficients destandardize(const CoefficientBundle& bundle, const StandardizedDesign& design);

}  // namespace splitreg
