#include "splitreg/standardize.hpp"

#include <cmath>

namespace splitreg {

namespace {

// Centers v in place and returns the center. A second pass removes the
// residual mean left by floating-point cancellation on badly scaled data.
double center_column(Eigen::Ref<Vector> v) {
  const double n = static_cast<double>(v.size());
  double center = v.sum() / n;
  v.array() -= center;
  const double residual = v.sum() / n;
  v.array() -= residual;
  return center + residual;
}

}  // namespace

StandardizedDesign standardize(const Matrix& x_raw, const Vector& y_raw) {
  const Index n = x_raw.rows();
  const Index p = x_raw.cols();
  if (n != y_raw.size())
    throw InvalidInput("standardize: x has " + std::to_string(n) + " rows but y has " +
                       std::to_string(y_raw.size()) + " entries");
  if (n < 2) throw InvalidInput("standardize: need at least 2 observations");
  if (p < 1) throw InvalidInput("standardize: need at least 1 predictor");

  StandardizedDesign d;
  d.x = x_raw;
  d.y = y_raw;
  d.col_center.resize(p);
  d.col_scale.resize(p);

  const double inv_n = 1.0 / static_cast<double>(n);
  for (Index j = 0; j < p; ++j) {
    auto col = d.x.col(j);
    d.col_center[j] = center_column(col);
    const double scale = std::sqrt(col.squaredNorm() * inv_n);
    if (!(scale > 0.0) || !std::isfinite(scale))
      throw InvalidInput("standardize: column " + std::to_string(j) + " is constant");
    col /= scale;
    d.col_scale[j] = scale;
  }

  d.y_center = center_column(d.y);
  const double y_scale = std::sqrt(d.y.squaredNorm() * inv_n);
  if (!(y_scale > 0.0) || !std::isfinite(y_scale))
    throw InvalidInput("standardize: response is constant");
  d.y /= y_scale;
  d.y_scale = y_scale;
  return d;
}

RawCoefficients destandardize(const CoefficientBundle& bundle, const StandardizedDesign& design) {
  if (!bundle.on_standardized_scale)
    throw InvalidInput("destandardize: bundle is already on the raw scale");
  bundle.validate(design.p(), bundle.num_models());

  const Index p = design.p();
  const Index num_models = bundle.num_models();
  RawCoefficients raw;
  raw.beta.resize(p, num_models);
  raw.intercepts.resize(num_models);
  for (Index g = 0; g < num_models; ++g) {
    raw.beta.col(g) = design.y_scale * bundle.beta.col(g).cwiseQuotient(design.col_scale);
    raw.intercepts[g] = design.y_center - raw.beta.col(g).dot(design.col_center);
  }
  return raw;
}

}  // namespace splitreg
