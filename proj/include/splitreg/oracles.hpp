#pragma once

#include <vector>

#include "splitreg/rng.hpp"
#include "splitreg/types.hpp"

namespace splitreg {

/// Closed-form reference solutions for small configurations, used to verify
/// the coordinate-descent solver, plus the prediction-error bound of the
/// consistency result. Test-facing API.

/// Orthogonal design, two models: r_j = y . x_j / n per feature.
struct OrthogonalCase {
  Vector r;
  PenaltySpec spec;  // num_models must be 2
};

enum class OrthogonalRegime {
  AllZero,   // |r_j| <= alpha lambda_s: both coefficients zero
  Shared,    // lambda_d < 1 + (1-alpha) lambda_s: both equal `value`
  Split,     // lambda_d > 1 + (1-alpha) lambda_s: one zero, other `value`
  Boundary,  // lambda_d at the threshold: solutions form a continuum with
             // beta1 + beta2 = `value` and beta1 * beta2 >= 0
};

struct OrthogonalFeatureSolution {
  OrthogonalRegime regime = OrthogonalRegime::AllZero;
  double value = 0.0;
};

/// Per-feature minimizers for the orthogonal two-model case. The Boundary
/// regime is reported for |lambda_d - (1 + (1-alpha) lambda_s)| < 1e-6,
/// where the solution set is a continuum.
std::vector<OrthogonalFeatureSolution> orthogonal_solution(const OrthogonalCase& c);

/// Two correlated predictors, two models: rho = x_2 . x_1 / n and
/// r_j = y . x_j / n with columns normalized to squared norm n.
struct TwoPredictorCase {
  double r1 = 0.0;
  double r2 = 0.0;
  double rho = 0.0;
  PenaltySpec spec;  // num_models must be 2, p = 2
};

/// Solves the 4x4 stationarity system for the case lambda_s = 0 with both
/// variables active in both models and matching signs across models.
/// Requires lambda_d < 1 - rho for a guaranteed-unique solution.
CoefficientBundle two_predictor_both_active(const TwoPredictorCase& c);

/// The stationarity system matrix (unknowns ordered beta1_1, beta2_1,
/// beta2_2, beta1_2); exposed for residual and eigenvalue checks.
Eigen::Matrix4d two_predictor_system_matrix(double rho, double lambda_d);

/// Smallest diversity strength compatible with disjoint fitted models,
/// max over j of (|r_i - rho T_j| - alpha lambda_s) / |T_i|, where
/// T_j = soft(r_j, alpha lambda_s) / (1 + (1-alpha) lambda_s).
/// Throws when either T_j is zero.
double disjoint_lambda_d_bound(const TwoPredictorCase& c);

/// Right-hand side of the prediction-error bound:
/// 2 alpha lambda_s ||b0||_1 + lambda_s (1-alpha)/2 ||b0||_2^2
/// + lambda_d (G-1)/2 ||b0||_2^2.
double theorem1_bound(const Vector& beta0, const PenaltySpec& spec);

/// The objective rewritten as an artificial multivariate regression:
/// (1/2n) ||Y - X B||_F^2 + lambda_s ((1-alpha)/2 ||B||_F^2 + alpha ||B||_1)
/// + (lambda_d/2) (|| |B|' |B| ||_1 - ||B||_F^2), with Y the response
/// replicated G times. Independent route for objective-equivalence checks.
double objective_frobenius_form(const StandardizedDesign& design, const CoefficientBundle& bundle,
                                const PenaltySpec& spec);

/// Random design whose columns are mean-zero, satisfy the 1/n moment
/// convention, and are exactly orthogonal (X'X = n I); requires p <= n - 1.
/// The response is drawn and standardized with the same convention.
StandardizedDesign make_orthogonal_design(Index n, Index p, Rng& rng);

}  // namespace splitreg
