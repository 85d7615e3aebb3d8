#include "splitreg/oracles.hpp"

#include <cmath>

#include "splitreg/objective.hpp"

namespace splitreg {

namespace {

void require_two_models(const PenaltySpec& spec, const char* where) {
  spec.validate();
  if (spec.num_models != 2)
    throw InvalidInput(std::string(where) + ": closed form requires num_models == 2");
}

}  // namespace

std::vector<OrthogonalFeatureSolution> orthogonal_solution(const OrthogonalCase& c) {
  require_two_models(c.spec, "orthogonal_solution");
  const double ridge = 1.0 + (1.0 - c.spec.alpha) * c.spec.lambda_s;
  const double l1 = c.spec.alpha * c.spec.lambda_s;

  std::vector<OrthogonalFeatureSolution> out(static_cast<std::size_t>(c.r.size()));
  for (Index j = 0; j < c.r.size(); ++j) {
    const double r = c.r[j];
    OrthogonalFeatureSolution& s = out[static_cast<std::size_t>(j)];
    if (std::abs(r) <= l1) {
      s = {OrthogonalRegime::AllZero, 0.0};
    } else if (std::abs(c.spec.lambda_d - ridge) < 1e-6) {
      s = {OrthogonalRegime::Boundary, soft_threshold(r, l1) / ridge};
    } else if (c.spec.lambda_d < ridge) {
      s = {OrthogonalRegime::Shared, soft_threshold(r, l1) / (ridge + c.spec.lambda_d)};
    } else {
      s = {OrthogonalRegime::Split, soft_threshold(r, l1) / ridge};
    }
  }
  return out;
}

Eigen::Matrix4d two_predictor_system_matrix(double rho, double lambda_d) {
  Eigen::Matrix4d m;
  m << 1.0, lambda_d, 0.0, rho,
       lambda_d, 1.0, rho, 0.0,
       0.0, rho, 1.0, lambda_d,
       rho, 0.0, lambda_d, 1.0;
  return m;
}

CoefficientBundle two_predictor_both_active(const TwoPredictorCase& c) {
  require_two_models(c.spec, "two_predictor_both_active");
  if (c.spec.lambda_s != 0.0)
    throw InvalidInput("two_predictor_both_active: closed form requires lambda_s == 0");
  if (!(std::abs(c.rho) < 1.0))
    throw InvalidInput("two_predictor_both_active: |rho| must be < 1");
  if (!(c.spec.lambda_d < 1.0 - c.rho))
    throw InvalidInput("two_predictor_both_active: uniqueness not guaranteed for lambda_d >= 1 - rho");

  const Eigen::Matrix4d m = two_predictor_system_matrix(c.rho, c.spec.lambda_d);
  const Eigen::Vector4d rhs(c.r1, c.r1, c.r2, c.r2);
  const Eigen::Vector4d sol = m.partialPivLu().solve(rhs);

  CoefficientBundle bundle;
  bundle.beta.resize(2, 2);
  // Unknown order in the system: beta1_1, beta2_1, beta2_2, beta1_2.
  bundle.beta(0, 0) = sol[0];
  bundle.beta(0, 1) = sol[1];
  bundle.beta(1, 1) = sol[2];
  bundle.beta(1, 0) = sol[3];
  bundle.on_standardized_scale = true;
  return bundle;
}

double disjoint_lambda_d_bound(const TwoPredictorCase& c) {
  require_two_models(c.spec, "disjoint_lambda_d_bound");
  const double ridge = 1.0 + (1.0 - c.spec.alpha) * c.spec.lambda_s;
  const double l1 = c.spec.alpha * c.spec.lambda_s;
  const double t1 = soft_threshold(c.r1, l1) / ridge;
  const double t2 = soft_threshold(c.r2, l1) / ridge;
  if (t1 == 0.0 || t2 == 0.0)
    throw InvalidInput("disjoint_lambda_d_bound: threshold undefined, a marginal coefficient is zero");
  const double bound1 = (std::abs(c.r1 - c.rho * t2) - l1) / std::abs(t1);
  const double bound2 = (std::abs(c.r2 - c.rho * t1) - l1) / std::abs(t2);
  return std::max(bound1, bound2);
}

double theorem1_bound(const Vector& beta0, const PenaltySpec& spec) {
  spec.validate();
  const double l1_norm = beta0.lpNorm<1>();
  const double sq_norm = beta0.squaredNorm();
  return 2.0 * spec.alpha * spec.lambda_s * l1_norm +
         0.5 * spec.lambda_s * (1.0 - spec.alpha) * sq_norm +
         0.5 * spec.lambda_d * static_cast<double>(spec.num_models - 1) * sq_norm;
}

double objective_frobenius_form(const StandardizedDesign& design, const CoefficientBundle& bundle,
                                const PenaltySpec& spec) {
  spec.validate();
  bundle.validate(design.p(), spec.num_models);
  const Index num_models = spec.num_models;

  const Matrix y_rep = design.y.replicate(1, num_models);
  const double loss = (y_rep - design.x * bundle.beta).squaredNorm() /
                      (2.0 * static_cast<double>(design.n()));
  const double sparsity = 0.5 * (1.0 - spec.alpha) * bundle.beta.squaredNorm() +
                          spec.alpha * bundle.beta.cwiseAbs().sum();
  const Matrix abs_beta = bundle.beta.cwiseAbs();
  const double gram_l1 = (abs_beta.transpose() * abs_beta).sum();
  const double diversity = 0.5 * (gram_l1 - bundle.beta.squaredNorm());
  return loss + spec.lambda_s * sparsity + spec.lambda_d * diversity;
}

StandardizedDesign make_orthogonal_design(Index n, Index p, Rng& rng) {
  if (p > n - 1)
    throw InvalidInput("make_orthogonal_design: need p <= n - 1 for mean-zero orthogonal columns");
  // Center Gaussian columns so they live orthogonal to the all-ones vector,
  // then orthonormalize; the Q factor inherits that orthogonality, so scaled
  // columns are simultaneously mean-zero and exactly orthogonal.
  Matrix g(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) g(i, j) = rng.normal();
  const Eigen::RowVectorXd column_means = g.colwise().mean();
  g.rowwise() -= column_means;
  const Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, p);

  StandardizedDesign d;
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  d.x = sqrt_n * q;
  d.col_center = Vector::Zero(p);
  d.col_scale = Vector::Ones(p);

  Vector y(n);
  for (Index i = 0; i < n; ++i) y[i] = rng.normal();
  y.array() -= y.mean();
  const double scale = std::sqrt(y.squaredNorm() / static_cast<double>(n));
  d.y = y / scale;
  d.y_center = 0.0;
  d.y_scale = 1.0;
  return d;
}

}  // namespace splitreg
