#include "splitreg/solver.hpp"

#include <cmath>

#include "splitreg/objective.hpp"

namespace splitreg {

SolverState::SolverState(const StandardizedDesign& design, const PenaltySpec& spec,
                         Matrix beta_init)
    : design_(design),
      spec_(spec),
      beta_(std::move(beta_init)),
      inv_n_(1.0 / static_cast<double>(design.n())),
      ridge_denominator_(1.0 + (1.0 - spec.alpha) * spec.lambda_s) {
  spec_.validate();
  if (beta_.rows() != design.p() || beta_.cols() != spec_.num_models)
    throw InvalidInput("SolverState: initial bundle has wrong dimensions");
  residuals_.reserve(static_cast<std::size_t>(spec_.num_models));
  for (Index g = 0; g < spec_.num_models; ++g) {
    if (beta_.col(g).isZero(0.0))
      residuals_.push_back(design.y);
    else
      residuals_.push_back(design.y - design.x * beta_.col(g));
  }
  row_abs_sum_ = beta_.cwiseAbs().rowwise().sum();
}

double SolverState::partial_correlation(Index j, Index g) const {
  // (1/n) x_j . (y - X beta^g) + beta_j^g, using (1/n)||x_j||^2 = 1.
  return inv_n_ * design_.x.col(j).dot(residuals_[static_cast<std::size_t>(g)]) + beta_(j, g);
}

double SolverState::l1_weight(Index j, Index g) const {
  return spec_.alpha * spec_.lambda_s +
         spec_.lambda_d * (row_abs_sum_[j] - std::abs(beta_(j, g)));
}

double SolverState::update(Index j, Index g) {
  const double old_value = beta_(j, g);
  const double z = inv_n_ * design_.x.col(j).dot(residuals_[static_cast<std::size_t>(g)]) + old_value;
  const double new_value = soft_threshold(z, l1_weight(j, g)) / ridge_denominator_;
  if (new_value != old_value) {
    residuals_[static_cast<std::size_t>(g)] -= design_.x.col(j) * (new_value - old_value);
    row_abs_sum_[j] += std::abs(new_value) - std::abs(old_value);
    beta_(j, g) = new_value;
  }
  return new_value;
}

void SolverState::cycle() {
  for (Index g = 0; g < spec_.num_models; ++g)
    for (Index j = 0; j < design_.p(); ++j) update(j, g);
}

FitResult fit(const StandardizedDesign& design, const PenaltySpec& spec,
              const SolverSettings& settings) {
  spec.validate();
  settings.validate();

  Matrix beta_init;
  if (settings.initial_bundle) {
    settings.initial_bundle->validate(design.p(), spec.num_models);
    beta_init = settings.initial_bundle->beta;
  } else {
    beta_init = Matrix::Zero(design.p(), spec.num_models);
  }

  SolverState state(design, spec, std::move(beta_init));
  FitResult result;
  if (settings.record_objective)
    result.objective_trace.push_back(
        objective(design, CoefficientBundle{state.beta(), true}, spec));

  Vector previous_means = state.row_means();
  for (int cycle = 1; cycle <= settings.max_cycles; ++cycle) {
    state.cycle();
    const Vector means = state.row_means();
    const double max_sq_change = (means - previous_means).array().square().maxCoeff();
    if (settings.record_objective)
      result.objective_trace.push_back(
          objective(design, CoefficientBundle{state.beta(), true}, spec));
    result.cycles = cycle;
    if (max_sq_change < settings.tolerance) {
      result.converged = true;
      break;
    }
    previous_means = means;
  }
  result.bundle = CoefficientBundle{state.beta(), true};
  return result;
}

}  // namespace splitreg
