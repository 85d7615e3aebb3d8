#pragma once

#include <vector>

#include "splitreg/types.hpp"

namespace splitreg {

/// Mutable state of one coordinate-descent run: the coefficient bundle plus
/// per-model residual vectors kept incrementally so each coordinate update
/// costs O(n). Exposed so tests can instrument single updates.
class SolverState {
 public:
  SolverState(const StandardizedDesign& design, const PenaltySpec& spec, Matrix beta_init);

  /// Partial correlation (1/n) sum_i x_ij (y_i - yhat_i^{(-j),g}), i.e. the
  /// correlation of column j with the model-g residual that excludes the
  /// contribution of variable j itself.
  double partial_correlation(Index j, Index g) const;

  /// The l1 shrinkage applied to coordinate (j, g):
  /// alpha*lambda_s + lambda_d * sum_{h != g} |beta_j^h|.
  double l1_weight(Index j, Index g) const;

  /// One coordinate-descent update of beta_j^g; keeps residuals and row
  /// absolute sums consistent. Returns the new coefficient.
  double update(Index j, Index g);

  /// One full cycle: all coordinates of model 1, then model 2, ... model G.
  void cycle();

  /// Row means (1/G) sum_g beta_j^g, the quantity the convergence criterion
  /// tracks between cycles.
  Vector row_means() const { return beta_.rowwise().mean(); }

  const Matrix& beta() const { return beta_; }
  const Vector& residual(Index g) const { return residuals_[static_cast<std::size_t>(g)]; }

 private:
  const StandardizedDesign& design_;
  PenaltySpec spec_;
  Matrix beta_;                     // p x G
  std::vector<Vector> residuals_;  // per model, y - X beta^g
  Vector row_abs_sum_;             // sum_h |beta_j^h| per feature
  double inv_n_;
  double ridge_denominator_;       // 1 + (1-alpha) lambda_s
};

struct FitResult {
  CoefficientBundle bundle;
  bool converged = false;
  int cycles = 0;
  /// Objective value after each full cycle; filled only when
  /// SolverSettings::record_objective is set.
  std::vector<double> objective_trace;
};

/// Minimizes the split regression objective by cyclic coordinate descent:
/// coordinates of model 1, then model 2, ..., then model G, repeated until
/// max_j (mean coefficient change per feature)^2 < tolerance. Starts from
/// all zeros unless settings carry an initial bundle. When max_cycles is
/// exhausted the best (last) iterate is returned with converged = false.
FitResult fit(const StandardizedDesign& design, const PenaltySpec& spec,
              const SolverSettings& settings = {});

}  // namespace splitreg
