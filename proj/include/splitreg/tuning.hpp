#pragma once

#include <cstdint>
#include <vector>

#include "splitreg/types.hpp"

namespace splitreg {

/// Descending penalty grid. The non-zero values are log-equispaced between
/// epsilon*max_value and max_value; when includes_zero is set a trailing 0 is
/// appended (used for the lambda_d grid so the no-diversity elastic net stays
/// a candidate).
struct PenaltyGrid {
  std::vector<double> values;
  double max_value = 0.0;
  double epsilon = 0.0;
  bool includes_zero = false;
};

/// Assignment of the n observations to cross-validation folds, reproducible
/// from the seed. Fold sizes differ by at most one.
struct CvPlan {
  int num_folds = 10;
  std::vector<int> fold_assignment;  // length n, values in [0, num_folds)
  std::uint64_t seed = 0;

  Index n() const { return static_cast<Index>(fold_assignment.size()); }
  void validate() const;
};

/// Shuffles 0..n-1 with the seeded generator and deals indices round-robin
/// into num_folds folds.
CvPlan make_cv_plan(Index n, int num_folds, std::uint64_t seed);

/// One cross-validation evaluation visited during tuning.
struct TracePoint {
  double lambda_s = 0.0;
  double lambda_d = 0.0;
  double cv_mspe = 0.0;
};

struct TuningResult {
  double lambda_s_opt = 0.0;
  double lambda_d_opt = 0.0;
  int num_models = 1;
  double cv_mspe = 0.0;
  CoefficientBundle bundle;       // full-data fit at the optimum, from the warm chain
  std::vector<TracePoint> trace;  // every (lambda_s, lambda_d) evaluated, in visit order
  int nonconverged_fits = 0;      // inner fits that hit max_cycles
  int outer_iterations = 0;
};

struct TuneOptions {
  int max_outer_iterations = 10;
  double rel_tol = 1e-4;   // minimum relative CV-MSPE decrease to keep alternating
  bool warm_starts = true; // carry each fold's solution down the grid
  int threads = 1;         // folds evaluated concurrently

  void validate() const;
};

/// Smallest sparsity penalty that makes every model null. At lambda_d = 0
/// this is the closed form (1/(n*alpha)) max_j |sum_i x_ij y_i|; for
/// lambda_d > 0 it is located by fitting along a descending grid (probe fits
/// use `num_models` models). Requires alpha > 0.
double lambda_s_max(const StandardizedDesign& design, double alpha, double lambda_d = 0.0,
                    int num_models = 2, const SolverSettings& settings = {});

/// Smallest diversity penalty at which the fit under `spec` (its lambda_d
/// field is ignored) has pairwise disjoint supports, located by geometric
/// bracketing plus a 20-point refinement. Returns 0 when spec.num_models is
/// 1. Throws InvalidInput when the fit at lambda_d = 0 is already null.
double lambda_d_max(const StandardizedDesign& design, const PenaltySpec& spec,
                    const SolverSettings& settings = {});

/// 100 log-equispaced points descending from max_value to epsilon*max_value,
/// with epsilon = 1e-4 when p < n and 1e-2 otherwise; zero appended when
/// include_zero. Requires max_value > 0.
PenaltyGrid build_grid(double max_value, Index p, Index n, bool include_zero);

/// K-fold CV estimate of the mean squared prediction error of the averaged
/// model at a single penalty configuration. Each fold is re-standardized on
/// its training rows; held-out predictions are made in the units of `design`
/// through the destandardized averaged model. Returns the mean squared error
/// over all n held-out predictions.
double cv_mspe(const StandardizedDesign& design, const PenaltySpec& spec, const CvPlan& plan,
               const SolverSettings& settings = {}, int threads = 1);

/// Alternating grid search: starting from lambda_d = 0, sweep the lambda_s
/// grid (largest to smallest, warm-started per fold), fix its CV minimizer,
/// rebuild the lambda_d grid at that lambda_s and sweep it, and repeat until
/// the best CV MSPE stops decreasing by more than rel_tol. The reported
/// optimum is the overall trace minimum; the pure elastic net (lambda_d = 0)
/// is always among the candidates. The returned bundle is the full-data fit
/// produced at the optimum by a warm chain mirroring the fold chains, so for
/// the non-convex objective it sits in the local minimum the winning CV
/// score was measured on (a cold refit can land in a different one).
TuningResult tune(const StandardizedDesign& design, double alpha, int num_models,
                  const CvPlan& plan, const SolverSettings& settings = {},
                  const TuneOptions& options = {});

/// Runs tune once per candidate number of models and keeps the result with
/// the smallest CV MSPE; ties break toward fewer models. A candidate may
/// fail only if another succeeds; if all fail the first error is rethrown.
TuningResult select_num_models(const StandardizedDesign& design,
                               const std::vector<int>& candidates, double alpha,
                               const CvPlan& plan, const SolverSettings& settings = {},
                               const TuneOptions& options = {});

}  // namespace splitreg
