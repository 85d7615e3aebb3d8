#include "splitreg/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "splitreg/ensemble.hpp"
#include "splitreg/parallel.hpp"
#include "splitreg/rng.hpp"
#include "splitreg/solver.hpp"
#include "splitreg/standardize.hpp"

namespace splitreg {

void CvPlan::validate() const {
  if (num_folds < 2) throw InvalidInput("CvPlan: need at least 2 folds");
  if (fold_assignment.empty()) throw InvalidInput("CvPlan: empty fold assignment");
  std::vector<Index> sizes(static_cast<std::size_t>(num_folds), 0);
  for (const int f : fold_assignment) {
    if (f < 0 || f >= num_folds)
      throw InvalidInput("CvPlan: fold id " + std::to_string(f) + " out of range");
    ++sizes[static_cast<std::size_t>(f)];
  }
  const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
  if (*lo == 0) throw InvalidInput("CvPlan: a fold is empty");
  if (*hi - *lo > 1) throw InvalidInput("CvPlan: fold sizes differ by more than 1");
}

CvPlan make_cv_plan(Index n, int num_folds, std::uint64_t seed) {
  if (num_folds < 2) throw InvalidInput("make_cv_plan: need at least 2 folds");
  if (n < static_cast<Index>(num_folds))
    throw InvalidInput("make_cv_plan: more folds than observations");
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(seed);
  rng.shuffle(order);
  CvPlan plan;
  plan.num_folds = num_folds;
  plan.seed = seed;
  plan.fold_assignment.assign(static_cast<std::size_t>(n), 0);
  for (std::size_t i = 0; i < order.size(); ++i)
    plan.fold_assignment[static_cast<std::size_t>(order[i])] =
        static_cast<int>(i % static_cast<std::size_t>(num_folds));
  plan.validate();
  return plan;
}

void TuneOptions::validate() const {
  if (max_outer_iterations < 1)
    throw InvalidInput("TuneOptions: max_outer_iterations must be >= 1");
  if (!(rel_tol >= 0.0)) throw InvalidInput("TuneOptions: rel_tol must be >= 0");
  if (threads < 1) throw InvalidInput("TuneOptions: threads must be >= 1");
}

PenaltyGrid build_grid(double max_value, Index p, Index n, bool include_zero) {
  if (!(max_value > 0.0)) throw InvalidInput("build_grid: max_value must be > 0");
  PenaltyGrid grid;
  grid.max_value = max_value;
  grid.epsilon = p < n ? 1e-4 : 1e-2;
  grid.includes_zero = include_zero;
  constexpr int kPoints = 100;
  grid.values.reserve(static_cast<std::size_t>(kPoints) + (include_zero ? 1 : 0));
  for (int k = 0; k < kPoints; ++k)
    grid.values.push_back(max_value * std::pow(grid.epsilon, static_cast<double>(k) / (kPoints - 1)));
  if (include_zero) grid.values.push_back(0.0);
  return grid;
}

double lambda_s_max(const StandardizedDesign& design, double alpha, double lambda_d,
                    int num_models, const SolverSettings& settings) {
  if (!(alpha > 0.0))
    throw InvalidInput("lambda_s_max: alpha must be > 0 (the l1 threshold vanishes at 0)");
  if (!(lambda_d >= 0.0)) throw InvalidInput("lambda_s_max: lambda_d must be >= 0");
  const Index n = design.n();
  if (n == 0 || design.p() == 0) throw InvalidInput("lambda_s_max: empty design");

  // Largest |(1/n) x_j . y|, written with the same 1/n factor the solver uses
  // so the null-model threshold comparison below is reproduced bit for bit.
  const double inv_n = 1.0 / static_cast<double>(n);
  double max_corr = 0.0;
  for (Index j = 0; j < design.p(); ++j)
    max_corr = std::max(max_corr, std::abs(inv_n * design.x.col(j).dot(design.y)));
  if (max_corr == 0.0)
    throw InvalidInput("lambda_s_max: the response is uncorrelated with every predictor");

  // Smallest value whose solver threshold alpha*lambda_s clears every
  // correlation; nudged up by at most a few ulps to absorb the rounding of
  // the division so the fit at the returned value is exactly null.
  double value = max_corr / alpha;
  while (alpha * value < max_corr) value = std::nextafter(value, std::numeric_limits<double>::infinity());
  if (lambda_d == 0.0) return value;

  // For positive diversity penalties the boundary is located by fitting down
  // a grid and returning the smallest value that still yields a null bundle.
  PenaltySpec probe;
  probe.alpha = alpha;
  probe.lambda_d = lambda_d;
  probe.num_models = num_models;
  probe.validate();
  const PenaltyGrid grid = build_grid(value, design.p(), n, false);
  double last_null = grid.values.front();
  for (const double candidate : grid.values) {
    probe.lambda_s = candidate;
    const FitResult result = fit(design, probe, settings);
    if (!result.bundle.beta.isZero(0.0)) return last_null;
    last_null = candidate;
  }
  return last_null;
}

double lambda_d_max(const StandardizedDesign& design, const PenaltySpec& spec,
                    const SolverSettings& settings) {
  PenaltySpec base = spec;
  base.lambda_d = 0.0;
  base.validate();
  settings.validate();
  if (base.num_models == 1) return 0.0;

  const FitResult at_zero = fit(design, base, settings);
  if (at_zero.bundle.beta.isZero(0.0))
    throw InvalidInput("lambda_d_max: the fit at lambda_d = 0 is already null; "
                       "decrease lambda_s first");

  auto disjoint_at = [&](double lambda_d) {
    PenaltySpec candidate = base;
    candidate.lambda_d = lambda_d;
    return supports_disjoint(fit(design, candidate, settings).bundle);
  };

  // Geometric bracket: double upward from the lambda_s scale until the
  // supports come apart, keeping the last value where they still overlapped.
  double hi = std::max(base.lambda_s, 1.0 / 1024.0);
  double lo = 0.0;
  int doublings = 0;
  while (!disjoint_at(hi)) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 60)
      throw InvalidInput("lambda_d_max: no diversity level yields disjoint supports");
  }

  // 20-point refinement of (lo, hi]; the last point is hi itself, which is
  // known disjoint, so the scan always returns.
  constexpr int kRefine = 20;
  for (int k = 1; k <= kRefine; ++k) {
    double point;
    if (lo > 0.0)
      point = lo * std::pow(hi / lo, static_cast<double>(k) / kRefine);
    else
      point = hi * static_cast<double>(k) / kRefine;
    if (k == kRefine) point = hi;
    if (disjoint_at(point)) return point;
  }
  return hi;
}

namespace {

struct FoldSplit {
  Matrix x_train, x_test;
  Vector y_train, y_test;
};

FoldSplit split_fold(const StandardizedDesign& design, const CvPlan& plan, int fold) {
  const Index n = design.n();
  Index n_test = 0;
  for (const int f : plan.fold_assignment) n_test += (f == fold);
  const Index n_train = n - n_test;
  if (n_train < 2)
    throw InvalidInput("cv fold " + std::to_string(fold) +
                       ": training split needs at least 2 observations");
  FoldSplit split;
  split.x_train.resize(n_train, design.p());
  split.y_train.resize(n_train);
  split.x_test.resize(n_test, design.p());
  split.y_test.resize(n_test);
  Index it = 0, iv = 0;
  for (Index i = 0; i < n; ++i) {
    if (plan.fold_assignment[static_cast<std::size_t>(i)] == fold) {
      split.x_test.row(iv) = design.x.row(i);
      split.y_test[iv++] = design.y[i];
    } else {
      split.x_train.row(it) = design.x.row(i);
      split.y_train[it++] = design.y[i];
    }
  }
  return split;
}

/// Held-out SSE of the averaged model for every spec in `chain`, evaluated on
/// one fold. Each fit warm starts from the previous chain solution when
/// enabled; all chain entries must share num_models.
std::vector<double> fold_sse_chain(const StandardizedDesign& design, const CvPlan& plan,
                                   int fold, const std::vector<PenaltySpec>& chain,
                                   const SolverSettings& settings, bool warm_starts,
                                   int& nonconverged) {
  const FoldSplit split = split_fold(design, plan, fold);
  StandardizedDesign train;
  try {
    train = standardize(split.x_train, split.y_train);
  } catch (const InvalidInput& e) {
    throw InvalidInput("cv fold " + std::to_string(fold) + ": " + e.what());
  }

  SolverSettings local = settings;
  local.record_objective = false;
  local.initial_bundle.reset();
  std::vector<double> sse;
  sse.reserve(chain.size());
  for (const PenaltySpec& spec : chain) {
    const FitResult result = fit(train, spec, local);
    if (!result.converged) ++nonconverged;
    if (warm_starts) local.initial_bundle = result.bundle;
    const AveragedModel model = average_model(destandardize(result.bundle, train));
    sse.push_back((predict(split.x_test, model) - split.y_test).squaredNorm());
  }
  return sse;
}

/// CV MSPE for every spec in `chain`: per-fold SSE paths evaluated (possibly
/// concurrently), then reduced in fold order so the result is independent of
/// scheduling. When `full_fits` is given, a full-data chain is fitted with the
/// same warm-start discipline as the folds and its bundles are stored per grid
/// point; for the non-convex objective this keeps the candidate models in the
/// same local minima the CV scores were computed from.
std::vector<double> cv_chain(const StandardizedDesign& design, const CvPlan& plan,
                             const std::vector<PenaltySpec>& chain,
                             const SolverSettings& settings, bool warm_starts, int threads,
                             int& nonconverged,
                             std::vector<CoefficientBundle>* full_fits = nullptr) {
  const std::size_t folds = static_cast<std::size_t>(plan.num_folds);
  std::vector<std::vector<double>> sse(folds);
  std::vector<int> bad(folds + 1, 0);
  if (full_fits) full_fits->assign(chain.size(), CoefficientBundle{});
  const Index tasks = static_cast<Index>(folds) + (full_fits ? 1 : 0);
  parallel_for(tasks, threads, [&](Index f) {
    if (static_cast<std::size_t>(f) < folds) {
      sse[static_cast<std::size_t>(f)] =
          fold_sse_chain(design, plan, static_cast<int>(f), chain, settings, warm_starts,
                         bad[static_cast<std::size_t>(f)]);
      return;
    }
    SolverSettings local = settings;
    local.record_objective = false;
    local.initial_bundle.reset();
    for (std::size_t k = 0; k < chain.size(); ++k) {
      const FitResult result = fit(design, chain[k], local);
      if (!result.converged) ++bad[folds];
      if (warm_starts) local.initial_bundle = result.bundle;
      (*full_fits)[k] = result.bundle;
    }
  });
  std::vector<double> mspe(chain.size(), 0.0);
  for (std::size_t f = 0; f < folds; ++f)
    for (std::size_t k = 0; k < chain.size(); ++k) mspe[k] += sse[f][k];
  const double inv_n = 1.0 / static_cast<double>(design.n());
  for (double& v : mspe) v *= inv_n;
  for (const int b : bad) nonconverged += b;
  return mspe;
}

}  // namespace

double cv_mspe(const StandardizedDesign& design, const PenaltySpec& spec, const CvPlan& plan,
               const SolverSettings& settings, int threads) {
  spec.validate();
  settings.validate();
  plan.validate();
  if (plan.n() != design.n())
    throw InvalidInput("cv_mspe: fold assignment length does not match the design");
  if (threads < 1) throw InvalidInput("cv_mspe: threads must be >= 1");
  int nonconverged = 0;
  return cv_chain(design, plan, {spec}, settings, false, threads, nonconverged).front();
}

TuningResult tune(const StandardizedDesign& design, double alpha, int num_models,
                  const CvPlan& plan, const SolverSettings& settings,
                  const TuneOptions& options) {
  PenaltySpec shape;
  shape.alpha = alpha;
  shape.num_models = num_models;
  shape.validate();
  settings.validate();
  options.validate();
  plan.validate();
  if (plan.n() != design.n())
    throw InvalidInput("tune: fold assignment length does not match the design");

  TuningResult result;
  result.num_models = num_models;

  // Runs one grid sweep (fixed chain of penalty specs), appends every
  // evaluation to the trace, and returns the index of the sweep minimum.
  // The incumbent bundle follows the overall best CV value (strict decrease,
  // so the first occurrence wins) and is taken from the full-data warm chain
  // rather than a cold refit: a cold restart can settle in a different local
  // minimum than the one the winning CV score was measured on.
  double incumbent_cv = std::numeric_limits<double>::infinity();
  auto sweep = [&](const std::vector<PenaltySpec>& chain) {
    std::vector<CoefficientBundle> full_fits;
    const std::vector<double> mspe = cv_chain(design, plan, chain, settings,
                                              options.warm_starts, options.threads,
                                              result.nonconverged_fits, &full_fits);
    std::size_t arg = 0;
    for (std::size_t k = 0; k < chain.size(); ++k) {
      result.trace.push_back({chain[k].lambda_s, chain[k].lambda_d, mspe[k]});
      if (mspe[k] < mspe[arg]) arg = k;
      if (mspe[k] < incumbent_cv) {
        incumbent_cv = mspe[k];
        result.bundle = std::move(full_fits[k]);
      }
    }
    return arg;
  };

  double lambda_d_opt = 0.0;
  double previous_best = std::numeric_limits<double>::infinity();
  for (int outer = 1; outer <= options.max_outer_iterations; ++outer) {
    result.outer_iterations = outer;

    const double ls_max = lambda_s_max(design, alpha, lambda_d_opt, num_models, settings);
    const PenaltyGrid ls_grid = build_grid(ls_max, design.p(), design.n(), false);
    std::vector<PenaltySpec> chain;
    chain.reserve(ls_grid.values.size());
    for (const double v : ls_grid.values) {
      PenaltySpec spec = shape;
      spec.lambda_s = v;
      spec.lambda_d = lambda_d_opt;
      chain.push_back(spec);
    }
    const double lambda_s_opt = ls_grid.values[sweep(chain)];

    if (num_models > 1) {
      PenaltySpec at_opt = shape;
      at_opt.lambda_s = lambda_s_opt;
      // A null fit at the chosen lambda_s (pure-noise data) leaves nothing to
      // diversify; the lambda_d dimension is skipped for this iteration.
      if (!fit(design, at_opt, settings).bundle.beta.isZero(0.0)) {
        const double ld_max = lambda_d_max(design, at_opt, settings);
        const PenaltyGrid ld_grid = build_grid(ld_max, design.p(), design.n(), true);
        chain.clear();
        chain.reserve(ld_grid.values.size());
        for (const double v : ld_grid.values) {
          PenaltySpec spec = shape;
          spec.lambda_s = lambda_s_opt;
          spec.lambda_d = v;
          chain.push_back(spec);
        }
        lambda_d_opt = ld_grid.values[sweep(chain)];
      }
    }

    double best = std::numeric_limits<double>::infinity();
    for (const TracePoint& point : result.trace) best = std::min(best, point.cv_mspe);
    if (num_models == 1) break;  // no second dimension to alternate over
    if (previous_best - best <= options.rel_tol * previous_best) break;
    previous_best = best;
  }

  // The reported optimum is the overall trace minimum (first occurrence); the
  // bundle already holds that point's full-data warm-chain fit.
  std::size_t arg = 0;
  for (std::size_t k = 1; k < result.trace.size(); ++k)
    if (result.trace[k].cv_mspe < result.trace[arg].cv_mspe) arg = k;
  result.lambda_s_opt = result.trace[arg].lambda_s;
  result.lambda_d_opt = result.trace[arg].lambda_d;
  result.cv_mspe = result.trace[arg].cv_mspe;
  return result;
}

TuningResult select_num_models(const StandardizedDesign& design,
                               const std::vector<int>& candidates, double alpha,
                               const CvPlan& plan, const SolverSettings& settings,
                               const TuneOptions& options) {
  if (candidates.empty()) throw InvalidInput("select_num_models: no candidates");
  std::vector<int> order = candidates;
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());
  if (order.front() < 1)
    throw InvalidInput("select_num_models: candidates must be >= 1");

  std::optional<TuningResult> best;
  std::exception_ptr first_error;
  for (const int g : order) {
    try {
      TuningResult candidate = tune(design, alpha, g, plan, settings, options);
      if (!best || candidate.cv_mspe < best->cv_mspe) best = std::move(candidate);
    } catch (...) {
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (!best) std::rethrow_exception(first_error);
  return *best;
}

}  // namespace splitreg
