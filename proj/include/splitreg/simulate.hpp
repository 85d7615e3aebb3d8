#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "splitreg/rng.hpp"
#include "splitreg/solver.hpp"
#include "splitreg/tuning.hpp"
#include "splitreg/types.hpp"

namespace splitreg {

/// One synthetic-data configuration: design dimensions, correlation level,
/// fraction of active variables zeta (p0 = floor(p*zeta) of them), and the
/// target signal-to-noise ratio.
struct ScenarioSpec {
  int scenario_id = 1;  // 1, 2, or 3
  Index p = 0;
  Index n = 0;
  double rho = 0.0;   // in [0, 1)
  double zeta = 0.1;  // in (0, 1)
  double snr = 1.0;   // > 0
  std::uint64_t seed = 0;

  Index p0() const;
  void validate() const;
};

/// Everything needed to draw one dataset: a factor F with F F' = Sigma, the
/// true coefficients, and the calibrated noise level.
struct GenerativeModel {
  Matrix sigma_factor;  // p x p
  Vector beta0;         // p
  double sigma = 1.0;   // > 0
};

/// Indices (ascending, 0-based) of the nonzero coordinates of beta0:
/// scenarios 1 and 3 use the leading p0 coordinates; scenario 2 puts
/// floor(p0/2) at the head of the first correlation block and the remaining
/// ceil(p0/2) at the head of the second.
std::vector<Index> active_positions(const ScenarioSpec& spec);

/// Factor F with F F' = Sigma for the scenario's correlation structure:
/// one equicorrelated block (scenario 1), two independent equicorrelated
/// blocks split at floor(p0/2) + ceil((p-p0)/2) (scenario 2), or an
/// equicorrelated leading p0 block with identity elsewhere (scenario 3).
/// Uses the closed-form symmetric root of (1-rho) I + rho 11' per block.
Matrix build_covariance(const ScenarioSpec& spec);

/// Nonzero coordinates drawn as (-1)^u (a + |z|) with u ~ Bernoulli(0.2),
/// z ~ N(0,1) and a = 5 ln(n)/sqrt(n); one (u, z) pair is consumed per
/// active coordinate in ascending index order.
Vector generate_beta0(const ScenarioSpec& spec, Rng& rng);

/// Noise level sqrt(beta0' Sigma beta0 / snr), so that the realized
/// signal-to-noise ratio is exactly `snr`. Throws when beta0' Sigma beta0
/// is not positive.
double sigma_from_snr(const Vector& beta0, const Matrix& sigma_factor, double snr);

struct Dataset {
  Matrix x;  // n x p
  Vector y;  // n
};

/// Draws rows x_i = F g_i with g_i standard normal, then y = x beta0 + sigma
/// per-row noise. All n*p predictor normals are consumed row by row before
/// the n noise normals.
Dataset sample_dataset(const GenerativeModel& model, Index n, Rng& rng);

/// Mean squared prediction error divided by the noise variance; 1 is the
/// best achievable value in expectation.
double mspe(const Vector& predictions, const Vector& y_test, double sigma);

/// One estimator entry in an experiment: a label for the output tables, the
/// number of models fitted jointly, and the elastic-net mixing weight.
struct MethodConfig {
  std::string label;
  int num_models = 1;
  double alpha = 0.75;
};

struct ExperimentOptions {
  int folds = 10;
  int threads = 1;  // replications evaluated concurrently
  SolverSettings solver;
  TuneOptions tuning;
};

/// Outcome of one (replication, method) cell. `precision`/`recall` are empty
/// when undefined (nothing selected / no true signal); `failed` marks cells
/// whose fit raised an error, with the message preserved.
struct ReplicationRecord {
  int replication = 0;
  std::string method;
  double mspe_over_sigma2 = 0.0;
  std::optional<double> precision;
  std::optional<double> recall;
  double ovp = 0.0;
  double lambda_s = 0.0;
  double lambda_d = 0.0;
  int num_models = 1;
  double wall_seconds = 0.0;  // timing only; excluded from determinism guarantees
  bool failed = false;
  std::string error;
};

/// Per-method means with standard errors (sample sd / sqrt(count)).
/// Precision/recall aggregate only the records where they are defined; a
/// mean over zero values is NaN.
struct MethodSummary {
  std::string method;
  int successes = 0;
  double mean_mspe = 0.0, se_mspe = 0.0;
  double mean_precision = 0.0, se_precision = 0.0;
  double mean_recall = 0.0, se_recall = 0.0;
  double mean_ovp = 0.0, se_ovp = 0.0;
  double mean_seconds = 0.0;
};

struct ExperimentResult {
  ScenarioSpec scenario;
  std::vector<ReplicationRecord> records;  // replication-major, methods in input order
  std::vector<MethodSummary> summaries;    // one per method, derived from records
};

/// Recomputes the per-method summaries from the records; `method_order`
/// fixes the output ordering.
std::vector<MethodSummary> summarize(const std::vector<ReplicationRecord>& records,
                                     const std::vector<std::string>& method_order);

/// Monte-Carlo driver. Per replication r: an RNG stream derived from
/// (seed, r) draws beta0, the training copy, and an independent test copy;
/// every method is tuned by CV on the training copy (all methods share the
/// same data and fold assignment) and scored on the test copy. Replications
/// may run concurrently; results are identical to serial execution. A
/// failing method marks only its own record for that replication.
ExperimentResult run_experiment(const ScenarioSpec& spec,
                                const std::vector<MethodConfig>& methods, int replications,
                                const ExperimentOptions& options = {});

}  // namespace splitreg
