#pragma once

#include <string>
#include <vector>

#include "splitreg/artifact.hpp"
#include "splitreg/simulate.hpp"

namespace splitreg {

/// Parsed experiment description: one scenario shape with grids over
/// (rho, zeta, snr); an experiment is run per grid combination, all sharing
/// the same seed, replication count, and method list.
struct ExperimentConfig {
  int scenario = 1;
  Index p = 0;
  Index n = 0;
  std::vector<double> rho, zeta, snr;  // each non-empty
  int replications = 0;
  std::uint64_t seed = 0;
  int folds = 10;
  double default_alpha = 0.75;  // for method entries without their own alpha
  std::vector<MethodConfig> methods;

  /// All (rho, zeta, snr) combinations as concrete scenario specs, varying
  /// snr fastest, then zeta, then rho.
  std::vector<ScenarioSpec> combinations() const;
};

/// Parses `key = value` lines ('#' starts a comment). Keys: scenario, p, n,
/// rho, zeta, snr (the last three accept comma-separated lists),
/// replications, seed, folds, alpha, and methods (entries "label:G" or
/// "label:G:alpha", comma separated). Unknown, duplicate, or missing
/// required keys raise an error naming the key; value errors name the line.
ExperimentConfig parse_experiment_config(const std::string& contents,
                                         const std::string& name);

/// One grid combination together with its Monte-Carlo outcome.
struct ExperimentRun {
  ScenarioSpec spec;
  ExperimentResult result;
};

/// Tab-separated per-replication records across all runs. The `seconds`
/// column is wall-clock timing and is the only field not reproducible
/// byte-for-byte across machines.
std::string records_tsv(const std::vector<ExperimentRun>& runs);

/// Tab-separated per-method summary rows across all runs.
std::string summary_tsv(const std::vector<ExperimentRun>& runs);

/// Machine-readable description of a simulate invocation: seed, config
/// digest, grid size, and output file names.
OrderedJson experiment_manifest(const ExperimentConfig& config,
                                const std::string& config_file,
                                const std::string& config_sha256);

}  // namespace splitreg
