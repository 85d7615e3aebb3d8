// splitreg: fit, cross-validate, predict, and run simulation experiments for
// split regularized regression on CSV data. See README.md for the formats.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "splitreg/artifact.hpp"
#include "splitreg/csv.hpp"
#include "splitreg/ensemble.hpp"
#include "splitreg/experiment_io.hpp"
#include "splitreg/objective.hpp"
#include "splitreg/parallel.hpp"
#include "splitreg/simulate.hpp"
#include "splitreg/solver.hpp"
#include "splitreg/standardize.hpp"
#include "splitreg/tuning.hpp"

namespace {

using namespace splitreg;

std::string format_double(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

struct TrainingData {
  std::string path;
  std::string sha256;
  std::string response_name;
  std::vector<std::string> feature_names;
  Matrix x;
  Vector y;
};

TrainingData load_training_csv(const std::string& path, const std::string& response) {
  const std::string bytes = read_file_bytes(path);
  const CsvTable table = parse_numeric_csv(bytes, path);
  const Index response_col = table.find_column(response);
  if (response_col < 0)
    throw InvalidInput(path + ": response column \"" + response + "\" not found");
  if (table.cols() < 2)
    throw InvalidInput(path + ": need at least one predictor column besides the response");
  if (table.rows() < 2) throw InvalidInput(path + ": need at least 2 rows");

  TrainingData data;
  data.path = path;
  data.sha256 = sha256_hex(bytes);
  data.response_name = response;
  data.x.resize(table.rows(), table.cols() - 1);
  data.y = table.values.col(response_col);
  Index out = 0;
  for (Index j = 0; j < table.cols(); ++j) {
    if (j == response_col) continue;
    data.feature_names.push_back(table.column_names[static_cast<std::size_t>(j)]);
    data.x.col(out++) = table.values.col(j);
  }
  return data;
}

FitArtifact make_artifact(const TrainingData& data, const StandardizedDesign& design,
                          const PenaltySpec& spec, const FitResult& fit_result,
                          std::uint64_t seed) {
  FitArtifact artifact;
  artifact.penalties = spec;
  artifact.response_name = data.response_name;
  artifact.feature_names = data.feature_names;
  artifact.coefficients = destandardize(fit_result.bundle, design);
  artifact.averaged = average_model(artifact.coefficients);
  artifact.x_center = design.col_center;
  artifact.x_scale = design.col_scale;
  artifact.y_center = design.y_center;
  artifact.y_scale = design.y_scale;
  artifact.objective_value = objective(design, fit_result.bundle, spec);
  artifact.converged = fit_result.converged;
  artifact.cycles = fit_result.cycles;
  artifact.ovp = overlap(fit_result.bundle);
  for (Index g = 0; g < fit_result.bundle.num_models(); ++g) {
    int nonzero = 0;
    for (Index j = 0; j < fit_result.bundle.p(); ++j)
      nonzero += fit_result.bundle.beta(j, g) != 0.0;
    artifact.nonzero_per_model.push_back(nonzero);
  }
  artifact.fitted_values = predict(data.x, artifact.averaged);
  artifact.input_file = data.path;
  artifact.input_sha256 = data.sha256;
  artifact.seed = seed;
  return artifact;
}

void print_fit_report(const FitArtifact& artifact) {
  std::cout << "objective " << format_double(artifact.objective_value) << "\n";
  std::cout << "overlap " << format_double(artifact.ovp) << "\n";
  std::cout << "nonzero";
  for (const int count : artifact.nonzero_per_model) std::cout << " " << count;
  std::cout << "\n";
}

int cmd_fit(const std::string& data_path, const std::string& response, double alpha,
            double lambda_s, double lambda_d, int num_models, std::uint64_t seed,
            double tolerance, int max_cycles, const std::string& out_path) {
  const TrainingData data = load_training_csv(data_path, response);
  const StandardizedDesign design = standardize(data.x, data.y);

  PenaltySpec spec;
  spec.alpha = alpha;
  spec.lambda_s = lambda_s;
  spec.lambda_d = lambda_d;
  spec.num_models = num_models;
  spec.validate();

  SolverSettings settings;
  settings.tolerance = tolerance;
  settings.max_cycles = max_cycles;
  const FitResult result = fit(design, spec, settings);
  if (!result.converged)
    std::cerr << "warning: solver stopped at max-cycles=" << max_cycles
              << " before reaching tolerance\n";
  if (result.bundle.beta.isZero(0.0) && alpha > 0.0)
    std::cerr << "warning: all coefficients are zero; lambda-s=" << format_double(lambda_s)
              << " is at or above lambda_s_max="
              << format_double(lambda_s_max(design, alpha)) << " (at lambda-d=0)\n";

  const FitArtifact artifact = make_artifact(data, design, spec, result, seed);
  artifact.save(out_path);
  print_fit_report(artifact);
  return 0;
}

int cmd_cv(const std::string& data_path, const std::string& response, double alpha,
           std::vector<int> candidates, int folds, std::uint64_t seed, int threads_flag,
           double tolerance, int max_cycles, int max_outer, double rel_tol,
           bool no_warm_starts, const std::string& out_path, std::string fit_out_path) {
  const TrainingData data = load_training_csv(data_path, response);
  const StandardizedDesign design = standardize(data.x, data.y);
  if (candidates.empty()) candidates = {2, 5, 7, 10};
  if (fit_out_path.empty()) fit_out_path = out_path + ".fit.json";

  SolverSettings settings;
  settings.tolerance = tolerance;
  settings.max_cycles = max_cycles;
  TuneOptions options;
  options.max_outer_iterations = max_outer;
  options.rel_tol = rel_tol;
  options.warm_starts = !no_warm_starts;
  options.threads = resolve_thread_count(threads_flag);

  const CvPlan plan = make_cv_plan(design.n(), folds, seed);
  const TuningResult result =
      select_num_models(design, candidates, alpha, plan, settings, options);

  for (const TracePoint& point : result.trace)
    std::cout << format_double(point.lambda_s) << " " << format_double(point.lambda_d) << " "
              << result.num_models << " " << format_double(point.cv_mspe) << "\n";
  std::cout << "selected lambda_s=" << format_double(result.lambda_s_opt)
            << " lambda_d=" << format_double(result.lambda_d_opt)
            << " num_models=" << result.num_models
            << " cv_mspe=" << format_double(result.cv_mspe) << "\n";
  if (result.nonconverged_fits > 0)
    std::cerr << "warning: " << result.nonconverged_fits
              << " inner fits stopped at max-cycles before reaching tolerance\n";

  const OrderedJson tuning_json = tuning_to_json(result, alpha, folds, seed, candidates,
                                                 data.path, data.sha256);
  write_text_file(out_path, tuning_json.dump(2) + "\n");

  PenaltySpec spec;
  spec.alpha = alpha;
  spec.lambda_s = result.lambda_s_opt;
  spec.lambda_d = result.lambda_d_opt;
  spec.num_models = result.num_models;
  FitResult final_fit;
  final_fit.bundle = result.bundle;
  final_fit.converged = result.nonconverged_fits == 0;
  final_fit.cycles = 0;
  const FitArtifact artifact = make_artifact(data, design, spec, final_fit, seed);
  artifact.save(fit_out_path);
  return 0;
}

int cmd_predict(const std::string& artifact_path, const std::string& data_path,
                const std::string& out_path) {
  const FitArtifact artifact = FitArtifact::load(artifact_path);
  const CsvTable table = read_numeric_csv(data_path);

  std::vector<std::string> missing, extra;
  std::vector<Index> feature_cols;
  for (const std::string& feature : artifact.feature_names) {
    const Index col = table.find_column(feature);
    if (col < 0)
      missing.push_back(feature);
    else
      feature_cols.push_back(col);
  }
  for (const std::string& column : table.column_names) {
    if (column == artifact.response_name) continue;  // a response column is ignored
    bool known = false;
    for (const std::string& feature : artifact.feature_names)
      if (feature == column) known = true;
    if (!known) extra.push_back(column);
  }
  if (!missing.empty() || !extra.empty()) {
    std::string message = data_path + ": columns do not match the artifact";
    if (!missing.empty()) {
      message += "; missing:";
      for (const std::string& name : missing) message += " " + name;
    }
    if (!extra.empty()) {
      message += "; extra:";
      for (const std::string& name : extra) message += " " + name;
    }
    throw InvalidInput(message);
  }

  Matrix x(table.rows(), static_cast<Index>(feature_cols.size()));
  for (std::size_t j = 0; j < feature_cols.size(); ++j)
    x.col(static_cast<Index>(j)) = table.values.col(feature_cols[j]);
  write_single_column_csv(out_path, "prediction", predict(x, artifact.averaged));
  return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 int threads_flag) {
  const std::string bytes = read_file_bytes(config_path);
  const ExperimentConfig config = parse_experiment_config(bytes, config_path);

  ExperimentOptions options;
  options.folds = config.folds;
  options.threads = resolve_thread_count(threads_flag);

  std::vector<ExperimentRun> runs;
  for (const ScenarioSpec& spec : config.combinations()) {
    ExperimentRun run;
    run.spec = spec;
    run.result = run_experiment(spec, config.methods, config.replications, options);
    runs.push_back(std::move(run));
  }

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  write_text_file((dir / "records.tsv").string(), records_tsv(runs));
  const std::string summary = summary_tsv(runs);
  write_text_file((dir / "summary.tsv").string(), summary);
  const OrderedJson manifest =
      experiment_manifest(config, config_path, sha256_hex(bytes));
  write_text_file((dir / "manifest.json").string(), manifest.dump(2) + "\n");
  std::cout << summary;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Split regularized regression: joint fitting of G linear models under "
               "elastic-net and diversity penalties, with prediction by model averaging"};
  app.require_subcommand(1);

  std::string data_path, out_path, response = "y";
  double alpha = 0.75, lambda_s = 0.0, lambda_d = 0.0;
  int num_models = 1;
  std::uint64_t seed = 0;
  double tolerance = 1e-8;
  int max_cycles = 10000;

  CLI::App* fit_cmd = app.add_subcommand("fit", "Fit at fixed penalties and write a JSON artifact");
  fit_cmd->add_option("data", data_path, "Training CSV (header row required)")->required();
  fit_cmd->add_option("--response", response, "Response column name (default y)");
  fit_cmd->add_option("--alpha", alpha, "Elastic-net mixing weight in (0, 1]");
  fit_cmd->add_option("--lambda-s", lambda_s, "Sparsity penalty")->required();
  fit_cmd->add_option("--lambda-d", lambda_d, "Diversity penalty");
  fit_cmd->add_option("--num-models", num_models, "Number of models fitted jointly");
  fit_cmd->add_option("--seed", seed, "Recorded in the artifact provenance");
  fit_cmd->add_option("--tolerance", tolerance, "Convergence tolerance");
  fit_cmd->add_option("--max-cycles", max_cycles, "Cycle budget");
  fit_cmd->add_option("--out", out_path, "Artifact path")->required();

  std::vector<int> candidates;
  int folds = 10, threads = 0, max_outer = 10;
  double rel_tol = 1e-4;
  bool no_warm_starts = false;
  std::string fit_out_path;

  CLI::App* cv_cmd = app.add_subcommand(
      "cv", "Cross-validate (lambda_s, lambda_d, G) and write tuning + fit artifacts");
  cv_cmd->add_option("data", data_path, "Training CSV (header row required)")->required();
  cv_cmd->add_option("--response", response, "Response column name (default y)");
  cv_cmd->add_option("--alpha", alpha, "Elastic-net mixing weight in (0, 1]");
  cv_cmd->add_option("--candidates", candidates, "Model counts to compare (default 2,5,7,10)")
      ->delimiter(',');
  cv_cmd->add_option("--folds", folds, "Cross-validation folds");
  cv_cmd->add_option("--seed", seed, "Fold-assignment seed");
  cv_cmd->add_option("--threads", threads,
                     "Worker threads (0 = all cores; SPLITREG_THREADS overrides)");
  cv_cmd->add_option("--tolerance", tolerance, "Convergence tolerance");
  cv_cmd->add_option("--max-cycles", max_cycles, "Cycle budget per fit");
  cv_cmd->add_option("--max-outer", max_outer, "Alternating sweep budget");
  cv_cmd->add_option("--rel-tol", rel_tol, "Minimum relative CV improvement to continue");
  cv_cmd->add_flag("--no-warm-starts", no_warm_starts, "Cold-start every grid point");
  cv_cmd->add_option("--out", out_path, "Tuning result path")->required();
  cv_cmd->add_option("--fit-out", fit_out_path,
                     "Fit artifact path (default: <out>.fit.json)");

  std::string artifact_path;
  CLI::App* predict_cmd =
      app.add_subcommand("predict", "Predict with a stored artifact's averaged model");
  predict_cmd->add_option("artifact", artifact_path, "Fit artifact JSON")->required();
  predict_cmd->add_option("data", data_path, "CSV with the artifact's feature columns")
      ->required();
  predict_cmd->add_option("--out", out_path, "Predictions CSV path")->required();

  std::string config_path, out_dir;
  CLI::App* simulate_cmd =
      app.add_subcommand("simulate", "Run a Monte-Carlo experiment from a config file");
  simulate_cmd->add_option("config", config_path, "Experiment config")->required();
  simulate_cmd->add_option("--out-dir", out_dir, "Output directory")->required();
  simulate_cmd->add_option("--threads", threads,
                           "Worker threads (0 = all cores; SPLITREG_THREADS overrides)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit_cmd->parsed())
      return cmd_fit(data_path, response, alpha, lambda_s, lambda_d, num_models, seed,
                     tolerance, max_cycles, out_path);
    if (cv_cmd->parsed())
      return cmd_cv(data_path, response, alpha, candidates, folds, seed, threads, tolerance,
                    max_cycles, max_outer, rel_tol, no_warm_starts, out_path, fit_out_path);
    if (predict_cmd->parsed()) return cmd_predict(artifact_path, data_path, out_path);
    if (simulate_cmd->parsed()) return cmd_simulate(config_path, out_dir, threads);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
