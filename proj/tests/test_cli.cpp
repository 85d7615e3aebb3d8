#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "splitreg/artifact.hpp"
#include "splitreg/csv.hpp"
#include "splitreg/rng.hpp"

using namespace splitreg;

#ifndef SPLITREG_CLI_PATH
#error "SPLITREG_CLI_PATH must point at the command-line binary"
#endif

namespace {

namespace fs = std::filesystem;

fs::path work_dir() {
  const fs::path dir = fs::temp_directory_path() / "splitreg_cli_tests";
  fs::create_directories(dir);
  return dir;
}

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

/// Runs the CLI with the given arguments, capturing exit code and streams.
RunResult run_cli(const std::string& args) {
  const fs::path out = work_dir() / "stdout.txt";
  const fs::path err = work_dir() / "stderr.txt";
  const std::string command = std::string(SPLITREG_CLI_PATH) + " " + args + " > " +
                              out.string() + " 2> " + err.string();
  const int status = std::system(command.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out);
  result.err = slurp(err);
  return result;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

/// Writes an n x (p+1) training table with a linear signal in the first two
/// features. Column order: x1..xp then the response.
fs::path write_training_csv(const std::string& leaf, Index n = 40, Index p = 6,
                            std::uint64_t seed = 5) {
  Rng rng(seed);
  std::ostringstream text;
  for (Index j = 0; j < p; ++j) text << "x" << (j + 1) << ",";
  text << "y\n";
  char cell[64];
  for (Index i = 0; i < n; ++i) {
    double signal = 0.0;
    for (Index j = 0; j < p; ++j) {
      const double v = rng.normal();
      if (j == 0) signal += 2.0 * v;
      if (j == 1) signal -= 1.5 * v;
      std::snprintf(cell, sizeof(cell), "%.17g", v);
      text << cell << ",";
    }
    std::snprintf(cell, sizeof(cell), "%.17g", signal + 0.5 * rng.normal());
    text << cell << "\n";
  }
  const fs::path path = work_dir() / leaf;
  std::ofstream(path, std::ios::binary) << text.str();
  return path;
}

/// Blanks the wall-clock column of a records table so byte comparisons see
/// only the reproducible fields.
std::string mask_seconds(const std::string& tsv) {
  std::istringstream stream(tsv);
  std::ostringstream out;
  std::string line;
  while (std::getline(stream, line)) {
    std::istringstream fields(line);
    std::string field;
    int index = 0;
    while (std::getline(fields, field, '\t')) {
      if (index > 0) out << '\t';
      out << (index == 15 ? std::string("-") : field);
      ++index;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace

TEST_CASE("fit writes an artifact and reports the fit") {
  const fs::path data = write_training_csv("train.csv");
  const fs::path artifact_path = work_dir() / "fit.json";
  const RunResult run = run_cli("fit " + data.string() +
                                " --lambda-s 0.05 --lambda-d 0.01 --num-models 3 --out " +
                                artifact_path.string());
  REQUIRE(run.exit_code == 0);
  CHECK(contains(run.out, "objective"));

  const FitArtifact artifact = FitArtifact::load(artifact_path.string());
  CHECK(artifact.penalties.num_models == 3);
  CHECK(artifact.feature_names.size() == 6);
  CHECK(artifact.response_name == "y");
  CHECK(artifact.converged);
  CHECK(artifact.fitted_values.size() == 40);
  CHECK(artifact.input_sha256 == sha256_hex(read_file_bytes(data.string())));
}

TEST_CASE("fit without diversity persists identical model columns") {
  const fs::path data = write_training_csv("train_identical.csv");
  const fs::path artifact_path = work_dir() / "identical.json";
  const RunResult run = run_cli("fit " + data.string() +
                                " --lambda-s 0.05 --num-models 3 --out " +
                                artifact_path.string());
  REQUIRE(run.exit_code == 0);
  const FitArtifact artifact = FitArtifact::load(artifact_path.string());
  REQUIRE(artifact.coefficients.beta.cols() == 3);
  for (Index g = 1; g < 3; ++g)
    CHECK((artifact.coefficients.beta.col(g).array() ==
           artifact.coefficients.beta.col(0).array()).all());
}

TEST_CASE("fit warns when the sparsity penalty nulls every model") {
  const fs::path data = write_training_csv("train_null.csv");
  const fs::path artifact_path = work_dir() / "null.json";
  const RunResult run = run_cli("fit " + data.string() + " --lambda-s 1e6 --out " +
                                artifact_path.string());
  REQUIRE(run.exit_code == 0);
  CHECK(contains(run.err, "zero"));
  const FitArtifact artifact = FitArtifact::load(artifact_path.string());
  CHECK(artifact.averaged.beta.isZero(0.0));
  CHECK(artifact.ovp == 0.0);
}

TEST_CASE("predict reproduces the stored fitted values") {
  const fs::path data = write_training_csv("train_predict.csv");
  const fs::path artifact_path = work_dir() / "predict_fit.json";
  REQUIRE(run_cli("fit " + data.string() + " --lambda-s 0.05 --num-models 2 --out " +
                  artifact_path.string())
              .exit_code == 0);

  const fs::path pred_path = work_dir() / "pred.csv";
  const RunResult run = run_cli("predict " + artifact_path.string() + " " + data.string() +
                                " --out " + pred_path.string());
  REQUIRE(run.exit_code == 0);

  const FitArtifact artifact = FitArtifact::load(artifact_path.string());
  const CsvTable predictions = read_numeric_csv(pred_path.string());
  REQUIRE(predictions.rows() == artifact.fitted_values.size());
  for (Index i = 0; i < predictions.rows(); ++i)
    CHECK(predictions.values(i, 0) ==
          doctest::Approx(artifact.fitted_values[i]).epsilon(1e-12));
}

TEST_CASE("predict matches columns by name, not position") {
  const fs::path data = write_training_csv("train_perm.csv", 20, 3, 8);
  const fs::path artifact_path = work_dir() / "perm_fit.json";
  REQUIRE(run_cli("fit " + data.string() + " --lambda-s 0.02 --out " +
                  artifact_path.string())
              .exit_code == 0);

  // Rewrite the data with permuted columns (x3, x1, x2; response dropped).
  const CsvTable table = read_numeric_csv(data.string());
  std::ostringstream permuted;
  permuted << "x3,x1,x2\n";
  char cell[64];
  for (Index i = 0; i < table.rows(); ++i) {
    std::snprintf(cell, sizeof(cell), "%.17g", table.values(i, 2));
    permuted << cell << ",";
    std::snprintf(cell, sizeof(cell), "%.17g", table.values(i, 0));
    permuted << cell << ",";
    std::snprintf(cell, sizeof(cell), "%.17g", table.values(i, 1));
    permuted << cell << "\n";
  }
  const fs::path permuted_path = work_dir() / "perm.csv";
  std::ofstream(permuted_path, std::ios::binary) << permuted.str();

  const fs::path direct = work_dir() / "perm_direct.csv";
  const fs::path reordered = work_dir() / "perm_reordered.csv";
  REQUIRE(run_cli("predict " + artifact_path.string() + " " + data.string() + " --out " +
                  direct.string())
              .exit_code == 0);
  REQUIRE(run_cli("predict " + artifact_path.string() + " " + permuted_path.string() +
                  " --out " + reordered.string())
              .exit_code == 0);
  CHECK(slurp(direct) == slurp(reordered));
}

TEST_CASE("predict names missing feature columns") {
  const fs::path data = write_training_csv("train_missing.csv", 20, 3, 9);
  const fs::path artifact_path = work_dir() / "missing_fit.json";
  REQUIRE(run_cli("fit " + data.string() + " --lambda-s 0.02 --out " +
                  artifact_path.string())
              .exit_code == 0);

  std::ostringstream reduced;
  reduced << "x1,x2\n";
  const CsvTable table = read_numeric_csv(data.string());
  char cell[64];
  for (Index i = 0; i < table.rows(); ++i) {
    std::snprintf(cell, sizeof(cell), "%.17g", table.values(i, 0));
    reduced << cell << ",";
    std::snprintf(cell, sizeof(cell), "%.17g", table.values(i, 1));
    reduced << cell << "\n";
  }
  const fs::path reduced_path = work_dir() / "reduced.csv";
  std::ofstream(reduced_path, std::ios::binary) << reduced.str();

  const RunResult run = run_cli("predict " + artifact_path.string() + " " +
                                reduced_path.string() + " --out " +
                                (work_dir() / "never.csv").string());
  CHECK(run.exit_code == 1);
  CHECK(contains(run.err, "x3"));
}

TEST_CASE("cv runs, persists both outputs, and is reproducible") {
  const fs::path data = write_training_csv("train_cv.csv", 36, 5, 10);
  const fs::path cv_path = work_dir() / "cv.json";
  const fs::path fit_path = work_dir() / "cv_fit.json";
  const std::string args = "cv " + data.string() +
                           " --candidates 1,2 --folds 4 --seed 3 --out " + cv_path.string() +
                           " --fit-out " + fit_path.string();
  const RunResult first = run_cli(args);
  REQUIRE(first.exit_code == 0);
  CHECK(contains(first.out, "selected"));

  const std::string cv_bytes = slurp(cv_path);
  const std::string fit_bytes = slurp(fit_path);
  const OrderedJson cv_json = OrderedJson::parse(cv_bytes);
  CHECK(cv_json["kind"] == "splitreg-cv");
  CHECK(cv_json["candidates"] == OrderedJson::array({1, 2}));
  CHECK(!cv_json["trace"].empty());
  const FitArtifact refit = FitArtifact::load(fit_path.string());
  CHECK(refit.penalties.num_models == cv_json["selected"]["num_models"].get<int>());

  // Same invocation, byte-identical outputs.
  const RunResult second = run_cli(args);
  REQUIRE(second.exit_code == 0);
  CHECK(slurp(cv_path) == cv_bytes);
  CHECK(slurp(fit_path) == fit_bytes);
}

TEST_CASE("simulate produces the three outputs deterministically") {
  const fs::path config_path = work_dir() / "tiny.cfg";
  std::ofstream(config_path, std::ios::binary)
      << "scenario = 1\np = 8\nn = 24\nrho = 0.2\nzeta = 0.25\nsnr = 5\n"
         "replications = 2\nseed = 7\nfolds = 4\nmethods = EN:1, Split2:2\n";
  const fs::path out_dir = work_dir() / "sim_out";
  fs::remove_all(out_dir);

  const RunResult run =
      run_cli("simulate " + config_path.string() + " --out-dir " + out_dir.string());
  REQUIRE(run.exit_code == 0);
  REQUIRE(fs::exists(out_dir / "records.tsv"));
  REQUIRE(fs::exists(out_dir / "summary.tsv"));
  REQUIRE(fs::exists(out_dir / "manifest.json"));
  CHECK(contains(run.out, "EN"));

  const std::string records = slurp(out_dir / "records.tsv");
  CHECK(contains(records, "Split2"));
  const std::string manifest = slurp(out_dir / "manifest.json");
  const OrderedJson j = OrderedJson::parse(manifest);
  CHECK(j["kind"] == "splitreg-simulate");
  CHECK(j["config_sha256"] == sha256_hex(slurp(config_path)));

  // Re-run into a fresh directory: identical up to wall-clock timing.
  const fs::path out_dir2 = work_dir() / "sim_out2";
  fs::remove_all(out_dir2);
  REQUIRE(run_cli("simulate " + config_path.string() + " --out-dir " + out_dir2.string())
              .exit_code == 0);
  CHECK(mask_seconds(slurp(out_dir2 / "records.tsv")) == mask_seconds(records));
  CHECK(slurp(out_dir2 / "manifest.json") == manifest);
}

TEST_CASE("simulate rejects a bad config with a named key") {
  const fs::path config_path = work_dir() / "bad.cfg";
  std::ofstream(config_path, std::ios::binary) << "scenario = 1\nbanana = 2\n";
  const RunResult run = run_cli("simulate " + config_path.string() + " --out-dir " +
                                (work_dir() / "bad_out").string());
  CHECK(run.exit_code == 1);
  CHECK(contains(run.err, "banana"));
}

TEST_CASE("fit rejects an unparseable csv with a positioned message") {
  const fs::path data = work_dir() / "broken.csv";
  std::ofstream(data, std::ios::binary) << "x1,y\n1,2\n3,oops\n";
  const RunResult run = run_cli("fit " + data.string() + " --lambda-s 0.1 --out " +
                                (work_dir() / "never.json").string());
  CHECK(run.exit_code == 1);
  CHECK(contains(run.err, "broken.csv:3"));
  CHECK(!fs::exists(work_dir() / "never.json"));
}

TEST_CASE("fit rejects an unknown response column") {
  const fs::path data = write_training_csv("train_resp.csv", 20, 3, 12);
  const RunResult run = run_cli("fit " + data.string() +
                                " --response target --lambda-s 0.1 --out " +
                                (work_dir() / "never2.json").string());
  CHECK(run.exit_code == 1);
  CHECK(contains(run.err, "target"));
}
