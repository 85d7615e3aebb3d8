#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>

#include "splitreg/artifact.hpp"
#include "splitreg/csv.hpp"
#include "splitreg/experiment_io.hpp"

using namespace splitreg;

namespace {

std::string tmp_path(const std::string& leaf) {
  const auto dir = std::filesystem::temp_directory_path() / "splitreg_io_tests";
  std::filesystem::create_directories(dir);
  return (dir / leaf).string();
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

std::string thrown_message(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) lines.push_back(line);
  return lines;
}

std::size_t count_tabs(const std::string& line) {
  std::size_t tabs = 0;
  for (const char c : line) tabs += c == '\t' ? 1 : 0;
  return tabs;
}

}  // namespace

TEST_CASE("csv parsing happy path") {
  const CsvTable table = parse_numeric_csv("a,b,y\n1, 2 ,3\n4,5.5,-6e-1\n", "input.csv");
  REQUIRE(table.rows() == 2);
  REQUIRE(table.cols() == 3);
  CHECK(table.column_names == std::vector<std::string>{"a", "b", "y"});
  CHECK(table.values(0, 1) == 2.0);
  CHECK(table.values(1, 2) == -0.6);
  CHECK(table.find_column("y") == 2);
  CHECK(table.find_column("missing") == -1);
}

TEST_CASE("csv tolerates CR line endings and trailing blank lines") {
  const CsvTable table = parse_numeric_csv("a,b\r\n1,2\r\n3,4\r\n\n\n", "input.csv");
  REQUIRE(table.rows() == 2);
  CHECK(table.values(1, 0) == 3.0);
  CHECK(table.column_names[1] == "b");
}

TEST_CASE("csv parse errors carry positions and names") {
  // Non-numeric cell: 1-based line, column index, column name, offending text.
  const std::string bad_cell =
      thrown_message([] { parse_numeric_csv("a,b\n1,2\n3,oops\n", "data.csv"); });
  CHECK(contains(bad_cell, "data.csv:3"));
  CHECK(contains(bad_cell, "\"b\""));
  CHECK(contains(bad_cell, "oops"));

  const std::string ragged =
      thrown_message([] { parse_numeric_csv("a,b\n1,2,3\n", "data.csv"); });
  CHECK(contains(ragged, "data.csv:2"));

  const std::string dup = thrown_message([] { parse_numeric_csv("a,a\n1,2\n", "d.csv"); });
  CHECK(contains(dup, "duplicate"));
  CHECK(contains(dup, "\"a\""));

  const std::string empty_name = thrown_message([] { parse_numeric_csv("a,\n1,2\n", "d.csv"); });
  CHECK(contains(empty_name, "empty"));

  CHECK_THROWS_AS(parse_numeric_csv("", "d.csv"), InvalidInput);

  // A header with no data rows parses to an empty table; row minimums are
  // the consumer's business.
  const CsvTable empty = parse_numeric_csv("a,b\n", "d.csv");
  CHECK(empty.rows() == 0);
  CHECK(empty.cols() == 2);
}

TEST_CASE("single-column csv round trip is exact") {
  Vector values(4);
  values << 1.0 / 3.0, -2.718281828459045e-12, 0.0, 123456789.12345679;
  const std::string path = tmp_path("column.csv");
  write_single_column_csv(path, "prediction", values);
  const CsvTable table = read_numeric_csv(path);
  REQUIRE(table.rows() == 4);
  REQUIRE(table.cols() == 1);
  CHECK(table.column_names[0] == "prediction");
  for (Index i = 0; i < 4; ++i) CHECK(table.values(i, 0) == values[i]);
  std::remove(path.c_str());
}

TEST_CASE("sha256 known vectors") {
  CHECK(sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

namespace {

FitArtifact sample_artifact() {
  FitArtifact artifact;
  artifact.penalties.alpha = 0.75;
  artifact.penalties.lambda_s = 0.1;
  artifact.penalties.lambda_d = 0.01;
  artifact.penalties.num_models = 2;
  artifact.response_name = "y";
  artifact.feature_names = {"a", "b", "c"};
  artifact.coefficients.beta = Matrix(3, 2);
  artifact.coefficients.beta << 1.0 / 3.0, 0.0, 0.0, -2.5, 0.125, 0.125;
  artifact.coefficients.intercepts = Vector(2);
  artifact.coefficients.intercepts << 0.5, -0.5;
  artifact.averaged.beta = Vector(3);
  artifact.averaged.beta << 1.0 / 6.0, -1.25, 0.125;
  artifact.averaged.intercept = 0.0;
  artifact.x_center = Vector::Zero(3);
  artifact.x_scale = Vector::Ones(3);
  artifact.y_center = 0.25;
  artifact.y_scale = 2.0;
  artifact.objective_value = 0.875;
  artifact.converged = true;
  artifact.cycles = 17;
  artifact.ovp = 0.5;
  artifact.nonzero_per_model = {2, 2};
  artifact.fitted_values = Vector(2);
  artifact.fitted_values << 0.1, 0.2;
  artifact.input_file = "train.csv";
  artifact.input_sha256 = sha256_hex("train");
  artifact.seed = 42;
  return artifact;
}

}  // namespace

TEST_CASE("fit artifact json round trip is bit exact") {
  const FitArtifact artifact = sample_artifact();
  const FitArtifact back = FitArtifact::from_json(artifact.to_json());

  CHECK(back.penalties.alpha == artifact.penalties.alpha);
  CHECK(back.penalties.lambda_s == artifact.penalties.lambda_s);
  CHECK(back.penalties.num_models == 2);
  CHECK(back.response_name == "y");
  CHECK(back.feature_names == artifact.feature_names);
  CHECK((back.coefficients.beta.array() == artifact.coefficients.beta.array()).all());
  CHECK((back.coefficients.intercepts.array() ==
         artifact.coefficients.intercepts.array()).all());
  CHECK((back.averaged.beta.array() == artifact.averaged.beta.array()).all());
  CHECK(back.averaged.intercept == artifact.averaged.intercept);
  CHECK(back.y_center == artifact.y_center);
  CHECK(back.objective_value == artifact.objective_value);
  CHECK(back.converged == artifact.converged);
  CHECK(back.cycles == 17);
  CHECK(back.ovp == 0.5);
  CHECK(back.nonzero_per_model == artifact.nonzero_per_model);
  CHECK((back.fitted_values.array() == artifact.fitted_values.array()).all());
  CHECK(back.input_sha256 == artifact.input_sha256);
  CHECK(back.seed == 42);
  CHECK(back.version == kLibraryVersion);
}

TEST_CASE("fit artifact file round trip and error handling") {
  const FitArtifact artifact = sample_artifact();
  const std::string path = tmp_path("fit.json");
  artifact.save(path);
  const FitArtifact loaded = FitArtifact::load(path);
  CHECK((loaded.coefficients.beta.array() == artifact.coefficients.beta.array()).all());
  CHECK(loaded.input_file == "train.csv");

  // Saving twice yields identical bytes.
  const std::string first = read_file_bytes(path);
  artifact.save(path);
  CHECK(read_file_bytes(path) == first);
  std::remove(path.c_str());

  const std::string bad = tmp_path("bad.json");
  write_text_file(bad, "{ not json");
  CHECK_THROWS_AS(FitArtifact::load(bad), InvalidInput);
  write_text_file(bad, "{\"kind\": \"other\", \"schema_version\": 1}");
  CHECK_THROWS_AS(FitArtifact::load(bad), InvalidInput);
  std::remove(bad.c_str());

  OrderedJson wrong_schema = artifact.to_json();
  wrong_schema["schema_version"] = 999;
  CHECK_THROWS_AS(FitArtifact::from_json(wrong_schema), InvalidInput);

  OrderedJson missing = artifact.to_json();
  missing.erase("coefficients");
  const std::string message =
      thrown_message([&] { (void)FitArtifact::from_json(missing); });
  CHECK(contains(message, "coefficients"));

  OrderedJson short_model = artifact.to_json();
  short_model["coefficients"]["models"][0] = OrderedJson::array({1.0});
  CHECK_THROWS_AS(FitArtifact::from_json(short_model), InvalidInput);
}

TEST_CASE("tuning json layout") {
  TuningResult result;
  result.lambda_s_opt = 0.2;
  result.lambda_d_opt = 0.0;
  result.num_models = 5;
  result.cv_mspe = 1.25;
  result.trace = {{0.4, 0.0, 1.5}, {0.2, 0.0, 1.25}};
  result.nonconverged_fits = 1;
  result.outer_iterations = 2;

  const OrderedJson j = tuning_to_json(result, 0.75, 10, 7, {2, 5}, "in.csv", "digest");
  CHECK(j["kind"] == "splitreg-cv");
  CHECK(j["schema_version"] == kArtifactSchemaVersion);
  CHECK(j["selected"]["num_models"] == 5);
  CHECK(j["selected"]["cv_mspe"] == 1.25);
  CHECK(j["candidates"] == OrderedJson::array({2, 5}));
  REQUIRE(j["trace"].size() == 2);
  CHECK(j["trace"][1]["cv_mspe"] == 1.25);
  CHECK(j["nonconverged_fits"] == 1);
  CHECK(j["data"]["input_sha256"] == "digest");
}

TEST_CASE("experiment config parsing") {
  const std::string text =
      "# comment line\n"
      "scenario = 2\n"
      "p = 20\n"
      "n = 30\n"
      "rho = 0.2, 0.5\n"
      "zeta = 0.1\n"
      "snr = 1, 3, 5  # grid\n"
      "replications = 4\n"
      "seed = 99\n"
      "folds = 5\n"
      "alpha = 0.9\n"
      "methods = EN:1, Split:10, Lasso:1:1.0\n";
  const ExperimentConfig config = parse_experiment_config(text, "exp.cfg");
  CHECK(config.scenario == 2);
  CHECK(config.p == 20);
  CHECK(config.n == 30);
  CHECK(config.rho == std::vector<double>{0.2, 0.5});
  CHECK(config.snr == std::vector<double>{1.0, 3.0, 5.0});
  CHECK(config.replications == 4);
  CHECK(config.seed == 99);
  CHECK(config.folds == 5);
  REQUIRE(config.methods.size() == 3);
  CHECK(config.methods[0].label == "EN");
  CHECK(config.methods[0].num_models == 1);
  CHECK(config.methods[0].alpha == 0.9);  // default alpha applies
  CHECK(config.methods[1].num_models == 10);
  CHECK(config.methods[2].alpha == 1.0);  // per-method override

  // Combinations vary snr fastest, then zeta, then rho.
  const auto specs = config.combinations();
  REQUIRE(specs.size() == 6);
  CHECK(specs[0].rho == 0.2);
  CHECK(specs[0].snr == 1.0);
  CHECK(specs[1].snr == 3.0);
  CHECK(specs[3].rho == 0.5);
  CHECK(specs[3].snr == 1.0);
}

TEST_CASE("experiment config error reporting") {
  const std::string base =
      "scenario = 1\np = 10\nn = 20\nrho = 0.1\nzeta = 0.2\nsnr = 1\n"
      "replications = 2\nseed = 0\nmethods = EN:1\n";

  const std::string unknown =
      thrown_message([&] { parse_experiment_config(base + "bogus = 1\n", "e.cfg"); });
  CHECK(contains(unknown, "unknown key \"bogus\""));
  CHECK(contains(unknown, "e.cfg:10"));

  const std::string dup =
      thrown_message([&] { parse_experiment_config(base + "p = 11\n", "e.cfg"); });
  CHECK(contains(dup, "duplicate"));
  CHECK(contains(dup, "\"p\""));

  const std::string missing =
      thrown_message([] { parse_experiment_config("scenario = 1\n", "e.cfg"); });
  CHECK(contains(missing, "missing required key"));

  const std::string bad_method = thrown_message(
      [] { parse_experiment_config("methods = justalabel\n", "e.cfg"); });
  CHECK(contains(bad_method, "label:G"));

  const std::string bad_number =
      thrown_message([] { parse_experiment_config("p = ten\n", "e.cfg"); });
  CHECK(contains(bad_number, "e.cfg:1"));
  CHECK(contains(bad_number, "ten"));

  CHECK_THROWS_AS(parse_experiment_config(
                      "scenario = 9\np = 10\nn = 20\nrho = 0.1\nzeta = 0.2\nsnr = 1\n"
                      "replications = 2\nseed = 0\nmethods = EN:1\n",
                      "e.cfg"),
                  InvalidInput);
}

TEST_CASE("records and summary tsv layout") {
  ExperimentRun run;
  run.spec.scenario_id = 1;
  run.spec.p = 10;
  run.spec.n = 20;
  run.spec.rho = 0.5;
  run.spec.zeta = 0.2;
  run.spec.snr = 3.0;
  run.spec.seed = 7;

  ReplicationRecord good;
  good.replication = 0;
  good.method = "EN";
  good.mspe_over_sigma2 = 1.5;
  good.precision = 0.75;
  good.recall = 1.0;
  good.ovp = 0.5;
  good.lambda_s = 0.125;
  good.lambda_d = 0.0;
  good.num_models = 1;
  good.wall_seconds = 0.25;

  ReplicationRecord bad;
  bad.replication = 1;
  bad.method = "EN";
  bad.failed = true;
  bad.error = "fit\tblew\nup";
  bad.wall_seconds = 0.125;

  run.result.records = {good, bad};
  run.result.summaries = summarize(run.result.records, {"EN"});

  const std::string records = records_tsv({run});
  const auto record_lines = lines_of(records);
  REQUIRE(record_lines.size() == 3);
  CHECK(contains(record_lines[0], "mspe_over_sigma2"));
  const std::size_t header_tabs = count_tabs(record_lines[0]);
  CHECK(count_tabs(record_lines[1]) == header_tabs);  // rows match the header
  CHECK(count_tabs(record_lines[2]) == header_tabs);  // even when failed
  CHECK(contains(record_lines[1], "0.125"));
  CHECK(contains(record_lines[2], "nan"));
  CHECK(contains(record_lines[2], "fit blew up"));  // tabs/newlines sanitized
  CHECK(!contains(record_lines[2], "fit\tblew"));

  const std::string summary = summary_tsv({run});
  const auto summary_lines = lines_of(summary);
  REQUIRE(summary_lines.size() == 2);
  CHECK(contains(summary_lines[0], "mean_mspe"));
  CHECK(count_tabs(summary_lines[1]) == count_tabs(summary_lines[0]));
  CHECK(contains(summary_lines[1], "EN"));
  CHECK(contains(summary_lines[1], "1.5"));  // single success: mean is the value
}

TEST_CASE("experiment manifest") {
  ExperimentConfig config;
  config.scenario = 2;
  config.p = 20;
  config.n = 30;
  config.rho = {0.2, 0.5};
  config.zeta = {0.1};
  config.snr = {1.0, 3.0};
  config.replications = 4;
  config.seed = 99;
  config.folds = 5;
  config.methods.push_back({"EN", 1, 0.75});

  const OrderedJson j = experiment_manifest(config, "exp.cfg", "deadbeef");
  CHECK(j["kind"] == "splitreg-simulate");
  CHECK(j["config_sha256"] == "deadbeef");
  CHECK(j["seed"] == 99);
  CHECK(j["combinations"] == 4);
  CHECK(j["grids"]["rho"].size() == 2);
  CHECK(j["methods"][0]["label"] == "EN");
  CHECK(j["outputs"]["records"] == "records.tsv");
}
