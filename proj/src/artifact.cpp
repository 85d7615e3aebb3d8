#include "splitreg/artifact.hpp"

#include <fstream>
#include <sstream>

#include <openssl/evp.h>

namespace splitreg {

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256_hex: digest computation failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0x0f]);
  }
  return out;
}

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput(path + ": cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput(path + ": cannot open file for writing");
  out << contents;
  if (!out) throw InvalidInput(path + ": write failed");
}

namespace {

OrderedJson vector_to_json(const Vector& v) {
  OrderedJson array = OrderedJson::array();
  for (Index i = 0; i < v.size(); ++i) array.push_back(v[i]);
  return array;
}

Vector vector_from_json(const OrderedJson& j, const std::string& what) {
  if (!j.is_array()) throw InvalidInput("artifact: \"" + what + "\" must be an array");
  Vector v(static_cast<Index>(j.size()));
  Index i = 0;
  for (const auto& item : j) {
    if (!item.is_number()) throw InvalidInput("artifact: \"" + what + "\" must be numeric");
    v[i++] = item.get<double>();
  }
  return v;
}

const OrderedJson& require(const OrderedJson& j, const std::string& key) {
  const auto it = j.find(key);
  if (it == j.end()) throw InvalidInput("artifact: missing field \"" + key + "\"");
  return *it;
}

}  // namespace

OrderedJson FitArtifact::to_json() const {
  OrderedJson j;
  j["schema_version"] = kArtifactSchemaVersion;
  j["kind"] = "splitreg-fit";
  j["version"] = version;

  OrderedJson penalty;
  penalty["alpha"] = penalties.alpha;
  penalty["lambda_s"] = penalties.lambda_s;
  penalty["lambda_d"] = penalties.lambda_d;
  penalty["num_models"] = penalties.num_models;
  j["penalty"] = penalty;

  OrderedJson data;
  data["response"] = response_name;
  data["features"] = feature_names;
  data["input_file"] = input_file;
  data["input_sha256"] = input_sha256;
  j["data"] = data;

  OrderedJson coef;
  OrderedJson models = OrderedJson::array();
  for (Index g = 0; g < coefficients.beta.cols(); ++g)
    models.push_back(vector_to_json(coefficients.beta.col(g)));
  coef["models"] = models;
  coef["intercepts"] = vector_to_json(coefficients.intercepts);
  coef["averaged"] = vector_to_json(averaged.beta);
  coef["averaged_intercept"] = averaged.intercept;
  j["coefficients"] = coef;

  OrderedJson standardization;
  standardization["x_center"] = vector_to_json(x_center);
  standardization["x_scale"] = vector_to_json(x_scale);
  standardization["y_center"] = y_center;
  standardization["y_scale"] = y_scale;
  j["standardization"] = standardization;

  OrderedJson diagnostics;
  diagnostics["objective"] = objective_value;
  diagnostics["converged"] = converged;
  diagnostics["cycles"] = cycles;
  diagnostics["overlap"] = ovp;
  diagnostics["nonzero_per_model"] = nonzero_per_model;
  diagnostics["fitted_values"] = vector_to_json(fitted_values);
  j["diagnostics"] = diagnostics;

  j["seed"] = seed;
  return j;
}

FitArtifact FitArtifact::from_json(const OrderedJson& j) {
  if (require(j, "kind").get<std::string>() != "splitreg-fit")
    throw InvalidInput("artifact: not a splitreg-fit document");
  const int schema = require(j, "schema_version").get<int>();
  if (schema != kArtifactSchemaVersion)
    throw InvalidInput("artifact: unsupported schema_version " + std::to_string(schema));

  FitArtifact artifact;
  artifact.version = require(j, "version").get<std::string>();

  const OrderedJson& penalty = require(j, "penalty");
  artifact.penalties.alpha = require(penalty, "alpha").get<double>();
  artifact.penalties.lambda_s = require(penalty, "lambda_s").get<double>();
  artifact.penalties.lambda_d = require(penalty, "lambda_d").get<double>();
  artifact.penalties.num_models = require(penalty, "num_models").get<int>();
  artifact.penalties.validate();

  const OrderedJson& data = require(j, "data");
  artifact.response_name = require(data, "response").get<std::string>();
  artifact.feature_names = require(data, "features").get<std::vector<std::string>>();
  artifact.input_file = require(data, "input_file").get<std::string>();
  artifact.input_sha256 = require(data, "input_sha256").get<std::string>();

  const OrderedJson& coef = require(j, "coefficients");
  const OrderedJson& models = require(coef, "models");
  if (!models.is_array() || models.empty())
    throw InvalidInput("artifact: \"models\" must be a non-empty array");
  const Index p = static_cast<Index>(artifact.feature_names.size());
  artifact.coefficients.beta.resize(p, static_cast<Index>(models.size()));
  Index g = 0;
  for (const auto& column : models) {
    const Vector model = vector_from_json(column, "models");
    if (model.size() != p)
      throw InvalidInput("artifact: model " + std::to_string(g) + " has " +
                         std::to_string(model.size()) + " coefficients, expected " +
                         std::to_string(p));
    artifact.coefficients.beta.col(g++) = model;
  }
  artifact.coefficients.intercepts = vector_from_json(require(coef, "intercepts"), "intercepts");
  artifact.averaged.beta = vector_from_json(require(coef, "averaged"), "averaged");
  artifact.averaged.intercept = require(coef, "averaged_intercept").get<double>();
  if (artifact.coefficients.intercepts.size() != artifact.coefficients.beta.cols())
    throw InvalidInput("artifact: intercept count does not match the model count");
  if (artifact.averaged.beta.size() != p)
    throw InvalidInput("artifact: averaged coefficient length does not match the features");

  const OrderedJson& standardization = require(j, "standardization");
  artifact.x_center = vector_from_json(require(standardization, "x_center"), "x_center");
  artifact.x_scale = vector_from_json(require(standardization, "x_scale"), "x_scale");
  artifact.y_center = require(standardization, "y_center").get<double>();
  artifact.y_scale = require(standardization, "y_scale").get<double>();

  const OrderedJson& diagnostics = require(j, "diagnostics");
  artifact.objective_value = require(diagnostics, "objective").get<double>();
  artifact.converged = require(diagnostics, "converged").get<bool>();
  artifact.cycles = require(diagnostics, "cycles").get<int>();
  artifact.ovp = require(diagnostics, "overlap").get<double>();
  artifact.nonzero_per_model =
      require(diagnostics, "nonzero_per_model").get<std::vector<int>>();
  artifact.fitted_values = vector_from_json(require(diagnostics, "fitted_values"), "fitted_values");

  artifact.seed = require(j, "seed").get<std::uint64_t>();
  return artifact;
}

void FitArtifact::save(const std::string& path) const {
  write_text_file(path, to_json().dump(2) + "\n");
}

FitArtifact FitArtifact::load(const std::string& path) {
  OrderedJson j;
  try {
    j = OrderedJson::parse(read_file_bytes(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput(path + ": invalid JSON: " + e.what());
  }
  try {
    return from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(path + ": malformed artifact: " + e.what());
  }
}

OrderedJson tuning_to_json(const TuningResult& result, double alpha, int folds,
                           std::uint64_t seed, const std::vector<int>& candidates,
                           const std::string& input_file, const std::string& input_sha256) {
  OrderedJson j;
  j["schema_version"] = kArtifactSchemaVersion;
  j["kind"] = "splitreg-cv";
  j["version"] = kLibraryVersion;
  j["alpha"] = alpha;
  j["folds"] = folds;
  j["seed"] = seed;
  j["candidates"] = candidates;

  OrderedJson selected;
  selected["lambda_s"] = result.lambda_s_opt;
  selected["lambda_d"] = result.lambda_d_opt;
  selected["num_models"] = result.num_models;
  selected["cv_mspe"] = result.cv_mspe;
  j["selected"] = selected;

  OrderedJson trace = OrderedJson::array();
  for (const TracePoint& point : result.trace) {
    OrderedJson entry;
    entry["lambda_s"] = point.lambda_s;
    entry["lambda_d"] = point.lambda_d;
    entry["cv_mspe"] = point.cv_mspe;
    trace.push_back(entry);
  }
  j["trace"] = trace;
  j["nonconverged_fits"] = result.nonconverged_fits;
  j["outer_iterations"] = result.outer_iterations;

  OrderedJson data;
  data["input_file"] = input_file;
  data["input_sha256"] = input_sha256;
  j["data"] = data;
  return j;
}

}  // namespace splitreg
