#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "splitreg/ensemble.hpp"
#include "splitreg/standardize.hpp"
#include "splitreg/tuning.hpp"
#include "splitreg/types.hpp"

namespace splitreg {

inline constexpr int kArtifactSchemaVersion = 1;
inline constexpr const char* kLibraryVersion = "0.1.0";

/// Insertion-ordered JSON so serialized artifacts have a stable byte layout.
using OrderedJson = nlohmann::ordered_json;

std::string sha256_hex(const std::string& bytes);
std::string read_file_bytes(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

/// Everything a fit run persists: the penalty configuration, per-model and
/// averaged coefficients in raw data units, the standardization factors, fit
/// diagnostics, and provenance of the input. Serialization round-trips all
/// numbers exactly, so reloaded artifacts reproduce predictions bit for bit.
struct FitArtifact {
  PenaltySpec penalties;
  std::string response_name;
  std::vector<std::string> feature_names;  // p entries, input column order
  RawCoefficients coefficients;            // raw units
  AveragedModel averaged;
  Vector x_center, x_scale;
  double y_center = 0.0, y_scale = 1.0;
  double objective_value = 0.0;  // on the standardized scale
  bool converged = false;
  int cycles = 0;
  double ovp = 0.0;
  std::vector<int> nonzero_per_model;
  Vector fitted_values;  // averaged-model predictions on the training rows
  std::string input_file;
  std::string input_sha256;
  std::uint64_t seed = 0;
  std::string version = kLibraryVersion;

  OrderedJson to_json() const;
  static FitArtifact from_json(const OrderedJson& j);
  void save(const std::string& path) const;
  static FitArtifact load(const std::string& path);
};

/// JSON form of a cross-validation run: the candidate model counts, the
/// selected penalties, and the full trace of CV evaluations.
OrderedJson tuning_to_json(const TuningResult& result, double alpha, int folds,
                           std::uint64_t seed, const std::vector<int>& candidates,
                           const std::string& input_file, const std::string& input_sha256);

}  // namespace splitreg
