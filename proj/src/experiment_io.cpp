#include "splitreg/experiment_io.hpp"

#include <charconv>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace splitreg {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(trim(s.substr(start)));
      return parts;
    }
    parts.push_back(trim(s.substr(start, pos - start)));
    start = pos + 1;
  }
}

double parse_double(const std::string& text, const std::string& where) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw InvalidInput(where + ": cannot parse \"" + text + "\" as a number");
  return value;
}

long long parse_integer(const std::string& text, const std::string& where) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw InvalidInput(where + ": cannot parse \"" + text + "\" as an integer");
  return value;
}

std::uint64_t parse_u64(const std::string& text, const std::string& where) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw InvalidInput(where + ": cannot parse \"" + text + "\" as a nonnegative integer");
  return value;
}

std::string format_double(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

std::string sanitize(const std::string& text) {
  std::string out = text;
  for (char& c : out)
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  return out;
}

struct RawMethod {
  std::string label;
  int num_models = 1;
  double alpha = -1.0;  // -1 means "use the config default"
};

}  // namespace

std::vector<ScenarioSpec> ExperimentConfig::combinations() const {
  std::vector<ScenarioSpec> specs;
  specs.reserve(rho.size() * zeta.size() * snr.size());
  for (const double r : rho)
    for (const double z : zeta)
      for (const double s : snr) {
        ScenarioSpec spec;
        spec.scenario_id = scenario;
        spec.p = p;
        spec.n = n;
        spec.rho = r;
        spec.zeta = z;
        spec.snr = s;
        spec.seed = seed;
        spec.validate();
        specs.push_back(spec);
      }
  return specs;
}

ExperimentConfig parse_experiment_config(const std::string& contents,
                                         const std::string& name) {
  ExperimentConfig config;
  std::vector<RawMethod> raw_methods;
  std::map<std::string, int> seen;  // key -> line first seen
  std::set<std::string> provided;

  std::istringstream stream(contents);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidInput(name + ":" + std::to_string(line_no) + ": expected \"key = value\"");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string where = name + ":" + std::to_string(line_no) + ": key \"" + key + "\"";
    if (key.empty()) throw InvalidInput(name + ":" + std::to_string(line_no) + ": empty key");
    if (value.empty()) throw InvalidInput(where + ": empty value");
    if (!seen.emplace(key, line_no).second)
      throw InvalidInput(where + ": duplicate (first given on line " +
                         std::to_string(seen[key]) + ")");
    provided.insert(key);

    if (key == "scenario") {
      config.scenario = static_cast<int>(parse_integer(value, where));
    } else if (key == "p") {
      config.p = static_cast<Index>(parse_integer(value, where));
    } else if (key == "n") {
      config.n = static_cast<Index>(parse_integer(value, where));
    } else if (key == "rho" || key == "zeta" || key == "snr") {
      std::vector<double> values;
      for (const std::string& item : split(value, ','))
        values.push_back(parse_double(item, where));
      if (key == "rho")
        config.rho = values;
      else if (key == "zeta")
        config.zeta = values;
      else
        config.snr = values;
    } else if (key == "replications") {
      config.replications = static_cast<int>(parse_integer(value, where));
    } else if (key == "seed") {
      config.seed = parse_u64(value, where);
    } else if (key == "folds") {
      config.folds = static_cast<int>(parse_integer(value, where));
    } else if (key == "alpha") {
      config.default_alpha = parse_double(value, where);
    } else if (key == "methods") {
      for (const std::string& entry : split(value, ',')) {
        const std::vector<std::string> parts = split(entry, ':');
        if (parts.size() < 2 || parts.size() > 3 || parts[0].empty())
          throw InvalidInput(where + ": method \"" + entry +
                             "\" must look like label:G or label:G:alpha");
        RawMethod method;
        method.label = parts[0];
        method.num_models = static_cast<int>(parse_integer(parts[1], where));
        if (parts.size() == 3) method.alpha = parse_double(parts[2], where);
        raw_methods.push_back(method);
      }
    } else {
      throw InvalidInput(name + ":" + std::to_string(line_no) + ": unknown key \"" + key +
                         "\"");
    }
  }

  for (const char* required : {"scenario", "p", "n", "rho", "zeta", "snr", "replications",
                               "seed", "methods"})
    if (provided.find(required) == provided.end())
      throw InvalidInput(name + ": missing required key \"" + std::string(required) + "\"");

  if (config.scenario < 1 || config.scenario > 3)
    throw InvalidInput(name + ": scenario must be 1, 2 or 3");
  if (config.replications < 1) throw InvalidInput(name + ": replications must be >= 1");
  if (config.folds < 2) throw InvalidInput(name + ": folds must be >= 2");
  if (!(config.default_alpha > 0.0 && config.default_alpha <= 1.0))
    throw InvalidInput(name + ": alpha must lie in (0, 1]");
  for (const double r : config.rho)
    if (!(r >= 0.0 && r < 1.0)) throw InvalidInput(name + ": rho values must lie in [0, 1)");
  for (const double z : config.zeta)
    if (!(z > 0.0 && z < 1.0)) throw InvalidInput(name + ": zeta values must lie in (0, 1)");
  for (const double s : config.snr)
    if (!(s > 0.0)) throw InvalidInput(name + ": snr values must be > 0");

  std::set<std::string> labels;
  for (const RawMethod& raw : raw_methods) {
    if (!labels.insert(raw.label).second)
      throw InvalidInput(name + ": duplicate method label \"" + raw.label + "\"");
    MethodConfig method;
    method.label = raw.label;
    method.num_models = raw.num_models;
    method.alpha = raw.alpha < 0.0 ? config.default_alpha : raw.alpha;
    if (method.num_models < 1)
      throw InvalidInput(name + ": method \"" + raw.label + "\": G must be >= 1");
    if (!(method.alpha > 0.0 && method.alpha <= 1.0))
      throw InvalidInput(name + ": method \"" + raw.label + "\": alpha must lie in (0, 1]");
    config.methods.push_back(method);
  }
  return config;
}

std::string records_tsv(const std::vector<ExperimentRun>& runs) {
  std::ostringstream out;
  out << "scenario\tp\tn\trho\tzeta\tsnr\treplication\tmethod\tmspe_over_sigma2\t"
         "precision\trecall\tovp\tlambda_s\tlambda_d\tnum_models\tseconds\tfailed\terror\n";
  for (const ExperimentRun& run : runs) {
    const ScenarioSpec& s = run.spec;
    const std::string prefix = std::to_string(s.scenario_id) + "\t" + std::to_string(s.p) +
                               "\t" + std::to_string(s.n) + "\t" + format_double(s.rho) +
                               "\t" + format_double(s.zeta) + "\t" + format_double(s.snr);
    for (const ReplicationRecord& rec : run.result.records) {
      out << prefix << "\t" << rec.replication << "\t" << rec.method << "\t";
      if (rec.failed) {
        out << "nan\tnan\tnan\tnan\tnan\tnan\tnan\t" << format_double(rec.wall_seconds);
      } else {
        out << format_double(rec.mspe_over_sigma2) << "\t"
            << (rec.precision ? format_double(*rec.precision) : "nan") << "\t"
            << (rec.recall ? format_double(*rec.recall) : "nan") << "\t"
            << format_double(rec.ovp) << "\t" << format_double(rec.lambda_s) << "\t"
            << format_double(rec.lambda_d) << "\t" << rec.num_models << "\t"
            << format_double(rec.wall_seconds);
      }
      out << "\t" << (rec.failed ? 1 : 0) << "\t" << sanitize(rec.error) << "\n";
    }
  }
  return out.str();
}

std::string summary_tsv(const std::vector<ExperimentRun>& runs) {
  std::ostringstream out;
  out << "scenario\tp\tn\trho\tzeta\tsnr\tmethod\tsuccesses\tmean_mspe\tse_mspe\t"
         "mean_precision\tse_precision\tmean_recall\tse_recall\tmean_ovp\tse_ovp\t"
         "mean_seconds\n";
  for (const ExperimentRun& run : runs) {
    const ScenarioSpec& s = run.spec;
    for (const MethodSummary& m : run.result.summaries) {
      out << s.scenario_id << "\t" << s.p << "\t" << s.n << "\t" << format_double(s.rho)
          << "\t" << format_double(s.zeta) << "\t" << format_double(s.snr) << "\t"
          << m.method << "\t" << m.successes << "\t" << format_double(m.mean_mspe) << "\t"
          << format_double(m.se_mspe) << "\t" << format_double(m.mean_precision) << "\t"
          << format_double(m.se_precision) << "\t" << format_double(m.mean_recall) << "\t"
          << format_double(m.se_recall) << "\t" << format_double(m.mean_ovp) << "\t"
          << format_double(m.se_ovp) << "\t" << format_double(m.mean_seconds) << "\n";
    }
  }
  return out.str();
}

OrderedJson experiment_manifest(const ExperimentConfig& config,
                                const std::string& config_file,
                                const std::string& config_sha256) {
  OrderedJson j;
  j["schema_version"] = kArtifactSchemaVersion;
  j["kind"] = "splitreg-simulate";
  j["version"] = kLibraryVersion;
  j["config_file"] = config_file;
  j["config_sha256"] = config_sha256;
  j["seed"] = config.seed;
  j["replications"] = config.replications;
  j["folds"] = config.folds;
  j["scenario"] = config.scenario;
  j["p"] = config.p;
  j["n"] = config.n;

  OrderedJson grids;
  grids["rho"] = config.rho;
  grids["zeta"] = config.zeta;
  grids["snr"] = config.snr;
  j["grids"] = grids;

  OrderedJson methods = OrderedJson::array();
  for (const MethodConfig& m : config.methods) {
    OrderedJson method;
    method["label"] = m.label;
    method["num_models"] = m.num_models;
    method["alpha"] = m.alpha;
    methods.push_back(method);
  }
  j["methods"] = methods;
  j["combinations"] = config.rho.size() * config.zeta.size() * config.snr.size();

  OrderedJson outputs;
  outputs["records"] = "records.tsv";
  outputs["summary"] = "summary.tsv";
  j["outputs"] = outputs;
  return j;
}

}  // namespace splitreg
