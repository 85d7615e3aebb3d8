#include "splitreg/simulate.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <set>

#include "splitreg/ensemble.hpp"
#include "splitreg/parallel.hpp"
#include "splitreg/standardize.hpp"

namespace splitreg {

Index ScenarioSpec::p0() const {
  // floor(p * zeta); the nudge absorbs binary representation error on
  // products that are mathematically integral (e.g. 150 * 0.2).
  return static_cast<Index>(std::floor(static_cast<double>(p) * zeta + 1e-9));
}

void ScenarioSpec::validate() const {
  if (scenario_id < 1 || scenario_id > 3)
    throw InvalidInput("ScenarioSpec: scenario_id must be 1, 2 or 3, got " +
                       std::to_string(scenario_id));
  if (p < 1) throw InvalidInput("ScenarioSpec: p must be >= 1");
  if (n < 2) throw InvalidInput("ScenarioSpec: n must be >= 2");
  if (!(rho >= 0.0 && rho < 1.0))
    throw InvalidInput("ScenarioSpec: rho must lie in [0, 1), got " + std::to_string(rho));
  if (!(zeta > 0.0 && zeta < 1.0))
    throw InvalidInput("ScenarioSpec: zeta must lie in (0, 1), got " + std::to_string(zeta));
  if (!(snr > 0.0))
    throw InvalidInput("ScenarioSpec: snr must be > 0, got " + std::to_string(snr));
  if (p0() < 1)
    throw InvalidInput("ScenarioSpec: floor(p * zeta) must be >= 1, got 0");
}

namespace {

Index scenario2_block_boundary(Index p, Index p0) {
  return p0 / 2 + (p - p0 + 1) / 2;  // floor(p0/2) + ceil((p - p0)/2)
}

/// Symmetric root of the m x m matrix (1-rho) I + rho 11'.
Matrix equicorrelation_factor(Index m, double rho) {
  const double a = std::sqrt(1.0 - rho);
  const double b =
      (std::sqrt(1.0 - rho + static_cast<double>(m) * rho) - a) / static_cast<double>(m);
  Matrix factor = Matrix::Constant(m, m, b);
  factor.diagonal().array() += a;
  return factor;
}

}  // namespace

std::vector<Index> active_positions(const ScenarioSpec& spec) {
  spec.validate();
  const Index p0 = spec.p0();
  std::vector<Index> positions;
  positions.reserve(static_cast<std::size_t>(p0));
  if (spec.scenario_id == 2) {
    const Index first_half = p0 / 2;
    const Index boundary = scenario2_block_boundary(spec.p, p0);
    for (Index j = 0; j < first_half; ++j) positions.push_back(j);
    for (Index j = boundary; j < boundary + (p0 - first_half); ++j) positions.push_back(j);
  } else {
    for (Index j = 0; j < p0; ++j) positions.push_back(j);
  }
  return positions;
}

Matrix build_covariance(const ScenarioSpec& spec) {
  spec.validate();
  Matrix factor = Matrix::Identity(spec.p, spec.p);
  switch (spec.scenario_id) {
    case 1:
      factor = equicorrelation_factor(spec.p, spec.rho);
      break;
    case 2: {
      const Index boundary = scenario2_block_boundary(spec.p, spec.p0());
      factor.topLeftCorner(boundary, boundary) = equicorrelation_factor(boundary, spec.rho);
      const Index rest = spec.p - boundary;
      factor.bottomRightCorner(rest, rest) = equicorrelation_factor(rest, spec.rho);
      break;
    }
    case 3: {
      const Index p0 = spec.p0();
      factor.topLeftCorner(p0, p0) = equicorrelation_factor(p0, spec.rho);
      break;
    }
    default:
      throw InvalidInput("build_covariance: unknown scenario");
  }
  return factor;
}

Vector generate_beta0(const ScenarioSpec& spec, Rng& rng) {
  const std::vector<Index> positions = active_positions(spec);
  const double a = 5.0 * std::log(static_cast<double>(spec.n)) /
                   std::sqrt(static_cast<double>(spec.n));
  Vector beta0 = Vector::Zero(spec.p);
  for (const Index j : positions) {
    const bool negative = rng.bernoulli(0.2);
    const double z = rng.normal();
    beta0[j] = (negative ? -1.0 : 1.0) * (a + std::abs(z));
  }
  return beta0;
}

double sigma_from_snr(const Vector& beta0, const Matrix& sigma_factor, double snr) {
  if (!(snr > 0.0)) throw InvalidInput("sigma_from_snr: snr must be > 0");
  if (sigma_factor.rows() != sigma_factor.cols() || sigma_factor.rows() != beta0.size())
    throw InvalidInput("sigma_from_snr: factor and beta0 dimensions disagree");
  // beta0' Sigma beta0 = |F' beta0|^2 since Sigma = F F'.
  const double quadratic = (sigma_factor.transpose() * beta0).squaredNorm();
  if (!(quadratic > 0.0))
    throw InvalidInput("sigma_from_snr: beta0' Sigma beta0 must be positive (null signal)");
  return std::sqrt(quadratic / snr);
}

Dataset sample_dataset(const GenerativeModel& model, Index n, Rng& rng) {
  if (n < 1) throw InvalidInput("sample_dataset: n must be >= 1");
  if (!(model.sigma > 0.0)) throw InvalidInput("sample_dataset: sigma must be > 0");
  const Index p = model.beta0.size();
  if (model.sigma_factor.rows() != p || model.sigma_factor.cols() != p)
    throw InvalidInput("sample_dataset: factor and beta0 dimensions disagree");
  Matrix gaussian(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) gaussian(i, j) = rng.normal();
  Dataset data;
  data.x = gaussian * model.sigma_factor.transpose();
  Vector noise(n);
  for (Index i = 0; i < n; ++i) noise[i] = rng.normal();
  data.y = data.x * model.beta0 + model.sigma * noise;
  return data;
}

double mspe(const Vector& predictions, const Vector& y_test, double sigma) {
  if (predictions.size() != y_test.size())
    throw InvalidInput("mspe: prediction and response lengths disagree");
  if (y_test.size() == 0) throw InvalidInput("mspe: empty test set");
  if (!(sigma > 0.0)) throw InvalidInput("mspe: sigma must be > 0");
  return (predictions - y_test).squaredNorm() /
         (static_cast<double>(y_test.size()) * sigma * sigma);
}

namespace {

struct Accumulator {
  double sum = 0.0, sum_sq = 0.0;
  int count = 0;

  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++count;
  }
  double mean() const {
    return count == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / count;
  }
  // Sample sd / sqrt(count); 0 with a single value, NaN with none.
  double standard_error() const {
    if (count == 0) return std::numeric_limits<double>::quiet_NaN();
    if (count == 1) return 0.0;
    const double m = mean();
    double var = (sum_sq - static_cast<double>(count) * m * m) / (count - 1);
    if (var < 0.0) var = 0.0;
    return std::sqrt(var / count);
  }
};

}  // namespace

std::vector<MethodSummary> summarize(const std::vector<ReplicationRecord>& records,
                                     const std::vector<std::string>& method_order) {
  std::vector<MethodSummary> summaries;
  summaries.reserve(method_order.size());
  for (const std::string& label : method_order) {
    Accumulator mspe_acc, precision_acc, recall_acc, ovp_acc, seconds_acc;
    for (const ReplicationRecord& rec : records) {
      if (rec.method != label || rec.failed) continue;
      mspe_acc.add(rec.mspe_over_sigma2);
      ovp_acc.add(rec.ovp);
      seconds_acc.add(rec.wall_seconds);
      if (rec.precision) precision_acc.add(*rec.precision);
      if (rec.recall) recall_acc.add(*rec.recall);
    }
    MethodSummary summary;
    summary.method = label;
    summary.successes = mspe_acc.count;
    summary.mean_mspe = mspe_acc.mean();
    summary.se_mspe = mspe_acc.standard_error();
    summary.mean_precision = precision_acc.mean();
    summary.se_precision = precision_acc.standard_error();
    summary.mean_recall = recall_acc.mean();
    summary.se_recall = recall_acc.standard_error();
    summary.mean_ovp = ovp_acc.mean();
    summary.se_ovp = ovp_acc.standard_error();
    summary.mean_seconds = seconds_acc.mean();
    summaries.push_back(summary);
  }
  return summaries;
}

ExperimentResult run_experiment(const ScenarioSpec& spec,
                                const std::vector<MethodConfig>& methods, int replications,
                                const ExperimentOptions& options) {
  spec.validate();
  if (replications < 1) throw InvalidInput("run_experiment: replications must be >= 1");
  if (methods.empty()) throw InvalidInput("run_experiment: no methods given");
  std::set<std::string> seen;
  for (const MethodConfig& m : methods) {
    if (m.label.empty()) throw InvalidInput("run_experiment: empty method label");
    if (!seen.insert(m.label).second)
      throw InvalidInput("run_experiment: duplicate method label \"" + m.label + "\"");
    if (!(m.alpha > 0.0 && m.alpha <= 1.0))
      throw InvalidInput("run_experiment: method \"" + m.label +
                         "\": alpha must lie in (0, 1]");
    if (m.num_models < 1)
      throw InvalidInput("run_experiment: method \"" + m.label + "\": num_models must be >= 1");
  }
  if (options.folds < 2) throw InvalidInput("run_experiment: folds must be >= 2");
  if (options.threads < 1) throw InvalidInput("run_experiment: threads must be >= 1");
  options.solver.validate();
  options.tuning.validate();

  const Matrix factor = build_covariance(spec);
  const std::size_t num_methods = methods.size();
  ExperimentResult result;
  result.scenario = spec;
  result.records.resize(static_cast<std::size_t>(replications) * num_methods);

  auto run_one = [&](Index r) {
    // Distinct substreams for the data draws and the fold shuffle.
    Rng rng(spec.seed, 2 * static_cast<std::uint64_t>(r));
    const std::uint64_t plan_seed = mix_seed(spec.seed, 2 * static_cast<std::uint64_t>(r) + 1);

    GenerativeModel model;
    model.sigma_factor = factor;
    model.beta0 = generate_beta0(spec, rng);
    model.sigma = sigma_from_snr(model.beta0, factor, spec.snr);
    const Dataset train = sample_dataset(model, spec.n, rng);
    const Dataset test = sample_dataset(model, spec.n, rng);
    const CvPlan plan = make_cv_plan(spec.n, options.folds, plan_seed);

    for (std::size_t m = 0; m < num_methods; ++m) {
      ReplicationRecord& rec =
          result.records[static_cast<std::size_t>(r) * num_methods + m];
      rec.replication = static_cast<int>(r);
      rec.method = methods[m].label;
      const auto start = std::chrono::steady_clock::now();
      try {
        const StandardizedDesign design = standardize(train.x, train.y);
        const TuningResult tuned = tune(design, methods[m].alpha, methods[m].num_models,
                                        plan, options.solver, options.tuning);
        const AveragedModel averaged = average_model(destandardize(tuned.bundle, design));
        rec.mspe_over_sigma2 = mspe(predict(test.x, averaged), test.y, model.sigma);
        const PrecisionRecall pr = precision_recall(averaged.beta, model.beta0);
        rec.precision = pr.precision;
        rec.recall = pr.recall;
        rec.ovp = overlap(tuned.bundle);
        rec.lambda_s = tuned.lambda_s_opt;
        rec.lambda_d = tuned.lambda_d_opt;
        rec.num_models = tuned.num_models;
      } catch (const std::exception& e) {
        rec.failed = true;
        rec.error = e.what();
      }
      rec.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  };
  parallel_for(static_cast<Index>(replications), options.threads, run_one);

  std::vector<std::string> order;
  order.reserve(num_methods);
  for (const MethodConfig& m : methods) order.push_back(m.label);
  result.summaries = summarize(result.records, order);
  return result;
}

}  // namespace splitreg
