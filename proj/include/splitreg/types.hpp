#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>

namespace splitreg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Thrown when an input violates a documented precondition (bad penalty
/// values, dimension mismatches, degenerate data).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Predictor matrix and response after centering and scaling with the 1/n
/// moment convention: every column of `x` (and `y`) has mean 0 and
/// (1/n) * sum of squares equal to 1. The centering/scaling factors are kept
/// so fitted coefficients can be mapped back to the original units.
struct StandardizedDesign {
  Matrix x;            // n x p
  Vector y;            // n
  Vector col_center;   // p
  Vector col_scale;    // p, strictly positive
  double y_center = 0.0;
  double y_scale = 1.0;

  Index n() const { return x.rows(); }
  Index p() const { return x.cols(); }
};

/// Penalty configuration for one fit: elastic-net mixing weight `alpha`,
/// sparsity strength `lambda_s`, diversity strength `lambda_d`, and the
/// number of models fitted jointly.
struct PenaltySpec {
  double alpha = 0.75;
  double lambda_s = 0.0;
  double lambda_d = 0.0;
  int num_models = 1;

  void validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0))
      throw InvalidInput("PenaltySpec: alpha must lie in [0, 1], got " + std::to_string(alpha));
    if (!(lambda_s >= 0.0))
      throw InvalidInput("PenaltySpec: lambda_s must be >= 0, got " + std::to_string(lambda_s));
    if (!(lambda_d >= 0.0))
      throw InvalidInput("PenaltySpec: lambda_d must be >= 0, got " + std::to_string(lambda_d));
    if (num_models < 1)
      throw InvalidInput("PenaltySpec: num_models must be >= 1, got " + std::to_string(num_models));
  }
};

/// The p x G matrix of per-model coefficients. Column g holds model g.
struct CoefficientBundle {
  Matrix beta;  // p x G
  bool on_standardized_scale = true;

  Index p() const { return beta.rows(); }
  Index num_models() const { return beta.cols(); }

  void validate(Index p, Index num_models) const {
    if (beta.rows() != p || beta.cols() != num_models)
      throw InvalidInput("CoefficientBundle: expected " + std::to_string(p) + "x" +
                         std::to_string(num_models) + " coefficients, got " +
                         std::to_string(beta.rows()) + "x" + std::to_string(beta.cols()));
    if (!beta.allFinite()) throw InvalidInput("CoefficientBundle: non-finite coefficient");
  }
};

/// Solver controls. `tolerance` is the delta of the convergence criterion
/// max_j (mean coefficient change)^2 < delta checked after each full cycle.
struct SolverSettings {
  double tolerance = 1e-8;
  int max_cycles = 10000;
  std::optional<CoefficientBundle> initial_bundle;
  bool record_objective = false;  // keep the per-cycle objective trace

  void validate() const {
    if (!(tolerance > 0.0))
      throw InvalidInput("SolverSettings: tolerance must be > 0");
    if (max_cycles < 1)
      throw InvalidInput("SolverSettings: max_cycles must be >= 1");
  }
};

}  // namespace splitreg
