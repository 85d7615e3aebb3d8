#pragma once

#include "splitreg/types.hpp"

namespace splitreg {

/// sign(z) * max(0, |z| - gamma). Expects gamma >= 0.
inline double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

/// Total cross-model diversity term without its strength constant:
/// (1/2) sum_g sum_{h != g} sum_j |beta_j^g| |beta_j^h|.
/// Zero exactly when the models use pairwise disjoint variables.
double diversity_penalty(const CoefficientBundle& bundle);

/// Full penalized objective for a bundle:
///   sum_g { (1/2n) ||y - X beta^g||^2
///           + lambda_s [ (1-alpha)/2 ||beta^g||_2^2 + alpha ||beta^g||_1 ]
///           + (lambda_d/2) sum_{h != g} sum_j |beta_j^g| |beta_j^h| }.
double objective(const StandardizedDesign& design, const CoefficientBundle& bundle,
                 const PenaltySpec& spec);

}  // namespace splitreg
