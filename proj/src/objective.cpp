#include "splitreg/objective.hpp"

namespace splitreg {

double diversity_penalty(const CoefficientBundle& bundle) {
  const Index p = bundle.p();
  const Index num_models = bundle.num_models();
  double total = 0.0;
  for (Index g = 0; g < num_models; ++g)
    for (Index h = 0; h < num_models; ++h) {
      if (h == g) continue;
      for (Index j = 0; j < p; ++j)
        total += std::abs(bundle.beta(j, g)) * std::abs(bundle.beta(j, h));
    }
  return 0.5 * total;
}

double objective(const StandardizedDesign& design, const CoefficientBundle& bundle,
                 const PenaltySpec& spec) {
  spec.validate();
  bundle.validate(design.p(), spec.num_models);

  const double inv_2n = 0.5 / static_cast<double>(design.n());
  double value = 0.0;
  for (Index g = 0; g < spec.num_models; ++g) {
    const Vector residual = design.y - design.x * bundle.beta.col(g);
    value += inv_2n * residual.squaredNorm();
    value += spec.lambda_s * (0.5 * (1.0 - spec.alpha) * bundle.beta.col(g).squaredNorm() +
                              spec.alpha * bundle.beta.col(g).lpNorm<1>());
  }
  value += spec.lambda_d * diversity_penalty(bundle);
  return value;
}

}  // namespace splitreg
