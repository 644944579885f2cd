#include "eprop/optimizer.hpp"

#include <cmath>

#include "eprop/error.hpp"

namespace eprop {

double adam_step(AdamState& s, double g, const OptimizerConfig& c) {
  s.t += 1;
  s.beta1_pow *= c.beta1;
  s.beta2_pow *= c.beta2;
  s.m = c.beta1 * s.m + (1.0 - c.beta1) * g;
  s.v = c.beta2 * s.v + (1.0 - c.beta2) * g * g;
  const double eta_t = c.eta * std::sqrt(1.0 - s.beta2_pow) / (1.0 - s.beta1_pow);
  return eta_t * s.m / (std::sqrt(s.v) + c.eps_hat);
}

double adam_update(AdamState& s, double w, std::span<const double> grads,
                   const OptimizerConfig& c) {
  double step = 0.0;
  for (double g : grads) step += adam_step(s, g, c);
  return w - step;
}

double batch_average(std::span<const double> grad_sums) {
  if (grad_sums.empty()) throw ConfigError("batch size must be >= 1");
  double s = 0.0;
  for (double g : grad_sums) s += g;
  return s / static_cast<double>(grad_sums.size());
}

}  // namespace eprop
