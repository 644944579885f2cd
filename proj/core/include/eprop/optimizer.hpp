#pragma once

#include <cstdint>
#include <span>

namespace eprop {

enum class OptimizerKind { GD, Adam };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::GD;
  double eta = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double eps_hat = 1e-7;
  int batch_size = 1;
};

struct AdamState {
  double m = 0.0;
  double v = 0.0;
  std::int64_t t = 0;
  double beta1_pow = 1.0;
  double beta2_pow = 1.0;
};

inline double gd_update(double w, double grad_sum, double eta) { return w - eta * grad_sum; }

// One reordered Adam step. Advances m, v and the counter, returns
// eta^t * m / (sqrt(v) + eps_hat); the caller subtracts the sum at sequence end.
double adam_step(AdamState& s, double g, const OptimizerConfig& c);

// Runs adam_step over the per-step gradients and applies the summed update once.
double adam_update(AdamState& s, double w, std::span<const double> grads,
                   const OptimizerConfig& c);

double batch_average(std::span<const double> grad_sums);

}  // namespace eprop
