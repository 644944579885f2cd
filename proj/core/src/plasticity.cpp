#include "eprop/plasticity.hpp"

#include "eprop/error.hpp"

namespace eprop {

double effective_c_reg(const RegularizationParams& r, std::int64_t T) {
  if (r.mode == RegMode::Off) return 0.0;
  if (r.c_reg < 0.0) throw ConfigError("c_reg must be non-negative");
  if (r.mode == RegMode::Static) {
    if (T <= 0) throw ConfigError("static regularization needs a known sample length");
    return r.c_reg / static_cast<double>(T);
  }
  return r.c_reg;
}

TraceParams trace_params(const LifParams& p, double kappa_e) {
  return TraceParams{p.alpha, p.rho, p.beta_a, kappa_e};
}

}  // namespace eprop
