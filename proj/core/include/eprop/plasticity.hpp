#pragma once

#include <cstdint>

#include "eprop/neuron.hpp"

namespace eprop {

// F_gamma[u]^t = gamma * F^{t-1} + u^t, starting at 0.
struct FilterState {
  double value = 0.0;
  double gamma = 0.0;
};

inline FilterState filter_step(FilterState f, double u) {
  f.value = f.gamma * f.value + u;
  return f;
}

enum class RegMode { Off, Static, Cumulative, Ema };

// Rates are in spikes per step (multiply by 1000 for spikes per 1000 steps).
struct RegularizationParams {
  RegMode mode = RegMode::Off;
  double c_reg = 0.0;
  double f_target = 0.0;
  double beta_ema = 0.99;
};

// Smoothing constant of the rate estimate and of G_beta at local step t
// (0-based within the sample). Static mode returns 0, making G the identity.
inline double reg_beta(const RegularizationParams& r, std::int64_t t_local) {
  switch (r.mode) {
    case RegMode::Cumulative:
      return static_cast<double>(t_local) / static_cast<double>(t_local + 1);
    case RegMode::Ema:
      return r.beta_ema;
    default:
      return 0.0;
  }
}

// c_reg* of the update algorithms: c_reg / T for the static form, c_reg otherwise.
double effective_c_reg(const RegularizationParams& r, std::int64_t T);

inline double rate_step(double f_prev, double z, double beta) {
  return beta * f_prev + (1.0 - beta) * z;
}

inline double reg_gradient(double c_star, double f, double f_target, double g_trace) {
  return c_star * (f - f_target) * g_trace;
}

struct TraceParams {
  double alpha = 0.0;
  double rho = 0.0;
  double beta_a = 0.0;
  double kappa_e = 0.0;  // eligibility filter constant; kappa unless decoupled
};

TraceParams trace_params(const LifParams& p, double kappa_e);

struct EligibilityState {
  double eps_v = 0.0;
  double eps_a = 0.0;
  FilterState filt;
  double reg_trace = 0.0;
  double grad_accum = 0.0;
};

// eps_a uses the old eps_v, then eps_v <- alpha * eps_v + z_pre.
// For beta_a = 0 the adaptation component is not propagated and stays 0.
inline void eligibility_step(EligibilityState& e, double z_pre, double psi_prev,
                             const TraceParams& p) {
  if (p.beta_a != 0.0) e.eps_a = psi_prev * e.eps_v + (p.rho - psi_prev * p.beta_a) * e.eps_a;
  e.eps_v = p.alpha * e.eps_v + z_pre;
}

inline double eligibility_trace(const EligibilityState& e, double psi, const TraceParams& p) {
  return psi * (e.eps_v - p.beta_a * e.eps_a);
}

// One full step of the synapse-local trace machinery. Returns e^t and leaves
// F_kappa[e]^t in e.filt.value and G_beta[e]^t in e.reg_trace.
inline double advance_trace(EligibilityState& e, double z_pre, double psi_prev, double psi,
                            const TraceParams& p, double beta_reg) {
  eligibility_step(e, z_pre, psi_prev, p);
  const double et = eligibility_trace(e, psi, p);
  e.filt.value = p.kappa_e * e.filt.value + et;
  e.reg_trace = beta_reg * e.reg_trace + (1.0 - beta_reg) * et;
  return et;
}

// Per-step contribution L * F[e] + c*(f - f*) G[e]. The operation order is
// shared by every update algorithm so their sums agree bit-for-bit.
inline double contribution(double L, double filt, double reg_trace, double f, double c_star,
                           double f_target) {
  return L * filt + reg_gradient(c_star, f, f_target, reg_trace);
}

// Recurrent and input synapses: g^t = L^t * F[e]^t + g_reg, accumulated.
inline double grad_step_recurrent(EligibilityState& e, double L, double g_reg) {
  const double g = L * e.filt.value + g_reg;
  e.grad_accum += g;
  return g;
}

inline double grad_step_input(EligibilityState& e, double L) {
  return grad_step_recurrent(e, L, 0.0);
}

// Output synapses: g^t = E_k^t * F_kappa[z_j^{t-d}]^t. zf is advanced by u.
inline double grad_step_output(FilterState& zf, double u, double E) {
  zf.value = zf.gamma * zf.value + u;
  return E * zf.value;
}

}  // namespace eprop
