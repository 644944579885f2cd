#include "eprop/neuron.hpp"

#include <cmath>

#include "eprop/error.hpp"

namespace eprop {

double decay_factor(double dt, double tau) {
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (std::isinf(tau)) return 1.0;
  if (!(tau > 0.0)) throw ConfigError("time constant must be positive");
  return std::exp(-dt / tau);
}

LifParams make_lif_params(LifParams p) {
  p.alpha = decay_factor(p.dt, p.tau_m);
  p.rho = decay_factor(p.dt, p.tau_a);
  if (!(p.surrogate.gamma > 0.0) || !(p.surrogate.beta > 0.0))
    throw ConfigError("surrogate gamma and beta must be positive");
  return p;
}

RecurrentNeuronState initial_state(const LifParams& p) {
  RecurrentNeuronState s;
  s.v_th_t = p.v_th;
  return s;
}

RecurrentNeuronState step_recurrent(const RecurrentNeuronState& s, const LifParams& p,
                                    double rec_drive, double in_drive) {
  if (!std::isfinite(rec_drive) || !std::isfinite(in_drive))
    throw NumericInputError("non-finite synaptic drive");
  RecurrentNeuronState n;
  const double z_prev = s.z;
  n.a = p.rho * s.a + z_prev;
  n.v_th_t = p.v_th + p.beta_a * n.a;
  if (p.reset_mode == ResetMode::ResetToValue && s.z) {
    n.v = p.v_reset + rec_drive + in_drive;
  } else {
    n.v = p.alpha * s.v + rec_drive + in_drive - z_prev * n.v_th_t;
  }
  n.z = n.v >= n.v_th_t ? 1 : 0;
  return n;
}

ReadoutState step_readout(const ReadoutState& s, double drive) {
  if (!std::isfinite(drive)) throw NumericInputError("non-finite readout drive");
  return ReadoutState{s.kappa * s.y + drive, s.kappa};
}

double surrogate_gradient(double v, double v_th_t, const SurrogateSpec& s) {
  const double d = v - v_th_t;
  switch (s.kind) {
    case SurrogateKind::PiecewiseLinear: {
      const double r = 1.0 - s.beta * std::fabs(d);
      return r > 0.0 ? s.gamma * r : 0.0;
    }
    case SurrogateKind::Exponential:
      return s.gamma * std::exp(-s.beta * std::fabs(d));
    case SurrogateKind::FastSigmoid: {
      const double q = 1.0 + s.beta * std::fabs(d);
      return s.gamma / (q * q);
    }
    case SurrogateKind::Arctan: {
      const double q = s.beta * d;
      return s.gamma / (1.0 + q * q);
    }
  }
  return 0.0;
}

IgnoreAndFireStep step_ignore_and_fire(const IgnoreAndFireState& s) {
  if (s.period <= 0) throw ConfigError("ignore-and-fire period must be >= 1");
  IgnoreAndFireStep r;
  r.state.period = s.period;
  r.state.phase = s.phase + 1;
  if (r.state.phase >= s.period) {
    r.state.phase = 0;
    r.z = 1;
  }
  return r;
}

std::int64_t ignore_and_fire_period(double rate_hz, double dt_ms) {
  if (!(rate_hz > 0.0) || !(dt_ms > 0.0)) throw ConfigError("rate and dt must be positive");
  const double steps = 1000.0 / (rate_hz * dt_ms);
  return static_cast<std::int64_t>(std::llround(steps));
}

}  // namespace eprop
