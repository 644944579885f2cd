#pragma once

#include <cstdint>

namespace eprop {

enum class SurrogateKind { PiecewiseLinear, Exponential, FastSigmoid, Arctan };

struct SurrogateSpec {
  SurrogateKind kind = SurrogateKind::PiecewiseLinear;
  double gamma = 0.3;
  double beta = 1.0;
};

enum class ResetMode { SubtractThreshold, ResetToValue };

struct LifParams {
  double dt = 1.0;
  double tau_m = 20.0;
  double alpha = 0.0;
  double v_th = 0.6;
  double beta_a = 0.0;
  double tau_a = 2000.0;
  double rho = 0.0;
  ResetMode reset_mode = ResetMode::SubtractThreshold;
  double v_reset = 0.0;
  SurrogateSpec surrogate;
};

// Fills alpha and rho from (dt, tau_m, tau_a). Throws ConfigError for dt <= 0
// or non-positive time constants.
LifParams make_lif_params(LifParams p);

struct RecurrentNeuronState {
  double v = 0.0;
  double a = 0.0;
  double v_th_t = 0.0;
  std::uint8_t z = 0;
};

RecurrentNeuronState initial_state(const LifParams& p);

RecurrentNeuronState step_recurrent(const RecurrentNeuronState& s, const LifParams& p,
                                    double rec_drive, double in_drive);

struct ReadoutState {
  double y = 0.0;
  double kappa = 0.0;
};

ReadoutState step_readout(const ReadoutState& s, double drive);

double decay_factor(double dt, double tau);

double surrogate_gradient(double v, double v_th_t, const SurrogateSpec& s);

struct IgnoreAndFireState {
  std::int64_t period = 200;
  std::int64_t phase = 0;
};

struct IgnoreAndFireStep {
  IgnoreAndFireState state;
  std::uint8_t z = 0;
};

// The neuron spikes on the step where phase wraps from period-1 back to 0.
IgnoreAndFireStep step_ignore_and_fire(const IgnoreAndFireState& s);

// Period in steps for a target rate in spikes per second.
std::int64_t ignore_and_fire_period(double rate_hz, double dt_ms);

}  // namespace eprop
