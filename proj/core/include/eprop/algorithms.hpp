#pragma once

#include <cstdint>
#include <vector>

#include "eprop/optimizer.hpp"
#include "eprop/plasticity.hpp"

namespace eprop {

struct DelayConfig {
  int d = 1;
  int d_ls = 0;
  int cutoff = 64;

  int d_sync() const { return d + d_ls; }
  void validate() const;
};

enum class UpdatePolicyKind { PerIteration, PerSpike };

struct UpdatePolicy {
  UpdatePolicyKind kind = UpdatePolicyKind::PerIteration;
  std::int64_t update_interval = 1000;
  int batch_size = 1;
  std::int64_t shift = 0;

  // t_update = shift + update_interval * i
  std::int64_t update_time(std::int64_t i) const { return shift + update_interval * i; }
};

// Recorded signals seen by a single recurrent synapse over steps 1..T.
// Vectors have T + 1 entries; index 0 is the initial state. z[t] is the
// presynaptic spike at step t, consumed by the eligibility vector at t + 1.
struct SynapseHistories {
  std::int64_t T = 0;
  std::vector<double> psi;
  std::vector<double> L;
  std::vector<double> f;
  std::vector<std::uint8_t> z;

  void validate() const;
  std::vector<std::int64_t> spike_times() const;
};

struct AlgoParams {
  TraceParams trace;
  RegularizationParams reg;
  double c_star = 0.0;
  DelayConfig delays;
  OptimizerConfig opt;
};

struct AlgoResult {
  double grad = 0.0;
  double weight = 0.0;
  std::vector<double> contributions;  // per step t = 0..T, index 0 unused
};

// Per-step accumulation with an eligibility FIFO of length
// d_sync; one weight update at the end.
AlgoResult time_driven_gradient(const SynapseHistories& h, const AlgoParams& p, double w0);

// Same contributions as time_driven_gradient, weight changed every step.
AlgoResult time_driven_weight_update(const SynapseHistories& h, const AlgoParams& p, double w0);

// Event-driven accumulation over left-open inter-spike
// intervals with a z FIFO of length d_sync + 1, flushed at T.
AlgoResult event_driven_update(const SynapseHistories& h, const AlgoParams& p, double w0);

// Per-spike weight updates over (t_prev, t_spike] truncated at
// cutoff steps after the previous spike.
AlgoResult event_driven_per_spike_update(const SynapseHistories& h, const AlgoParams& p,
                                         double w0);

// As event_driven_update with a sparse list of spike timestamps in
// place of the FIFO. max_pending reports the largest list length observed.
AlgoResult optimized_event_update(const SynapseHistories& h, const AlgoParams& p, double w0,
                                  std::size_t* max_pending = nullptr);

// Pairing of learning signal and eligibility at step t: L^{t - d_ls} with the
// trace at t - d - d_ls. Returns the pair of source indices (L index, e index).
struct DelayedPairing {
  std::int64_t l_index;
  std::int64_t e_index;
};
DelayedPairing apply_learning_signal_delay(std::int64_t t, const DelayConfig& d);

}  // namespace eprop
