#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eprop/engine.hpp"
#include "eprop/network.hpp"
#include "eprop/tasks.hpp"

namespace eprop {

enum class ScalingLayout { Strong, Weak };

struct ScalingOptions {
  std::vector<int> workers{1, 2, 4};
  ScalingLayout layout = ScalingLayout::Strong;  // weak: scale multiplied by the worker count
  bool static_run = true;
  bool plastic_run = true;
  int cutoff = 10;
  double eta = 1e-4;
  std::int64_t archive_clean_every = 100;
};

struct ScalingRow {
  int workers = 1;
  int scale = 1;
  bool plastic = false;
  std::size_t n_neurons = 0;
  std::size_t n_synapses = 0;
  double build_s = 0.0;
  double runtime_s = 0.0;  // simulation only, network construction excluded
  double simulated_s = 0.0;
  double real_time_factor = 0.0;
  std::int64_t spikes_recurrent = 0;
  double rate_hz = 0.0;
  std::uint64_t spike_hash = 0;  // over (neuron, step) in emission order
};

// Engine network for the ignore-and-fire workload. Only recurrent synapses
// are plastic in the plastic variant (per-spike updates, plain GD).
Network scaling_network(const ScalingNetwork& topo, int workers, bool plastic,
                        const ScalingOptions& opt);

// One sample spanning cfg.steps: Poisson inputs and a sinusoidal target per readout.
SampleSpec scaling_sample(const ScalingConfig& cfg);

std::vector<ScalingRow> run_scaling_benchmark(const ScalingConfig& cfg, const ScalingOptions& opt);

std::uint64_t spike_hash(const std::vector<std::pair<std::int64_t, std::int64_t>>& spikes);

}  // namespace eprop
