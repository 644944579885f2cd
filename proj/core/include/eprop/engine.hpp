#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eprop/network.hpp"
#include "eprop/tasks.hpp"

namespace eprop {

// Optional per-step capture for tests and spike dumps.
struct Recorder {
  bool spikes = true;
  bool signals = false;
  std::vector<std::pair<std::int64_t, std::int64_t>> spike_list;  // (neuron, global step)
  // With signals: one row per step, appended.
  std::vector<double> y;    // T x K readout voltages
  std::vector<double> E;    // T x K errors
  std::vector<double> L;    // T x J learning signals
  std::vector<double> psi;  // T x J
  std::vector<std::uint8_t> z;  // T x J
};

struct RunOptions {
  Recorder* recorder = nullptr;
  // Spikes forced on top of the dynamics: (neuron, step within the sample).
  std::vector<std::pair<std::int64_t, std::int64_t>> forced_spikes;
};

struct SampleResult {
  double loss = 0.0;
  std::optional<int> prediction;
  std::optional<bool> correct;
  std::int64_t spikes_recurrent = 0;
};

// Simulates one sample of cfg.sample_steps steps in the network's mode.
SampleResult run_sample(Network& net, const SampleSpec& sample, const RunOptions& opt = {});

// Marks the end of a training iteration. Time-driven mode applies the
// per-iteration update to every synapse here; event-driven mode defers it to
// the next spike arrival or to flush_plasticity.
void end_iteration(Network& net);

// Brings every synapse up to date and applies all pending updates.
void flush_plasticity(Network& net);

// Off: flushes, then freezes every weight. On: restarts the plastic state at
// the current step.
void set_plasticity(Network& net, bool on);

struct IterationMetrics {
  std::int64_t iteration = 0;
  std::string phase;  // "train" or "eval"
  double loss = 0.0;  // mean over the batch
  double prediction_error = 0.0;  // NaN without labels
  std::int64_t spikes_recurrent = 0;
  double runtime_s = 0.0;
};

struct RunMetrics {
  std::vector<IterationMetrics> rows;
  double runtime_s = 0.0;
  double simulated_s = 0.0;

  double real_time_factor() const { return runtime_s > 0.0 ? simulated_s / runtime_s : 0.0; }
};

// Produces sample `index` of an iteration; eval samples come from a separate stream.
using TaskStream = std::function<SampleSpec(std::int64_t iteration, int index, bool eval)>;

struct EvalSchedule {
  std::int64_t every = 0;  // training iterations between evaluations; 0 = never
  int iterations = 1;
};

RunMetrics run_training(Network& net, const TaskStream& stream, std::int64_t iterations,
                        const EvalSchedule& eval = {},
                        const std::function<void(const IterationMetrics&)>& on_row = {});

}  // namespace eprop
