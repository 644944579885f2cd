#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "eprop/config.hpp"
#include "eprop/engine.hpp"
#include "eprop/network.hpp"

namespace eprop {

// Training tasks driven by run_experiment.
inline constexpr const char* kPatternGeneration = "pattern-generation";
inline constexpr const char* kEvidenceAccumulation = "evidence-accumulation";
inline constexpr const char* kNmnist = "nmnist";

// Desk-scale defaults for a task; the same values ship in configs/<task>.cfg.
// Throws ConfigError for an unknown task name.
Config builtin_defaults(const std::string& task);

struct ExperimentOutput {
  std::string task;
  Config config;  // fully resolved: rerunning with it repeats the run bit for bit
  NetworkConfig net;
  RunMetrics metrics;
  std::vector<std::pair<std::int64_t, std::int64_t>> spikes;  // with output.spikes
  std::vector<std::pair<std::string, std::string>> results;
  std::vector<std::string> failed_checks;

  bool ok() const { return failed_checks.empty(); }
};

// Run keys besides the network keys: run.iterations, eval.every,
// eval.iterations, output.spikes and the task's own section (pattern.*,
// evidence.*, nmnist.*). The N-MNIST task reads dataset_path.
ExperimentOutput run_experiment(const std::string& task, const Config& cfg,
                                const std::string& dataset_path = "");

// Sample seed for (iteration, index, eval) of a stochastic task stream.
std::uint64_t sample_seed(std::uint64_t seed, std::int64_t iteration, int index, bool eval);

}  // namespace eprop
