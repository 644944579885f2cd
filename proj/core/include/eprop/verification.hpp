#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "eprop/algorithms.hpp"
#include "eprop/engine.hpp"
#include "eprop/network.hpp"

namespace eprop {

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;      // worst observed deviation
  double tolerance = 0.0;
  std::string detail;
  double seconds = 0.0;
};

// Random single-synapse histories over steps 0..T with spike probability p_spike.
SynapseHistories random_histories(std::mt19937_64& rng, std::int64_t T, double p_spike);

// Algorithms 1, 3 and 5 must agree bit-for-bit with cutoff >= T; Algorithms 2
// and 4 with per-spike GD updates must agree to 1e-12 in the final weight.
CheckResult check_algorithm_equivalence(std::uint64_t seed, int instances = 50);

// Gradients accumulated online by the engine (probe mode, d = d_ls = 0)
// against the future-summation form, which sums E^t kappa^(t - t') e^t' over
// t >= t' for every t'. Relative difference per trial.
CheckResult check_online_offline(std::uint64_t seed, int trials = 100, double tol = 1e-10);

// Readout-weight gradients against central differences of the MSE loss.
CheckResult check_readout_finite_differences(std::uint64_t seed, int entries = 20,
                                             double h = 1e-5, double tol = 1e-5);

// Per-sample losses of time-driven and event-driven runs of the same network.
CheckResult check_mode_equivalence(const NetworkConfig& cfg, const TaskStream& stream,
                                   std::int64_t iterations, double tol = 1e-9);

// The oracle-equivalence suite behind the `verify` subcommand.
std::vector<CheckResult> run_verification(std::uint64_t seed);

}  // namespace eprop
