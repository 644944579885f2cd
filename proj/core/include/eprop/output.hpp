#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "eprop/config.hpp"
#include "eprop/engine.hpp"

namespace eprop {

// Header: iteration,phase,loss,prediction_error,spikes_recurrent,runtime_s.
// Numbers use 17 significant digits; a missing prediction error is left empty.
void write_metrics_csv(const std::string& path, const std::vector<IterationMetrics>& rows);
std::vector<IterationMetrics> read_metrics_csv(const std::string& path);

// Header: neuron_id,time_step.
void write_spike_csv(const std::string& path,
                     const std::vector<std::pair<std::int64_t, std::int64_t>>& spikes);
std::vector<std::pair<std::int64_t, std::int64_t>> read_spike_csv(const std::string& path);

struct ManifestInfo {
  std::string subcommand;
  std::uint64_t seed = 0;
  Config config;  // every key needed to repeat the run
  std::vector<std::pair<std::string, std::string>> results;
};

// JSON object with keys subcommand, seed, config, results, versions.
std::string manifest_json(const ManifestInfo& m);
ManifestInfo parse_manifest(const std::string& json_text);
void write_manifest(const std::string& path, const ManifestInfo& m);

// Reads an INI config file, or the config section of a JSON manifest when
// the file starts with '{'.
Config load_config_file(const std::string& path);

}  // namespace eprop
