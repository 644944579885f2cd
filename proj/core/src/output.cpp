#include "eprop/output.hpp"

#include <json.hpp>

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <sstream>

#include "eprop/error.hpp"

namespace eprop {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os.precision(17);
  return os;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<std::vector<std::string>> read_rows(const std::string& path,
                                                const std::string& header) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(is, line) || line != header)
    throw std::runtime_error(path + ": expected header '" + header + "'");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(is, line))
    if (!line.empty()) rows.push_back(split_line(line));
  return rows;
}

constexpr const char* kMetricsHeader =
    "iteration,phase,loss,prediction_error,spikes_recurrent,runtime_s";
constexpr const char* kSpikeHeader = "neuron_id,time_step";

}  // namespace

void write_metrics_csv(const std::string& path, const std::vector<IterationMetrics>& rows) {
  auto os = open_out(path);
  os << kMetricsHeader << '\n';
  for (const auto& r : rows) {
    os << r.iteration << ',' << r.phase << ',' << r.loss << ',';
    if (!std::isnan(r.prediction_error)) os << r.prediction_error;
    os << ',' << r.spikes_recurrent << ',' << r.runtime_s << '\n';
  }
}

std::vector<IterationMetrics> read_metrics_csv(const std::string& path) {
  std::vector<IterationMetrics> out;
  for (const auto& c : read_rows(path, kMetricsHeader)) {
    if (c.size() != 6) throw std::runtime_error(path + ": metrics row needs 6 fields");
    IterationMetrics r;
    r.iteration = std::stoll(c[0]);
    r.phase = c[1];
    r.loss = std::stod(c[2]);
    r.prediction_error = c[3].empty() ? std::nan("") : std::stod(c[3]);
    r.spikes_recurrent = std::stoll(c[4]);
    r.runtime_s = std::stod(c[5]);
    out.push_back(r);
  }
  return out;
}

void write_spike_csv(const std::string& path,
                     const std::vector<std::pair<std::int64_t, std::int64_t>>& spikes) {
  auto os = open_out(path);
  os << kSpikeHeader << '\n';
  for (const auto& [n, t] : spikes) os << n << ',' << t << '\n';
}

std::vector<std::pair<std::int64_t, std::int64_t>> read_spike_csv(const std::string& path) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  for (const auto& c : read_rows(path, kSpikeHeader)) {
    if (c.size() != 2) throw std::runtime_error(path + ": spike row needs 2 fields");
    out.emplace_back(std::stoll(c[0]), std::stoll(c[1]));
  }
  return out;
}

std::string manifest_json(const ManifestInfo& m) {
  nlohmann::ordered_json j;
  j["subcommand"] = m.subcommand;
  j["seed"] = m.seed;
  j["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m.config.items()) j["config"][k] = v;
  j["results"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m.results) j["results"][k] = v;
  j["versions"] = {{"eprop", EPROP_VERSION},
                   {"cli11", CLI11_VERSION},
                   {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                   {"compiler", __VERSION__},
                   {"cxx_standard", __cplusplus}};
  return j.dump(2);
}

ManifestInfo parse_manifest(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("config") || !j["config"].is_object())
    throw ConfigError("manifest lacks a config object");
  ManifestInfo m;
  m.subcommand = j.value("subcommand", "");
  m.seed = j.value("seed", std::uint64_t{0});
  for (const auto& [k, v] : j["config"].items())
    m.config.set(k, v.is_string() ? v.get<std::string>() : v.dump());
  if (j.contains("results") && j["results"].is_object())
    for (const auto& [k, v] : j["results"].items())
      m.results.emplace_back(k, v.is_string() ? v.get<std::string>() : v.dump());
  return m;
}

void write_manifest(const std::string& path, const ManifestInfo& m) {
  auto os = open_out(path);
  os << manifest_json(m) << '\n';
}

Config load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  const std::string text = ss.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return parse_manifest(text).config;
  return Config::from_string(text);
}

}  // namespace eprop
