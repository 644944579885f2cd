#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "eprop/config.hpp"

namespace eprop {

// Independent generator per (seed, stream).
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream);

struct TargetSignal {
  std::size_t K = 0;
  std::vector<double> values;         // T x K row-major
  std::vector<unsigned char> window;  // T entries, 1 = plasticity enabled
};

struct SampleSpec {
  std::int64_t T = 0;
  std::vector<std::vector<std::int64_t>> input_spikes;  // per channel, sorted, in [0, T)
  TargetSignal target;
  std::optional<int> label;

  void validate() const;
  // Dense T x I spike raster, row-major.
  std::vector<unsigned char> raster() const;
};

struct PatternTaskConfig {
  std::int64_t T = 1000;
  int n_input = 100;
  int n_readouts = 1;
  double dt = 1.0;
  double input_rate_hz = 10.0;
  std::array<double, 4> freqs_hz{1.0, 2.0, 3.0, 5.0};
  double amp_min = 0.5;
  double amp_max = 2.0;
  double target_scale = 1.0;

  static PatternTaskConfig from(const Config& c);
};

SampleSpec gen_pattern_task(std::uint64_t seed, const PatternTaskConfig& cfg);

struct EvidenceTaskConfig {
  int n_cues = 7;
  std::int64_t cue_duration = 100;
  std::int64_t inter_cue = 50;
  std::int64_t delay = 1000;
  std::int64_t recall = 150;
  int n_left = 10;
  int n_right = 10;
  int n_background = 10;
  int n_recall = 10;
  double cue_rate_hz = 40.0;
  double background_rate_hz = 10.0;
  double recall_rate_hz = 40.0;
  double dt = 1.0;

  static EvidenceTaskConfig from(const Config& c);
  std::int64_t duration() const;
  int n_input() const { return n_left + n_right + n_background + n_recall; }
};

// Label 0 = left, 1 = right. Channel order: left, right, background, recall.
SampleSpec gen_evidence_task(std::uint64_t seed, const EvidenceTaskConfig& cfg);

inline constexpr int kNmnistSide = 34;

struct NmnistEvent {
  std::uint8_t x = 0;
  std::uint8_t y = 0;
  std::uint8_t polarity = 0;
  std::uint32_t timestamp = 0;  // microseconds, 23 bits

  bool operator==(const NmnistEvent&) const = default;
};

// 40-bit big-endian record: x, y, then polarity in bit 7 of byte 2 and the
// timestamp in the remaining 23 bits.
NmnistEvent decode_event(const std::uint8_t* bytes);
std::array<std::uint8_t, 5> encode_event(const NmnistEvent& e);

// Throws FormatError naming the byte offset on a truncated record, x/y out of
// range, or a decreasing timestamp.
std::vector<NmnistEvent> decode_events(const std::vector<std::uint8_t>& bytes);
std::vector<NmnistEvent> read_event_file(const std::string& path);
void write_event_file(const std::string& path, const std::vector<NmnistEvent>& events);

struct NmnistConfig {
  std::vector<int> digits{0, 1};
  std::string split = "Train";
  int max_per_class = 250;
  std::int64_t duration = 300;
  double dt = 1.0;
  double keep_fraction = 0.9;  // pixel floor keeps at least this share of ON events
  std::int64_t window_start = 0;
  std::uint64_t seed = 1;

  static NmnistConfig from(const Config& c);
};

struct NmnistDataset {
  std::vector<SampleSpec> samples;
  std::vector<int> pixels;  // retained pixel ids (y * 34 + x), one per input channel
  std::int64_t event_floor = 0;
  std::size_t on_events_total = 0;
  std::size_t on_events_kept = 0;
};

// Reads <root>/<split>/<digit>/*.bin. Classes are indexed by position in
// cfg.digits. Samples are shuffled with cfg.seed.
NmnistDataset load_nmnist(const std::string& root, const NmnistConfig& cfg);

// Largest per-pixel event-count floor (at least 1) whose retained pixels still
// hold keep_fraction of all events.
std::int64_t pixel_floor(const std::vector<std::int64_t>& counts, double keep_fraction);

struct ScalingConfig {
  int scale = 1;
  std::int64_t n_rec = 10000;
  std::int64_t n_in = 1000;
  std::int64_t n_out = 10;
  std::int64_t indeg_in = 100;
  std::int64_t indeg_rec = 100;
  std::int64_t indeg_out = 1000;
  std::int64_t outdeg_fb = 100;
  double rate_hz = 5.0;
  double input_rate_hz = 5.0;
  double dt = 1.0;
  std::int64_t steps = 20000;
  std::uint64_t seed = 1;

  static ScalingConfig from(const Config& c);
};

// Compressed adjacency: targets of source s are tgt[ptr[s] .. ptr[s+1]).
struct Projection {
  std::int64_t n_src = 0;
  std::int64_t n_tgt = 0;
  std::vector<std::int64_t> ptr;
  std::vector<std::int64_t> tgt;
  std::vector<double> weight;

  std::size_t n_synapses() const { return tgt.size(); }
};

struct ScalingNetwork {
  ScalingConfig cfg;
  std::vector<std::int64_t> phases;  // ignore-and-fire start phases
  std::int64_t period = 200;
  Projection input;     // n_in -> n_rec, fixed in-degree
  Projection recurrent; // n_rec -> n_rec, fixed in-degree, no autapses
  Projection output;    // n_rec -> n_out, fixed in-degree
  Projection feedback;  // n_out -> n_rec, fixed out-degree

  std::size_t n_neurons() const;
  std::size_t n_synapses() const;
};

ScalingNetwork gen_scaling_network(const ScalingConfig& cfg);

// Fixed in-degree wiring without multapses (and without autapses when the
// populations coincide). Sources of each target are sorted.
Projection fixed_indegree(std::int64_t n_src, std::int64_t n_tgt, std::int64_t indegree,
                          bool same_population, std::uint64_t seed);
Projection fixed_outdegree(std::int64_t n_src, std::int64_t n_tgt, std::int64_t outdegree,
                           std::uint64_t seed);

// Poisson spike times in [0, T) for a rate in spikes per second.
std::vector<std::int64_t> poisson_train(std::uint64_t seed, std::int64_t T, double rate_hz,
                                        double dt);

}  // namespace eprop
