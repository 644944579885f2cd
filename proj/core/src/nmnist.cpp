#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "eprop/error.hpp"
#include "eprop/tasks.hpp"

namespace eprop {

namespace fs = std::filesystem;

NmnistEvent decode_event(const std::uint8_t* b) {
  NmnistEvent e;
  e.x = b[0];
  e.y = b[1];
  e.polarity = static_cast<std::uint8_t>(b[2] >> 7);
  e.timestamp = (static_cast<std::uint32_t>(b[2] & 0x7F) << 16) |
                (static_cast<std::uint32_t>(b[3]) << 8) | static_cast<std::uint32_t>(b[4]);
  return e;
}

std::array<std::uint8_t, 5> encode_event(const NmnistEvent& e) {
  if (e.timestamp >= (1u << 23)) throw std::invalid_argument("timestamp exceeds 23 bits");
  return {e.x, e.y,
          static_cast<std::uint8_t>(((e.polarity & 1u) << 7) | ((e.timestamp >> 16) & 0x7F)),
          static_cast<std::uint8_t>((e.timestamp >> 8) & 0xFF),
          static_cast<std::uint8_t>(e.timestamp & 0xFF)};
}

std::vector<NmnistEvent> decode_events(const std::vector<std::uint8_t>& bytes) {
  std::vector<NmnistEvent> out;
  out.reserve(bytes.size() / 5);
  std::size_t off = 0;
  for (; off + 5 <= bytes.size(); off += 5) {
    const NmnistEvent e = decode_event(bytes.data() + off);
    if (e.x >= kNmnistSide || e.y >= kNmnistSide) throw FormatError("pixel out of range", off);
    if (!out.empty() && e.timestamp < out.back().timestamp)
      throw FormatError("timestamp decreases", off);
    out.push_back(e);
  }
  if (off != bytes.size()) throw FormatError("truncated event record", off);
  return out;
}

std::vector<NmnistEvent> read_event_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open event file " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_events(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.reason(), e.offset());
  }
}

void write_event_file(const std::string& path, const std::vector<NmnistEvent>& events) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write event file " + path);
  for (const auto& e : events) {
    const auto b = encode_event(e);
    os.write(reinterpret_cast<const char*>(b.data()), 5);
  }
}

std::int64_t pixel_floor(const std::vector<std::int64_t>& counts, double keep_fraction) {
  std::vector<std::int64_t> sorted;
  std::int64_t total = 0;
  for (auto c : counts)
    if (c > 0) {
      sorted.push_back(c);
      total += c;
    }
  if (sorted.empty()) return 1;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const double need = keep_fraction * static_cast<double>(total);
  std::int64_t kept = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    kept += sorted[i];
    // Pixels tied with the floor are kept too.
    if (static_cast<double>(kept) >= need) return std::max<std::int64_t>(sorted[i], 1);
  }
  return 1;
}

NmnistConfig NmnistConfig::from(const Config& c) {
  NmnistConfig n;
  const auto digits = c.get_int_list("nmnist.digits", {0, 1});
  n.digits.assign(digits.begin(), digits.end());
  n.split = c.get_string("nmnist.split", n.split);
  n.max_per_class = static_cast<int>(c.get_int("nmnist.max_per_class", n.max_per_class));
  n.duration = c.get_int("nmnist.duration", n.duration);
  n.dt = c.get_double("neuron.dt", n.dt);
  n.keep_fraction = c.get_double("nmnist.keep_fraction", n.keep_fraction);
  n.window_start = c.get_int("nmnist.window_start", n.window_start);
  n.seed = static_cast<std::uint64_t>(c.get_int("seed", static_cast<std::int64_t>(n.seed)));
  return n;
}

NmnistDataset load_nmnist(const std::string& root, const NmnistConfig& cfg) {
  if (cfg.digits.empty()) throw ConfigError("no digits selected");
  struct Raw {
    int label;
    std::vector<NmnistEvent> on;
  };
  std::vector<Raw> raw;
  std::vector<std::int64_t> counts(kNmnistSide * kNmnistSide, 0);
  NmnistDataset ds;
  for (std::size_t c = 0; c < cfg.digits.size(); ++c) {
    const fs::path dir = fs::path(root) / cfg.split / std::to_string(cfg.digits[c]);
    if (!fs::is_directory(dir)) throw ConfigError("dataset directory missing: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
      if (e.is_regular_file() && e.path().extension() == ".bin") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (static_cast<int>(files.size()) > cfg.max_per_class)
      files.resize(static_cast<std::size_t>(cfg.max_per_class));
    for (const auto& f : files) {
      Raw r{static_cast<int>(c), {}};
      for (const auto& e : read_event_file(f.string())) {
        if (!e.polarity) continue;
        r.on.push_back(e);
        ++counts[static_cast<std::size_t>(e.y) * kNmnistSide + e.x];
      }
      ds.on_events_total += r.on.size();
      raw.push_back(std::move(r));
    }
  }
  ds.event_floor = pixel_floor(counts, cfg.keep_fraction);
  std::vector<int> channel(counts.size(), -1);
  for (std::size_t p = 0; p < counts.size(); ++p) {
    if (counts[p] >= ds.event_floor && counts[p] > 0) {
      channel[p] = static_cast<int>(ds.pixels.size());
      ds.pixels.push_back(static_cast<int>(p));
      ds.on_events_kept += static_cast<std::size_t>(counts[p]);
    }
  }
  const std::size_t K = cfg.digits.size();
  const double us_per_step = cfg.dt * 1000.0;
  for (const Raw& r : raw) {
    SampleSpec s;
    s.T = cfg.duration;
    s.label = r.label;
    s.input_spikes.resize(ds.pixels.size());
    for (const auto& e : r.on) {
      const int ch = channel[static_cast<std::size_t>(e.y) * kNmnistSide + e.x];
      if (ch < 0) continue;
      const auto t = static_cast<std::int64_t>(static_cast<double>(e.timestamp) / us_per_step);
      if (t >= s.T) continue;
      auto& v = s.input_spikes[static_cast<std::size_t>(ch)];
      if (v.empty() || v.back() != t) v.push_back(t);
    }
    s.target.K = K;
    s.target.values.assign(static_cast<std::size_t>(s.T) * K, 0.0);
    s.target.window.assign(static_cast<std::size_t>(s.T), 0);
    for (std::int64_t t = 0; t < s.T; ++t) {
      s.target.values[static_cast<std::size_t>(t) * K + static_cast<std::size_t>(r.label)] = 1.0;
      if (t >= cfg.window_start) s.target.window[static_cast<std::size_t>(t)] = 1;
    }
    ds.samples.push_back(std::move(s));
  }
  std::mt19937_64 rng(cfg.seed);
  std::shuffle(ds.samples.begin(), ds.samples.end(), rng);
  return ds;
}

}  // namespace eprop
