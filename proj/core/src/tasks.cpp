#include "eprop/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <unordered_set>

#include "eprop/error.hpp"
#include "eprop/neuron.hpp"

namespace eprop {

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

namespace {

void append_poisson(std::mt19937_64& rng, std::vector<std::int64_t>& out, std::int64_t t0,
                    std::int64_t t1, double rate_hz, double dt) {
  const double p = rate_hz * dt / 1000.0;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::int64_t t = t0; t < t1; ++t)
    if (u(rng) < p) out.push_back(t);
}

}  // namespace

void SampleSpec::validate() const {
  if (T <= 0) throw ConfigError("sample duration must be positive");
  for (const auto& ch : input_spikes) {
    for (std::size_t i = 0; i < ch.size(); ++i) {
      if (ch[i] < 0 || ch[i] >= T) throw ConfigError("input spike outside [0, T)");
      if (i && ch[i] <= ch[i - 1]) throw ConfigError("input spike times not increasing");
    }
  }
  if (target.values.size() != static_cast<std::size_t>(T) * target.K ||
      target.window.size() != static_cast<std::size_t>(T))
    throw ConfigError("target length does not match T");
}

std::vector<unsigned char> SampleSpec::raster() const {
  const std::size_t I = input_spikes.size();
  std::vector<unsigned char> r(static_cast<std::size_t>(T) * I, 0);
  for (std::size_t i = 0; i < I; ++i)
    for (std::int64_t t : input_spikes[i]) r[static_cast<std::size_t>(t) * I + i] = 1;
  return r;
}

std::vector<std::int64_t> poisson_train(std::uint64_t seed, std::int64_t T, double rate_hz,
                                        double dt) {
  auto rng = make_rng(seed, 0x9017);
  std::vector<std::int64_t> out;
  append_poisson(rng, out, 0, T, rate_hz, dt);
  return out;
}

PatternTaskConfig PatternTaskConfig::from(const Config& c) {
  PatternTaskConfig p;
  p.T = c.get_int("pattern.duration", p.T);
  p.n_input = static_cast<int>(c.get_int("network.n_in", p.n_input));
  p.n_readouts = static_cast<int>(c.get_int("network.n_out", p.n_readouts));
  p.dt = c.get_double("neuron.dt", p.dt);
  p.input_rate_hz = c.get_double("pattern.input_rate_hz", p.input_rate_hz);
  p.amp_min = c.get_double("pattern.amp_min", p.amp_min);
  p.amp_max = c.get_double("pattern.amp_max", p.amp_max);
  p.target_scale = c.get_double("pattern.target_scale", p.target_scale);
  return p;
}

SampleSpec gen_pattern_task(std::uint64_t seed, const PatternTaskConfig& cfg) {
  if (cfg.T <= 0 || cfg.n_input < 0 || cfg.n_readouts < 1)
    throw ConfigError("invalid pattern task dimensions");
  SampleSpec s;
  s.T = cfg.T;
  auto rng = make_rng(seed, 1);
  s.input_spikes.resize(static_cast<std::size_t>(cfg.n_input));
  for (auto& ch : s.input_spikes) append_poisson(rng, ch, 0, cfg.T, cfg.input_rate_hz, cfg.dt);

  const std::size_t K = static_cast<std::size_t>(cfg.n_readouts);
  s.target.K = K;
  s.target.values.assign(static_cast<std::size_t>(cfg.T) * K, 0.0);
  s.target.window.assign(static_cast<std::size_t>(cfg.T), 1);
  std::uniform_real_distribution<double> amp(cfg.amp_min, cfg.amp_max);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  for (std::size_t k = 0; k < K; ++k) {
    std::array<double, 4> a{}, ph{};
    for (std::size_t i = 0; i < 4; ++i) {
      a[i] = amp(rng);
      ph[i] = phase(rng);
    }
    for (std::int64_t t = 0; t < cfg.T; ++t) {
      const double sec = static_cast<double>(t) * cfg.dt / 1000.0;
      double y = 0.0;
      for (std::size_t i = 0; i < 4; ++i)
        y += a[i] * std::sin(2.0 * std::numbers::pi * cfg.freqs_hz[i] * sec + ph[i]);
      s.target.values[static_cast<std::size_t>(t) * K + k] = cfg.target_scale * y;
    }
  }
  return s;
}

EvidenceTaskConfig EvidenceTaskConfig::from(const Config& c) {
  EvidenceTaskConfig e;
  e.n_cues = static_cast<int>(c.get_int("evidence.n_cues", e.n_cues));
  e.cue_duration = c.get_int("evidence.cue_duration", e.cue_duration);
  e.inter_cue = c.get_int("evidence.inter_cue", e.inter_cue);
  e.delay = c.get_int("evidence.delay", e.delay);
  e.recall = c.get_int("evidence.recall", e.recall);
  e.n_left = static_cast<int>(c.get_int("evidence.n_left", e.n_left));
  e.n_right = static_cast<int>(c.get_int("evidence.n_right", e.n_right));
  e.n_background = static_cast<int>(c.get_int("evidence.n_background", e.n_background));
  e.n_recall = static_cast<int>(c.get_int("evidence.n_recall", e.n_recall));
  e.cue_rate_hz = c.get_double("evidence.cue_rate_hz", e.cue_rate_hz);
  e.background_rate_hz = c.get_double("evidence.background_rate_hz", e.background_rate_hz);
  e.recall_rate_hz = c.get_double("evidence.recall_rate_hz", e.recall_rate_hz);
  e.dt = c.get_double("neuron.dt", e.dt);
  return e;
}

std::int64_t EvidenceTaskConfig::duration() const {
  return n_cues * (cue_duration + inter_cue) + delay + recall;
}

SampleSpec gen_evidence_task(std::uint64_t seed, const EvidenceTaskConfig& cfg) {
  if (cfg.n_cues < 1) throw ConfigError("evidence task needs at least one cue");
  auto rng = make_rng(seed, 2);
  std::bernoulli_distribution side(0.5);
  std::vector<int> cues(static_cast<std::size_t>(cfg.n_cues));
  int n_right = 0;
  do {
    n_right = 0;
    for (int& c : cues) {
      c = side(rng) ? 1 : 0;
      n_right += c;
    }
  } while (2 * n_right == cfg.n_cues);

  SampleSpec s;
  s.T = cfg.duration();
  s.label = 2 * n_right > cfg.n_cues ? 1 : 0;
  s.input_spikes.resize(static_cast<std::size_t>(cfg.n_input()));
  const std::int64_t recall_start = s.T - cfg.recall;
  int ch = 0;
  for (int pop = 0; pop < 2; ++pop) {
    const int n = pop == 0 ? cfg.n_left : cfg.n_right;
    for (int i = 0; i < n; ++i, ++ch) {
      auto& out = s.input_spikes[static_cast<std::size_t>(ch)];
      for (int c = 0; c < cfg.n_cues; ++c) {
        if (cues[static_cast<std::size_t>(c)] != pop) continue;
        const std::int64_t t0 = c * (cfg.cue_duration + cfg.inter_cue);
        append_poisson(rng, out, t0, t0 + cfg.cue_duration, cfg.cue_rate_hz, cfg.dt);
      }
    }
  }
  for (int i = 0; i < cfg.n_background; ++i, ++ch)
    append_poisson(rng, s.input_spikes[static_cast<std::size_t>(ch)], 0, s.T,
                   cfg.background_rate_hz, cfg.dt);
  for (int i = 0; i < cfg.n_recall; ++i, ++ch)
    append_poisson(rng, s.input_spikes[static_cast<std::size_t>(ch)], recall_start, s.T,
                   cfg.recall_rate_hz, cfg.dt);

  s.target.K = 2;
  s.target.values.assign(static_cast<std::size_t>(s.T) * 2, 0.0);
  s.target.window.assign(static_cast<std::size_t>(s.T), 0);
  for (std::int64_t t = 0; t < s.T; ++t) {
    s.target.values[static_cast<std::size_t>(t) * 2 + static_cast<std::size_t>(*s.label)] = 1.0;
    if (t >= recall_start) s.target.window[static_cast<std::size_t>(t)] = 1;
  }
  return s;
}

ScalingConfig ScalingConfig::from(const Config& c) {
  ScalingConfig s;
  s.scale = static_cast<int>(c.get_int("scaling.scale", s.scale));
  s.n_rec = c.get_int("scaling.n_rec", s.n_rec);
  s.n_in = c.get_int("scaling.n_in", s.n_in);
  s.n_out = c.get_int("scaling.n_out", s.n_out);
  s.indeg_in = c.get_int("scaling.indeg_in", s.indeg_in);
  s.indeg_rec = c.get_int("scaling.indeg_rec", s.indeg_rec);
  s.indeg_out = c.get_int("scaling.indeg_out", s.indeg_out);
  s.outdeg_fb = c.get_int("scaling.outdeg_fb", s.outdeg_fb);
  s.rate_hz = c.get_double("scaling.rate_hz", s.rate_hz);
  s.input_rate_hz = c.get_double("scaling.input_rate_hz", s.input_rate_hz);
  s.dt = c.get_double("neuron.dt", s.dt);
  s.steps = c.get_int("scaling.steps", s.steps);
  s.seed = static_cast<std::uint64_t>(c.get_int("seed", static_cast<std::int64_t>(s.seed)));
  return s;
}

Projection fixed_indegree(std::int64_t n_src, std::int64_t n_tgt, std::int64_t indegree,
                          bool same_population, std::uint64_t seed) {
  const std::int64_t available = same_population ? n_src - 1 : n_src;
  if (indegree < 0) throw ConfigError("in-degree must be non-negative");
  if (indegree > available)
    throw ConfigError("in-degree exceeds the source population; multapses would be required");
  auto rng = make_rng(seed, 3);
  std::uniform_int_distribution<std::int64_t> pick(0, std::max<std::int64_t>(n_src - 1, 0));
  std::vector<std::vector<std::int64_t>> by_src(static_cast<std::size_t>(n_src));
  std::vector<std::int64_t> chosen;
  std::unordered_set<std::int64_t> seen;
  for (std::int64_t j = 0; j < n_tgt; ++j) {
    chosen.clear();
    seen.clear();
    if (indegree == available) {
      for (std::int64_t i = 0; i < n_src; ++i)
        if (!(same_population && i == j)) chosen.push_back(i);
    } else {
      while (static_cast<std::int64_t>(chosen.size()) < indegree) {
        const std::int64_t i = pick(rng);
        if (same_population && i == j) continue;
        if (seen.insert(i).second) chosen.push_back(i);
      }
    }
    for (std::int64_t i : chosen) by_src[static_cast<std::size_t>(i)].push_back(j);
  }
  Projection p;
  p.n_src = n_src;
  p.n_tgt = n_tgt;
  p.ptr.assign(static_cast<std::size_t>(n_src) + 1, 0);
  for (std::int64_t i = 0; i < n_src; ++i) {
    const auto& v = by_src[static_cast<std::size_t>(i)];
    p.ptr[static_cast<std::size_t>(i) + 1] = p.ptr[static_cast<std::size_t>(i)] +
                                              static_cast<std::int64_t>(v.size());
    p.tgt.insert(p.tgt.end(), v.begin(), v.end());
  }
  p.weight.assign(p.tgt.size(), 0.0);
  return p;
}

Projection fixed_outdegree(std::int64_t n_src, std::int64_t n_tgt, std::int64_t outdegree,
                           std::uint64_t seed) {
  if (outdegree < 0 || outdegree > n_tgt)
    throw ConfigError("out-degree exceeds the target population; multapses would be required");
  auto rng = make_rng(seed, 4);
  std::vector<std::int64_t> all(static_cast<std::size_t>(n_tgt));
  for (std::int64_t j = 0; j < n_tgt; ++j) all[static_cast<std::size_t>(j)] = j;
  Projection p;
  p.n_src = n_src;
  p.n_tgt = n_tgt;
  p.ptr.assign(static_cast<std::size_t>(n_src) + 1, 0);
  for (std::int64_t i = 0; i < n_src; ++i) {
    std::vector<std::int64_t> pick;
    std::sample(all.begin(), all.end(), std::back_inserter(pick), outdegree, rng);
    p.ptr[static_cast<std::size_t>(i) + 1] = p.ptr[static_cast<std::size_t>(i)] + outdegree;
    p.tgt.insert(p.tgt.end(), pick.begin(), pick.end());
  }
  p.weight.assign(p.tgt.size(), 0.0);
  return p;
}

std::size_t ScalingNetwork::n_neurons() const {
  return static_cast<std::size_t>(input.n_src + recurrent.n_src + output.n_tgt);
}

std::size_t ScalingNetwork::n_synapses() const {
  return input.n_synapses() + recurrent.n_synapses() + output.n_synapses() +
         feedback.n_synapses();
}

ScalingNetwork gen_scaling_network(const ScalingConfig& in) {
  if (in.scale < 1) throw ConfigError("scale must be >= 1");
  ScalingNetwork net;
  net.cfg = in;
  auto& c = net.cfg;
  c.n_rec *= c.scale;
  c.n_in *= c.scale;
  c.n_out *= c.scale;
  net.period = ignore_and_fire_period(c.rate_hz, c.dt);
  auto rng = make_rng(c.seed, 5);
  std::uniform_int_distribution<std::int64_t> ph(0, net.period - 1);
  net.phases.resize(static_cast<std::size_t>(c.n_rec));
  for (auto& p : net.phases) p = ph(rng);
  net.input = fixed_indegree(c.n_in, c.n_rec, c.indeg_in, false, c.seed * 4 + 0);
  net.recurrent = fixed_indegree(c.n_rec, c.n_rec, c.indeg_rec, true, c.seed * 4 + 1);
  net.output = fixed_indegree(c.n_rec, c.n_out, c.indeg_out, false, c.seed * 4 + 2);
  net.feedback = fixed_outdegree(c.n_out, c.n_rec, c.outdeg_fb, c.seed * 4 + 3);
  std::normal_distribution<double> w(0.0, 1.0);
  for (Projection* p : {&net.input, &net.recurrent, &net.output, &net.feedback}) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(std::max<std::int64_t>(p->n_src, 1)));
    for (double& x : p->weight) x = w(rng) * scale;
  }
  return net;
}

}  // namespace eprop
