#include "eprop/scaling.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

namespace eprop {

std::uint64_t spike_hash(const std::vector<std::pair<std::int64_t, std::int64_t>>& spikes) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xFF;
      h *= 1099511628211ull;
    }
  };
  for (const auto& [n, t] : spikes) {
    mix(static_cast<std::uint64_t>(n));
    mix(static_cast<std::uint64_t>(t));
  }
  return h;
}

Network scaling_network(const ScalingNetwork& topo, int workers, bool plastic,
                        const ScalingOptions& opt) {
  const ScalingConfig& sc = topo.cfg;
  NetworkConfig c = NetworkConfig::for_variant(Variant::EpropPlus, NetworkConfig{});
  c.n_in = static_cast<int>(sc.n_in);
  c.n_rec = static_cast<int>(sc.n_rec);
  c.n_out = static_cast<int>(sc.n_out);
  c.model = NeuronModel::IgnoreAndFire;
  c.iaf_rate_hz = sc.rate_hz;
  c.lif.dt = sc.dt;
  c.loss = LossKind::MSE;
  c.reg.mode = RegMode::Off;
  c.opt.kind = OptimizerKind::GD;
  c.opt.eta = opt.eta;
  c.delays.cutoff = opt.cutoff;
  c.in.plastic = false;
  c.out.plastic = false;
  c.rec.plastic = plastic;
  c.sample_steps = sc.steps;
  c.seed = sc.seed;
  c.workers = workers;
  c.archive_clean_every = opt.archive_clean_every;
  Network net = build_network(c, topo.input, topo.recurrent, topo.output, topo.feedback);
  for (std::size_t j = 0; j < net.iaf.size(); ++j) net.iaf[j].phase = topo.phases[j];
  net.plastic = plastic;
  return net;
}

SampleSpec scaling_sample(const ScalingConfig& cfg) {
  SampleSpec s;
  s.T = cfg.steps;
  s.input_spikes.resize(static_cast<std::size_t>(cfg.n_in));
  for (std::size_t i = 0; i < s.input_spikes.size(); ++i)
    s.input_spikes[i] = poisson_train(cfg.seed * 1000003ull + i, cfg.steps, cfg.input_rate_hz, cfg.dt);
  const auto K = static_cast<std::size_t>(cfg.n_out);
  s.target.K = K;
  s.target.values.resize(static_cast<std::size_t>(cfg.steps) * K);
  s.target.window.assign(static_cast<std::size_t>(cfg.steps), 1);
  for (std::int64_t t = 0; t < cfg.steps; ++t)
    for (std::size_t k = 0; k < K; ++k)
      s.target.values[static_cast<std::size_t>(t) * K + k] =
          std::sin(2.0 * std::numbers::pi * (static_cast<double>(t) * cfg.dt / 1000.0 +
                                             static_cast<double>(k) / static_cast<double>(K)));
  return s;
}

std::vector<ScalingRow> run_scaling_benchmark(const ScalingConfig& base, const ScalingOptions& opt) {
  using clock = std::chrono::steady_clock;
  std::vector<ScalingRow> rows;
  for (int w : opt.workers) {
    ScalingConfig cfg = base;
    if (opt.layout == ScalingLayout::Weak) cfg.scale = base.scale * w;
    for (bool plastic : {false, true}) {
      if ((plastic && !opt.plastic_run) || (!plastic && !opt.static_run)) continue;
      const auto b0 = clock::now();
      const ScalingNetwork topo = gen_scaling_network(cfg);
      Network net = scaling_network(topo, w, plastic, opt);
      const SampleSpec sample = scaling_sample(topo.cfg);
      ScalingRow r;
      r.workers = w;
      r.scale = cfg.scale;
      r.plastic = plastic;
      r.n_neurons = topo.n_neurons();
      r.n_synapses = topo.n_synapses();
      r.build_s = std::chrono::duration<double>(clock::now() - b0).count();
      Recorder rec;
      RunOptions ro;
      ro.recorder = &rec;
      const auto t0 = clock::now();
      const SampleResult res = run_sample(net, sample, ro);
      if (plastic) flush_plasticity(net);
      r.runtime_s = std::chrono::duration<double>(clock::now() - t0).count();
      r.simulated_s = static_cast<double>(topo.cfg.steps) * topo.cfg.dt / 1000.0;
      r.real_time_factor = r.runtime_s > 0.0 ? r.simulated_s / r.runtime_s : 0.0;
      r.spikes_recurrent = res.spikes_recurrent;
      r.rate_hz = static_cast<double>(res.spikes_recurrent) /
                  (static_cast<double>(topo.cfg.n_rec) * r.simulated_s);
      r.spike_hash = spike_hash(rec.spike_list);
      rows.push_back(r);
    }
  }
  return rows;
}

}  // namespace eprop
