#include "eprop/experiments.hpp"

#include <chrono>
#include <memory>
#include <cmath>
#include <sstream>

#include "eprop/error.hpp"
#include "eprop/tasks.hpp"

namespace eprop {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

Config from_pairs(std::initializer_list<std::pair<const char*, const char*>> kv) {
  Config c;
  for (const auto& [k, v] : kv) c.set(k, v);
  return c;
}

// Keys shared by every task. Variant-implied keys (policy, reset, surrogate
// kind, regularization form) are left to the variant.
Config common_defaults() {
  return from_pairs({{"variant", "bsshslm2020"},
                     {"mode", "event-driven"},
                     {"seed", "1"},
                     {"workers", "1"},
                     {"batch_size", "1"},
                     {"neuron.dt", "1"},
                     {"neuron.tau_m", "20"},
                     {"neuron.v_th", "0.6"},
                     {"neuron.tau_out", "20"},
                     {"delays.d", "1"},
                     {"delays.d_ls", "0"},
                     {"delays.cutoff", "64"},
                     {"eval.every", "0"},
                     {"eval.iterations", "1"},
                     {"output.spikes", "false"}});
}

Config pattern_defaults() {
  Config c = common_defaults();
  c.merge(from_pairs({{"run.iterations", "300"},
                      {"network.n_in", "100"},
                      {"network.n_rec", "100"},
                      {"network.n_out", "1"},
                      {"network.n_adaptive", "0"},
                      {"loss", "mse"},
                      {"opt.kind", "gd"},
                      {"opt.eta", "3e-05"},
                      {"reg.mode", "static"},
                      {"reg.c", "300"},
                      {"reg.f_target_hz", "10"},
                      {"weights.in_std", "0.5"},
                      {"weights.rec_std", "0.5"},
                      {"weights.out_std", "1"},
                      {"weights.fb_std", "0.01"},
                      {"pattern.duration", "1000"},
                      {"pattern.input_rate_hz", "50"},
                      {"pattern.amp_min", "0.5"},
                      {"pattern.amp_max", "2"},
                      {"pattern.target_scale", "1"}}));
  return c;
}

Config evidence_defaults() {
  Config c = common_defaults();
  c.merge(from_pairs({{"run.iterations", "150"},
                      {"batch_size", "8"},
                      {"network.n_rec", "50"},
                      {"network.n_out", "2"},
                      {"network.n_adaptive", "25"},
                      {"neuron.beta_a", "0.0174"},
                      {"neuron.tau_a", "2000"},
                      {"loss", "cross-entropy"},
                      {"opt.kind", "adam"},
                      {"opt.eta", "0.0001"},
                      {"reg.mode", "static"},
                      {"reg.c", "30000"},
                      {"reg.f_target_hz", "10"},
                      {"weights.in_std", "1.5"},
                      {"weights.rec_std", "0.3"},
                      {"weights.out_std", "1"},
                      {"evidence.n_cues", "3"},
                      {"evidence.cue_duration", "100"},
                      {"evidence.inter_cue", "50"},
                      {"evidence.delay", "200"},
                      {"evidence.recall", "100"},
                      {"evidence.n_left", "10"},
                      {"evidence.n_right", "10"},
                      {"evidence.n_background", "10"},
                      {"evidence.n_recall", "10"},
                      {"evidence.cue_rate_hz", "40"},
                      {"evidence.background_rate_hz", "10"},
                      {"evidence.recall_rate_hz", "40"}}));
  return c;
}

Config nmnist_defaults() {
  Config c = common_defaults();
  c.merge(from_pairs({{"run.iterations", "200"},
                      {"network.n_rec", "100"},
                      {"network.n_adaptive", "0"},
                      {"loss", "cross-entropy"},
                      {"opt.kind", "gd"},
                      {"opt.eta", "5e-06"},
                      {"reg.mode", "static"},
                      {"reg.c", "3000"},
                      {"reg.f_target_hz", "10"},
                      {"weights.in_std", "0.3"},
                      {"weights.rec_std", "0.3"},
                      {"weights.out_std", "0.05"},
                      {"nmnist.digits", "0,1"},
                      {"nmnist.split", "Train"},
                      {"nmnist.max_per_class", "250"},
                      {"nmnist.duration", "300"},
                      {"nmnist.keep_fraction", "0.9"},
                      {"nmnist.window_start", "0"}}));
  return c;
}

struct TaskSetup {
  NetworkConfig net;
  TaskStream stream;
  std::vector<std::pair<std::string, std::string>> results;
};

NetworkConfig network_for(const Config& c) {
  return NetworkConfig::from(c, NetworkConfig::for_variant(
                                    parse_variant(c.get_string("variant", "bsshslm2020")),
                                    NetworkConfig{}));
}

}  // namespace

std::uint64_t sample_seed(std::uint64_t seed, std::int64_t iteration, int index, bool eval) {
  // splitmix64 finalizer over a packed key
  std::uint64_t x = seed * 0x9E3779B97F4A7C15ull ^
                    (static_cast<std::uint64_t>(iteration) << 20) ^
                    (static_cast<std::uint64_t>(index) << 1) ^ (eval ? 1u : 0u);
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

Config builtin_defaults(const std::string& task) {
  if (task == kPatternGeneration) return pattern_defaults();
  if (task == kEvidenceAccumulation) return evidence_defaults();
  if (task == kNmnist) return nmnist_defaults();
  throw ConfigError("unknown task '" + task + "'");
}

ExperimentOutput run_experiment(const std::string& task, const Config& cfg,
                                const std::string& dataset_path) {
  Config c = builtin_defaults(task);
  c.merge(cfg);
  TaskSetup setup;
  setup.net = network_for(c);
  const std::uint64_t seed = setup.net.seed;

  if (task == kPatternGeneration) {
    PatternTaskConfig pc = PatternTaskConfig::from(c);
    // Frozen input and target: the same sample every iteration.
    auto sample = std::make_shared<SampleSpec>(gen_pattern_task(seed, pc));
    setup.net.n_in = pc.n_input;
    setup.net.n_out = pc.n_readouts;
    setup.net.sample_steps = pc.T;
    setup.stream = [sample](std::int64_t, int, bool) { return *sample; };
  } else if (task == kEvidenceAccumulation) {
    const EvidenceTaskConfig ec = EvidenceTaskConfig::from(c);
    setup.net.n_in = ec.n_input();
    setup.net.n_out = 2;
    setup.net.sample_steps = ec.duration();
    setup.stream = [ec, seed](std::int64_t it, int b, bool eval) {
      return gen_evidence_task(sample_seed(seed, it, b, eval), ec);
    };
  } else {
    if (dataset_path.empty()) throw ConfigError("nmnist needs a dataset path");
    const NmnistConfig nc = NmnistConfig::from(c);
    auto data = std::make_shared<NmnistDataset>(load_nmnist(dataset_path, nc));
    if (data->samples.empty()) throw ConfigError("no N-MNIST samples under " + dataset_path);
    setup.net.n_in = static_cast<int>(data->pixels.size());
    setup.net.n_out = static_cast<int>(nc.digits.size());
    setup.net.sample_steps = nc.duration;
    const int B = setup.net.opt.batch_size;
    setup.stream = [data, B](std::int64_t it, int b, bool) {
      const auto n = static_cast<std::int64_t>(data->samples.size());
      return data->samples[static_cast<std::size_t>((it * B + b) % n)];
    };
    setup.results.emplace_back("nmnist.samples", std::to_string(data->samples.size()));
    setup.results.emplace_back("nmnist.input_pixels", std::to_string(data->pixels.size()));
    setup.results.emplace_back("nmnist.event_floor", std::to_string(data->event_floor));
    setup.results.emplace_back("nmnist.on_events_kept",
                               std::to_string(data->on_events_kept) + "/" +
                                   std::to_string(data->on_events_total));
  }
  setup.net.validate();

  ExperimentOutput out;
  out.task = task;
  out.net = setup.net;
  out.config = c;
  out.config.merge(setup.net.to_config());
  out.results = setup.results;

  const std::int64_t iterations = c.get_int("run.iterations", 1);
  EvalSchedule eval;
  eval.every = c.get_int("eval.every", 0);
  eval.iterations = static_cast<int>(c.get_int("eval.iterations", 1));

  Network net = build_network(setup.net);
  out.metrics = run_training(net, setup.stream, iterations, eval);

  if (c.get_bool("output.spikes", false)) {
    set_plasticity(net, false);
    Recorder rec;
    RunOptions ro;
    ro.recorder = &rec;
    run_sample(net, setup.stream(iterations, 0, true), ro);
    out.spikes = std::move(rec.spike_list);
  }

  out.results.emplace_back("runtime_s", num(out.metrics.runtime_s));
  out.results.emplace_back("simulated_s", num(out.metrics.simulated_s));
  out.results.emplace_back("real_time_factor", num(out.metrics.real_time_factor()));
  out.results.emplace_back("weight_hash", std::to_string(net.weight_hash()));
  if (!out.metrics.rows.empty()) {
    out.results.emplace_back("final_loss", num(out.metrics.rows.back().loss));
    out.results.emplace_back("final_prediction_error",
                             num(out.metrics.rows.back().prediction_error));
  }

  for (const auto& r : out.metrics.rows)
    if (!std::isfinite(r.loss)) {
      out.failed_checks.push_back("non-finite loss at iteration " + std::to_string(r.iteration));
      break;
    }
  for (const SynapseGroup* g : {&net.in, &net.rec, &net.out})
    for (const auto& s : g->syn)
      if (!std::isfinite(s.w)) {
        out.failed_checks.push_back("non-finite weight");
        return out;
      }
  return out;
}

}  // namespace eprop
