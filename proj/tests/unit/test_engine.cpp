#include <gtest/gtest.h>

#include <cmath>

#include "eprop/engine.hpp"
#include "eprop/experiments.hpp"
#include "eprop/verification.hpp"

using namespace eprop;

namespace {

NetworkConfig small_config() {
  NetworkConfig c;
  c.n_in = 12;
  c.n_rec = 16;
  c.n_out = 2;
  c.sample_steps = 80;
  c.lif.v_th = 0.3;
  c.in.init = WeightInit{0.2, 0.5, false};
  c.rec.init = WeightInit{0.0, 0.3, false};
  c.out.init = WeightInit{0.0, 0.3, false};
  c.opt.eta = 1e-2;
  c.seed = 3;
  return c;
}

// Labelled samples with a recall window over the last quarter.
TaskStream labelled_stream(const NetworkConfig& c) {
  return [c](std::int64_t it, int b, bool eval) {
    PatternTaskConfig pc;
    pc.T = c.sample_steps;
    pc.n_input = c.n_in;
    pc.n_readouts = c.n_out;
    pc.input_rate_hz = 60.0;
    SampleSpec s = gen_pattern_task(sample_seed(c.seed, it, b, eval), pc);
    const int label = static_cast<int>(sample_seed(7, it, b, eval) % 2);
    s.label = label;
    const auto K = static_cast<std::size_t>(c.n_out);
    for (std::int64_t t = 0; t < s.T; ++t) {
      for (std::size_t k = 0; k < K; ++k)
        s.target.values[static_cast<std::size_t>(t) * K + k] = k == static_cast<std::size_t>(label);
      s.target.window[static_cast<std::size_t>(t)] = t >= 3 * s.T / 4;
    }
    return s;
  };
}

struct TrainResult {
  std::vector<double> losses;
  std::uint64_t hash = 0;
};

TrainResult train(NetworkConfig c, SimMode mode, std::int64_t iterations) {
  c.mode = mode;
  Network net = build_network(c);
  const auto stream = labelled_stream(c);
  TrainResult r;
  for (std::int64_t it = 0; it < iterations; ++it) {
    for (int b = 0; b < c.opt.batch_size; ++b) r.losses.push_back(run_sample(net, stream(it, b, false)).loss);
    end_iteration(net);
  }
  flush_plasticity(net);
  r.hash = net.weight_hash();
  return r;
}

struct Scenario {
  const char* name;
  void (*apply)(NetworkConfig&);
};

const Scenario kScenarios[] = {
    {"gd_mse", [](NetworkConfig&) {}},
    {"cross_entropy", [](NetworkConfig& c) { c.loss = LossKind::CrossEntropy; }},
    {"adam_static_reg",
     [](NetworkConfig& c) {
       c.opt.kind = OptimizerKind::Adam;
       c.opt.eta = 1e-3;
       c.reg = RegularizationParams{RegMode::Static, 5.0, 0.01, 0.99};
     }},
    {"cumulative_reg", [](NetworkConfig& c) { c.reg = RegularizationParams{RegMode::Cumulative, 0.5, 0.01, 0.99}; }},
    {"delays_2_1", [](NetworkConfig& c) { c.delays = DelayConfig{2, 1, 64}; }},
    {"delays_0_0", [](NetworkConfig& c) { c.delays = DelayConfig{0, 0, 64}; }},
    {"batch_3", [](NetworkConfig& c) { c.opt.batch_size = 3; }},
    {"adam_batch_2",
     [](NetworkConfig& c) {
       c.opt.kind = OptimizerKind::Adam;
       c.opt.eta = 1e-3;
       c.opt.batch_size = 2;
     }},
    {"alif",
     [](NetworkConfig& c) {
       c.n_adaptive = 8;
       c.beta_a_adaptive = 0.2;
       c.tau_a_adaptive = 200.0;
     }},
    {"eprop_plus",
     [](NetworkConfig& c) {
       c = NetworkConfig::for_variant(Variant::EpropPlus, c);
       c.reg = RegularizationParams{RegMode::Ema, 0.5, 0.01, 0.95};
       c.delays.cutoff = 20;
     }},
    {"eprop_plus_adam",
     [](NetworkConfig& c) {
       c = NetworkConfig::for_variant(Variant::EpropPlus, c);
       c.opt.kind = OptimizerKind::Adam;
       c.opt.eta = 1e-3;
       c.delays = DelayConfig{2, 1, 10};
     }},
    {"no_reset", [](NetworkConfig& c) { c.reset_between_samples = false; }},
    {"input_frozen", [](NetworkConfig& c) { c.in.plastic = false; }},
};

class ModeEquivalence : public ::testing::TestWithParam<Scenario> {};

TEST_P(ModeEquivalence, LossesAndWeightsMatch) {
  NetworkConfig c = small_config();
  GetParam().apply(c);
  const TrainResult t = train(c, SimMode::TimeDriven, 4);
  const TrainResult e = train(c, SimMode::EventDriven, 4);
  ASSERT_EQ(t.losses.size(), e.losses.size());
  for (std::size_t i = 0; i < t.losses.size(); ++i) EXPECT_NEAR(t.losses[i], e.losses[i], 1e-9) << i;
  EXPECT_EQ(t.hash, e.hash);
  // Learning happened at all.
  EXPECT_NE(t.hash, build_network(c).weight_hash());
}

INSTANTIATE_TEST_SUITE_P(Scenarios, ModeEquivalence, ::testing::ValuesIn(kScenarios),
                         [](const auto& info) { return std::string(info.param.name); });

TEST(Engine, WorkerCountDoesNotChangeResults) {
  for (SimMode mode : {SimMode::EventDriven, SimMode::TimeDriven}) {
    NetworkConfig c = small_config();
    const TrainResult one = train(c, mode, 3);
    c.workers = 3;
    const TrainResult three = train(c, mode, 3);
    EXPECT_EQ(one.losses, three.losses);
    EXPECT_EQ(one.hash, three.hash);
  }
}

TEST(Engine, MiniBatchEqualsAverageOfReplicaGradients) {
  NetworkConfig c = small_config();
  c.opt.batch_size = 2;
  const auto stream = labelled_stream(c);
  Network batch = build_network(c);
  for (int b = 0; b < 2; ++b) run_sample(batch, stream(0, b, false));
  end_iteration(batch);
  flush_plasticity(batch);

  NetworkConfig rc = c;
  rc.opt.batch_size = 1;
  std::vector<Network> replicas;
  for (int b = 0; b < 2; ++b) {
    replicas.push_back(build_network(rc));
    replicas.back().apply_updates = false;
    run_sample(replicas.back(), stream(0, b, false));
    flush_plasticity(replicas.back());
  }
  const Network init = build_network(c);
  auto check = [&](SynapseGroup Network::*g) {
    for (std::size_t i = 0; i < (init.*g).syn.size(); ++i) {
      const double avg = 0.5 * ((replicas[0].*g).syn[i].grad_sum + (replicas[1].*g).syn[i].grad_sum);
      EXPECT_NEAR((batch.*g).syn[i].w, (init.*g).syn[i].w - c.opt.eta * avg, 1e-12);
    }
  };
  check(&Network::in);
  check(&Network::rec);
  check(&Network::out);
}

TEST(Engine, ProbeModeKeepsWeights) {
  NetworkConfig c = small_config();
  Network net = build_network(c);
  const auto h0 = net.weight_hash();
  net.apply_updates = false;
  const auto stream = labelled_stream(c);
  for (int it = 0; it < 3; ++it) {
    run_sample(net, stream(it, 0, false));
    end_iteration(net);
  }
  flush_plasticity(net);
  EXPECT_EQ(net.weight_hash(), h0);
  double g = 0.0;
  for (const auto& s : net.rec.syn) g += std::fabs(s.grad_sum);
  EXPECT_GT(g, 0.0);
}

TEST(Engine, EvaluationLeavesWeightsAndTrajectoryUnchanged) {
  for (Variant v : {Variant::Bsshslm2020, Variant::EpropPlus}) {
    NetworkConfig c = NetworkConfig::for_variant(v, small_config());
    const auto stream = labelled_stream(c);
    Network plain = build_network(c);
    run_training(plain, stream, 6);
    Network with_eval = build_network(c);
    std::vector<std::uint64_t> hashes;
    const auto m = run_training(with_eval, stream, 6, EvalSchedule{2, 2});
    int evals = 0;
    for (const auto& r : m.rows) evals += r.phase == "eval";
    EXPECT_EQ(evals, 6);
    if (v == Variant::Bsshslm2020) {
      EXPECT_EQ(plain.weight_hash(), with_eval.weight_hash());
    }

    Network frozen = build_network(c);
    run_training(frozen, stream, 2);
    set_plasticity(frozen, false);
    const auto h = frozen.weight_hash();
    run_sample(frozen, stream(0, 0, true));
    run_sample(frozen, stream(1, 0, true));
    EXPECT_EQ(frozen.weight_hash(), h);
  }
}

TEST(Engine, UpdateHistoriesCountEverySynapse) {
  for (Variant v : {Variant::Bsshslm2020, Variant::EpropPlus}) {
    NetworkConfig c = NetworkConfig::for_variant(v, small_config());
    c.archive_clean_every = 10;
    Network net = build_network(c);
    run_training(net, labelled_stream(c), 5);
    std::vector<int> indeg(static_cast<std::size_t>(c.n_rec), 0);
    for (const SynapseGroup* g : {&net.in, &net.rec})
      for (auto t : g->topo.tgt) ++indeg[static_cast<std::size_t>(t)];
    for (std::size_t j = 0; j < indeg.size(); ++j) {
      const auto& uh = net.archives[j].update_history();
      EXPECT_EQ(uh.total(), indeg[j]);
      EXPECT_LE(uh.size(), static_cast<std::size_t>(indeg[j]));
    }
  }
}

TEST(Engine, RecorderCapturesSpikesAndSignals) {
  NetworkConfig c = small_config();
  Network net = build_network(c);
  Recorder rec;
  rec.signals = true;
  RunOptions ro;
  ro.recorder = &rec;
  ro.forced_spikes = {{0, 5}};
  const auto res = run_sample(net, labelled_stream(c)(0, 0, false), ro);
  const auto T = static_cast<std::size_t>(c.sample_steps);
  EXPECT_EQ(rec.y.size(), T * 2);
  EXPECT_EQ(rec.L.size(), T * 16);
  EXPECT_EQ(static_cast<std::int64_t>(rec.spike_list.size()), res.spikes_recurrent);
  bool forced = false;
  for (const auto& [n, t] : rec.spike_list) forced |= n == 0 && t == 5;
  EXPECT_TRUE(forced);
  ASSERT_TRUE(res.correct.has_value());
}

TEST(Engine, ModeEquivalenceCheckOnPatternNetwork) {
  NetworkConfig c;
  c.sample_steps = 200;
  c.n_in = 20;
  c.n_rec = 20;
  c.opt.eta = 1e-2;
  PatternTaskConfig pc;
  pc.T = 200;
  pc.n_input = 20;
  const auto r = check_mode_equivalence(
      c, [&](std::int64_t, int, bool) { return gen_pattern_task(1, pc); }, 4);
  EXPECT_TRUE(r.pass) << r.detail;
}

}  // namespace
