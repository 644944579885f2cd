#include <gtest/gtest.h>

#include <cstring>
#include <random>

#include "eprop/algorithms.hpp"
#include "eprop/error.hpp"
#include "eprop/verification.hpp"
#include "protocols.hpp"

using namespace eprop;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

AlgoParams random_params(std::mt19937_64& rng, std::int64_t T) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  AlgoParams p;
  p.trace = TraceParams{0.9 + 0.09 * u(rng), 0.995, u(rng) < 0.5 ? 0.0 : 0.2 * u(rng), 0.9};
  p.reg.mode = static_cast<RegMode>(rng() % 4);
  p.reg.c_reg = 0.5;
  p.reg.f_target = 0.01;
  p.c_star = effective_c_reg(p.reg, T);
  p.delays.d = static_cast<int>(rng() % 3);
  p.delays.d_ls = static_cast<int>(rng() % 3);
  p.delays.cutoff = static_cast<int>(T + 1);
  p.opt.eta = 1e-2;
  return p;
}

}  // namespace

TEST(Algorithms, AccumulatingAlgorithmsAgreeBitForBit) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 30; ++i) {
    const std::int64_t T = 20 + static_cast<std::int64_t>(rng() % 150);
    const auto h = random_histories(rng, T, 0.1);
    auto p = random_params(rng, T);
    for (auto kind : {OptimizerKind::GD, OptimizerKind::Adam}) {
      p.opt.kind = kind;
      const auto a1 = time_driven_gradient(h, p, 0.3);
      const auto a3 = event_driven_update(h, p, 0.3);
      std::size_t pending = 0;
      const auto a5 = optimized_event_update(h, p, 0.3, &pending);
      EXPECT_TRUE(same_bits(a1.grad, a3.grad));
      EXPECT_TRUE(same_bits(a1.grad, a5.grad));
      EXPECT_TRUE(same_bits(a1.weight, a3.weight));
      EXPECT_TRUE(same_bits(a1.weight, a5.weight));
      EXPECT_LE(pending, static_cast<std::size_t>(p.delays.d_sync() + 2));
    }
  }
}

TEST(Algorithms, PerStepAndPerSpikeUpdatesAgree) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 30; ++i) {
    const std::int64_t T = 20 + static_cast<std::int64_t>(rng() % 150);
    const auto h = random_histories(rng, T, 0.1);
    const auto p = random_params(rng, T);
    const auto a2 = time_driven_weight_update(h, p, -0.2);
    const auto a4 = event_driven_per_spike_update(h, p, -0.2);
    EXPECT_NEAR(a2.weight, a4.weight, 1e-12);
    // GD is linear, so per-step and one-shot updates match the accumulated gradient.
    EXPECT_NEAR(a2.weight, time_driven_gradient(h, p, -0.2).weight, 1e-12);
  }
}

TEST(Algorithms, CutoffDropsLateContributions) {
  std::mt19937_64 rng(8);
  const std::int64_t T = 200;
  auto h = random_histories(rng, T, 0.02);
  AlgoParams p;
  p.trace = TraceParams{0.95, 0.0, 0.0, 0.9};
  p.delays = DelayConfig{0, 0, 5};
  const auto r = event_driven_per_spike_update(h, p, 0.0);
  std::int64_t t_prev = 0;
  for (std::int64_t t = 1; t <= T; ++t) {
    if (t > t_prev + 5) {
      EXPECT_EQ(r.contributions[t], 0.0) << t;
    }
    if (h.z[t]) t_prev = t;
  }
}

TEST(Algorithms, EquivalenceCheckPasses) {
  const auto r = check_algorithm_equivalence(21, 50);
  EXPECT_TRUE(r.pass) << r.detail;
}

class DelayAlignment : public ::testing::TestWithParam<std::pair<int, int>> {};

TEST_P(DelayAlignment, GradientAppearsAtPredictedOffsetOnly) {
  const auto [d, d_ls] = GetParam();
  std::string why;
  EXPECT_TRUE(synthetic::delay_alignment_holds(d, d_ls, &why)) << why;
  const auto pair = apply_learning_signal_delay(20, DelayConfig{d, d_ls, 64});
  EXPECT_EQ(pair.l_index, 20 - d_ls);
  EXPECT_EQ(pair.e_index, 20 - d - d_ls);
}

INSTANTIATE_TEST_SUITE_P(AllDelays, DelayAlignment,
                         ::testing::Values(std::pair{0, 0}, std::pair{0, 1}, std::pair{0, 2},
                                           std::pair{1, 0}, std::pair{1, 1}, std::pair{1, 2},
                                           std::pair{2, 0}, std::pair{2, 1}, std::pair{2, 2}));

TEST(Algorithms, ZeroDelaysReduceToBaseRule) {
  std::string why;
  EXPECT_TRUE(synthetic::zero_delay_matches_base_rule(9, 20, &why)) << why;
}

TEST(Algorithms, RejectsShortHistories) {
  SynapseHistories h;
  h.T = 5;
  h.psi.assign(3, 0.0);
  EXPECT_THROW(time_driven_gradient(h, AlgoParams{}, 0.0), ProtocolError);
  AlgoParams p;
  p.delays.d = -1;
  std::mt19937_64 rng(1);
  EXPECT_THROW(time_driven_gradient(random_histories(rng, 10, 0.1), p, 0.0), ConfigError);
}
