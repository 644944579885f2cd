#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "eprop/error.hpp"
#include "eprop/optimizer.hpp"

using namespace eprop;

TEST(Optimizer, GradientDescent) {
  EXPECT_DOUBLE_EQ(gd_update(1.0, 2.0, 0.1), 0.8);
}

TEST(Optimizer, AdamFirstStepIsBiasCorrectedUnitStep) {
  OptimizerConfig c;
  c.kind = OptimizerKind::Adam;
  c.eta = 1e-3;
  AdamState s;
  const double w1 = adam_update(s, 0.0, std::vector<double>{1.0}, c);
  const double ratio = w1 / (-c.eta);
  EXPECT_GT(ratio, 0.9999);
  EXPECT_LT(ratio, 1.0001);
  EXPECT_EQ(s.t, 1);
}

TEST(Optimizer, AdamMatchesTextbookUpdate) {
  OptimizerConfig c;
  c.eta = 0.01;
  AdamState s;
  double m = 0.0, v = 0.0, sum = 0.0;
  const std::vector<double> g{0.5, -1.0, 2.0, 0.0, 0.3};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const int t = static_cast<int>(i) + 1;
    m = c.beta1 * m + (1 - c.beta1) * g[i];
    v = c.beta2 * v + (1 - c.beta2) * g[i] * g[i];
    const double eta_t = c.eta * std::sqrt(1 - std::pow(c.beta2, t)) / (1 - std::pow(c.beta1, t));
    sum += eta_t * m / (std::sqrt(v) + c.eps_hat);
  }
  EXPECT_NEAR(adam_update(s, 1.0, g, c), 1.0 - sum, 1e-15);
}

TEST(Optimizer, BatchAverage) {
  EXPECT_DOUBLE_EQ(batch_average(std::vector<double>{1.0, 2.0, 6.0}), 3.0);
  EXPECT_THROW(batch_average(std::vector<double>{}), ConfigError);
}
