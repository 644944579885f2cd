#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>

#include "eprop/error.hpp"
#include "eprop/plasticity.hpp"

using namespace eprop;

namespace {

using Mat = std::array<double, 4>;  // row-major 2 x 2 over (v, a)

Mat mul(const Mat& a, const Mat& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
          a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

// e^t from the explicit sum over t' of Jacobian products
// prod_{s=t'+1..t} D^s applied to the input derivative (z^{t'-1}, 0).
double oracle_e(const std::vector<double>& psi, const std::vector<double>& z, std::size_t t,
                const TraceParams& p) {
  double ev = 0.0, ea = 0.0;
  for (std::size_t tp = 1; tp <= t; ++tp) {
    Mat prod{1.0, 0.0, 0.0, 1.0};
    for (std::size_t s = tp + 1; s <= t; ++s) {
      // Column (v, a) at s from s-1: v' = alpha v, a' = psi^{s-1} v + (rho - psi^{s-1} beta) a.
      const Mat D{p.alpha, 0.0, psi[s - 1], p.rho - psi[s - 1] * p.beta_a};
      prod = mul(D, prod);
    }
    ev += prod[0] * z[tp - 1];
    ea += prod[2] * z[tp - 1];
  }
  return psi[t] * (ev - p.beta_a * ea);
}

}  // namespace

TEST(Plasticity, EligibilityMatchesJacobianProductOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    TraceParams p{0.9 + 0.09 * u(rng), 0.99 + 0.009 * u(rng), trial % 2 ? 0.0 : u(rng), 0.95};
    const std::size_t T = 60;
    std::vector<double> psi(T + 1), z(T + 1);
    for (std::size_t t = 0; t <= T; ++t) {
      psi[t] = 0.3 * u(rng);
      z[t] = u(rng) < 0.2 ? 1.0 : 0.0;
    }
    EligibilityState e;
    for (std::size_t t = 1; t <= T; ++t) {
      const double et = advance_trace(e, z[t - 1], psi[t - 1], psi[t], p, 0.0);
      EXPECT_NEAR(et, oracle_e(psi, z, t, p), 1e-12) << "t=" << t;
    }
  }
}

TEST(Plasticity, LowPassFilterOfTrace) {
  TraceParams p{0.5, 0.0, 0.0, 0.8};
  EligibilityState e;
  double filt = 0.0, reg = 0.0;
  for (int t = 1; t <= 30; ++t) {
    const double z = (t % 3 == 0) ? 1.0 : 0.0;
    const double et = advance_trace(e, z, 1.0, 1.0, p, 0.9);
    filt = 0.8 * filt + et;
    reg = 0.9 * reg + 0.1 * et;
    EXPECT_DOUBLE_EQ(e.filt.value, filt);
    EXPECT_DOUBLE_EQ(e.reg_trace, reg);
  }
}

TEST(Plasticity, NoAdaptationComponentWithoutBeta) {
  TraceParams p{0.9, 0.99, 0.0, 0.9};
  EligibilityState e;
  for (int t = 0; t < 20; ++t) eligibility_step(e, 1.0, 0.3, p);
  EXPECT_EQ(e.eps_a, 0.0);
}

TEST(Plasticity, RegBetaPerMode) {
  RegularizationParams r;
  r.mode = RegMode::Static;
  EXPECT_EQ(reg_beta(r, 10), 0.0);
  r.mode = RegMode::Cumulative;
  EXPECT_DOUBLE_EQ(reg_beta(r, 0), 0.0);
  EXPECT_DOUBLE_EQ(reg_beta(r, 3), 0.75);
  r.mode = RegMode::Ema;
  r.beta_ema = 0.97;
  EXPECT_EQ(reg_beta(r, 5), 0.97);
}

TEST(Plasticity, CumulativeRateIsRunningMean) {
  RegularizationParams r;
  r.mode = RegMode::Cumulative;
  double f = 0.0, sum = 0.0;
  for (int t = 0; t < 40; ++t) {
    const double z = (t * 7 % 5 == 0) ? 1.0 : 0.0;
    f = rate_step(f, z, reg_beta(r, t));
    sum += z;
    EXPECT_NEAR(f, sum / (t + 1), 1e-15);
  }
}

TEST(Plasticity, EffectiveRegStrength) {
  RegularizationParams r;
  EXPECT_EQ(effective_c_reg(r, 100), 0.0);
  r.mode = RegMode::Static;
  r.c_reg = 50.0;
  EXPECT_DOUBLE_EQ(effective_c_reg(r, 100), 0.5);
  EXPECT_THROW(effective_c_reg(r, 0), ConfigError);
  r.mode = RegMode::Ema;
  EXPECT_EQ(effective_c_reg(r, 100), 50.0);
  r.c_reg = -1.0;
  EXPECT_THROW(effective_c_reg(r, 100), ConfigError);
}

TEST(Plasticity, GradientSteps) {
  EligibilityState e;
  e.filt.value = 2.0;
  EXPECT_DOUBLE_EQ(grad_step_recurrent(e, 0.5, 0.25), 1.25);
  EXPECT_DOUBLE_EQ(grad_step_input(e, 1.0), 2.0);
  EXPECT_DOUBLE_EQ(e.grad_accum, 3.25);
  FilterState zf{1.0, 0.5};
  EXPECT_DOUBLE_EQ(grad_step_output(zf, 1.0, 2.0), 3.0);
  EXPECT_DOUBLE_EQ(zf.value, 1.5);
  EXPECT_DOUBLE_EQ(reg_gradient(2.0, 0.3, 0.1, 0.5), 0.2);
}
