#include "eprop/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "eprop/tasks.hpp"

namespace eprop {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

// Independent recursion for e_ji^t of one synapse, steps 0..T-1.
std::vector<double> oracle_eligibility(const std::vector<double>& u, const std::vector<double>& psi,
                                       const TraceParams& p) {
  std::vector<double> e(u.size(), 0.0);
  double ev = 0.0, ea = 0.0, psi_prev = 0.0;
  for (std::size_t t = 0; t < u.size(); ++t) {
    const double ev_old = ev;
    ev = p.alpha * ev + u[t];
    ea = p.beta_a != 0.0 ? psi_prev * ev_old + (p.rho - psi_prev * p.beta_a) * ea : 0.0;
    e[t] = psi[t] * (ev - p.beta_a * ea);
    psi_prev = psi[t];
  }
  return e;
}

// sum_t' x[t'] * sum_{t >= t'} s[t] * gamma^(t - t')
double future_sum(const std::vector<double>& x, const std::vector<double>& s, double gamma) {
  double total = 0.0;
  const std::size_t T = x.size();
  for (std::size_t tp = 0; tp < T; ++tp) {
    if (x[tp] == 0.0) continue;
    double inner = 0.0;
    double g = 1.0;
    for (std::size_t t = tp; t < T; ++t) {
      inner += s[t] * g;
      g *= gamma;
    }
    total += x[tp] * inner;
  }
  return total;
}

SampleSpec random_sample(std::mt19937_64& rng, std::int64_t T, int I, int K, double rate_hz) {
  SampleSpec s;
  s.T = T;
  s.input_spikes.resize(static_cast<std::size_t>(I));
  for (auto& ch : s.input_spikes) ch = poisson_train(rng(), T, rate_hz, 1.0);
  s.target.K = static_cast<std::size_t>(K);
  std::normal_distribution<double> n(0.0, 1.0);
  s.target.values.resize(static_cast<std::size_t>(T * K));
  for (double& v : s.target.values) v = n(rng);
  s.target.window.assign(static_cast<std::size_t>(T), 1);
  return s;
}

}  // namespace

SynapseHistories random_histories(std::mt19937_64& rng, std::int64_t T, double p_spike) {
  SynapseHistories h;
  h.T = T;
  const auto n = static_cast<std::size_t>(T + 1);
  std::uniform_real_distribution<double> psi(0.0, 0.3), f(0.0, 0.05);
  std::normal_distribution<double> L(0.0, 1.0);
  std::bernoulli_distribution z(p_spike);
  h.psi.resize(n);
  h.L.resize(n);
  h.f.resize(n);
  h.z.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    h.psi[t] = t == 0 ? 0.0 : psi(rng);
    h.L[t] = t == 0 ? 0.0 : L(rng);
    h.f[t] = t == 0 ? 0.0 : f(rng);
    h.z[t] = z(rng) ? 1 : 0;
  }
  return h;
}

CheckResult check_algorithm_equivalence(std::uint64_t seed, int instances) {
  const auto t0 = clock_type::now();
  CheckResult r;
  r.name = "algorithm equivalence";
  r.tolerance = 1e-12;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> T_d(20, 200);
  std::uniform_int_distribution<int> delay(0, 2), mode(0, 3);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  int bitwise_fail = 0;
  double worst_w = 0.0;
  for (int n = 0; n < instances; ++n) {
    const std::int64_t T = T_d(rng);
    const SynapseHistories h = random_histories(rng, T, 0.02 + 0.3 * u01(rng));
    AlgoParams p;
    p.trace.alpha = 0.8 + 0.19 * u01(rng);
    p.trace.rho = 0.9 + 0.099 * u01(rng);
    p.trace.beta_a = u01(rng) < 0.5 ? 0.0 : 2.0 * u01(rng);
    p.trace.kappa_e = 0.8 + 0.19 * u01(rng);
    p.reg.mode = static_cast<RegMode>(mode(rng));
    p.reg.c_reg = u01(rng);
    p.reg.f_target = 0.01;
    p.reg.beta_ema = 0.9 + 0.09 * u01(rng);
    p.c_star = p.reg.mode == RegMode::Off ? 0.0 : effective_c_reg(p.reg, T);
    p.delays.d = delay(rng);
    p.delays.d_ls = delay(rng);
    p.delays.cutoff = static_cast<int>(T + 1);
    p.opt.kind = OptimizerKind::GD;
    p.opt.eta = 1e-2;
    const double w0 = u01(rng) - 0.5;
    const double g1 = time_driven_gradient(h, p, w0).grad;
    const double g3 = event_driven_update(h, p, w0).grad;
    const double g5 = optimized_event_update(h, p, w0).grad;
    if (!(g1 == g3 && g3 == g5)) ++bitwise_fail;
    const double w2 = time_driven_weight_update(h, p, w0).weight;
    const double w4 = event_driven_per_spike_update(h, p, w0).weight;
    worst_w = std::max(worst_w, std::fabs(w2 - w4));
  }
  r.value = worst_w;
  r.pass = bitwise_fail == 0 && worst_w < r.tolerance;
  r.detail = std::to_string(instances - bitwise_fail) + "/" + std::to_string(instances) +
             " accumulating updates bitwise equal; max |per-step - per-spike weight| = " + fmt(worst_w);
  r.seconds = seconds_since(t0);
  return r;
}

CheckResult check_online_offline(std::uint64_t seed, int trials, double tol) {
  const auto t0 = clock_type::now();
  CheckResult r;
  r.name = "online/offline gradient";
  r.tolerance = tol;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> Jd(2, 8), Id(1, 8), Kd(1, 3), sur(0, 3), loss(0, 2);
  std::uniform_int_distribution<std::int64_t> Td(10, 50);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double worst = 0.0;
  int silent = 0;
  for (int n = 0; n < trials; ++n) {
    NetworkConfig c;
    c.n_in = Id(rng);
    c.n_rec = Jd(rng);
    c.n_out = Kd(rng);
    c.n_adaptive = std::uniform_int_distribution<int>(0, c.n_rec)(rng);
    c.beta_a_adaptive = 0.5 + 1.5 * u01(rng);
    c.tau_a_adaptive = 50.0 + 200.0 * u01(rng);
    c.lif.surrogate.kind = static_cast<SurrogateKind>(sur(rng));
    c.lif.v_th = 0.3;
    c.loss = static_cast<LossKind>(loss(rng));
    c.delays = DelayConfig{0, 0, 64};
    c.sample_steps = Td(rng);
    c.in.init = WeightInit{0.4, 0.4, false};
    c.rec.init = WeightInit{0.0, 0.5, false};
    c.out.init = WeightInit{0.0, 0.5, false};
    c.mode = n % 2 ? SimMode::EventDriven : SimMode::TimeDriven;
    c.seed = rng();
    Network net = build_network(c);
    net.apply_updates = false;
    const SampleSpec s = random_sample(rng, c.sample_steps, c.n_in, c.n_out, 200.0);
    Recorder rec;
    rec.signals = true;
    RunOptions ro;
    ro.recorder = &rec;
    const SampleResult res = run_sample(net, s, ro);
    flush_plasticity(net);
    if (res.spikes_recurrent == 0) ++silent;

    const auto T = static_cast<std::size_t>(c.sample_steps);
    const auto J = static_cast<std::size_t>(c.n_rec);
    const auto K = static_cast<std::size_t>(c.n_out);
    const auto raster = s.raster();
    auto column = [&](const auto& v, std::size_t stride, std::size_t col) {
      std::vector<double> out(T);
      for (std::size_t t = 0; t < T; ++t) out[t] = static_cast<double>(v[t * stride + col]);
      return out;
    };
    std::vector<std::vector<double>> E(K);
    for (std::size_t k = 0; k < K; ++k) E[k] = column(rec.E, K, k);
    double max_ref = 0.0, max_diff = 0.0;
    auto compare = [&](double engine, double oracle) {
      max_ref = std::max(max_ref, std::fabs(oracle));
      max_diff = std::max(max_diff, std::fabs(engine - oracle));
    };
    for (SynapseGroup* g : {&net.in, &net.rec}) {
      const bool input = g == &net.in;
      for (std::int64_t i = 0; i < g->topo.n_src; ++i)
        for (std::int64_t sidx = g->topo.ptr[static_cast<std::size_t>(i)];
             sidx < g->topo.ptr[static_cast<std::size_t>(i) + 1]; ++sidx) {
          const auto j = static_cast<std::size_t>(g->topo.tgt[static_cast<std::size_t>(sidx)]);
          std::vector<double> u(T, 0.0);
          for (std::size_t t = 0; t < T; ++t)
            u[t] = input ? raster[t * static_cast<std::size_t>(c.n_in) + static_cast<std::size_t>(i)]
                         : (t ? rec.z[(t - 1) * J + static_cast<std::size_t>(i)] : 0);
          const auto e = oracle_eligibility(u, column(rec.psi, J, j), net.trace[j]);
          double oracle = 0.0;
          for (std::size_t k = 0; k < K; ++k)
            oracle += net.B[j * K + k] * future_sum(e, E[k], net.trace[j].kappa_e);
          compare(g->syn[static_cast<std::size_t>(sidx)].grad_sum, oracle);
        }
    }
    for (std::int64_t i = 0; i < net.out.topo.n_src; ++i)
      for (std::int64_t sidx = net.out.topo.ptr[static_cast<std::size_t>(i)];
           sidx < net.out.topo.ptr[static_cast<std::size_t>(i) + 1]; ++sidx) {
        const auto k = static_cast<std::size_t>(net.out.topo.tgt[static_cast<std::size_t>(sidx)]);
        const auto z = column(rec.z, J, static_cast<std::size_t>(i));
        compare(net.out.syn[static_cast<std::size_t>(sidx)].grad_sum, future_sum(z, E[k], net.kappa));
      }
    const double rel = max_ref > 0.0 ? max_diff / max_ref : max_diff;
    worst = std::max(worst, rel);
  }
  r.value = worst;
  r.pass = worst < tol;
  r.detail = std::to_string(trials) + " trials, max relative difference " + fmt(worst) +
             (silent ? ", " + std::to_string(silent) + " trials without recurrent spikes" : "");
  r.seconds = seconds_since(t0);
  return r;
}

CheckResult check_readout_finite_differences(std::uint64_t seed, int entries, double h,
                                             double tol) {
  const auto t0 = clock_type::now();
  CheckResult r;
  r.name = "readout finite differences";
  r.tolerance = tol;
  NetworkConfig c;
  c.n_in = 20;
  c.n_rec = 30;
  c.n_out = 2;
  c.sample_steps = 200;
  c.loss = LossKind::MSE;
  c.lif.v_th = 0.3;
  c.in.init = WeightInit{0.3, 0.4, false};
  c.rec.init = WeightInit{0.0, 0.3, false};
  c.out.init = WeightInit{0.0, 0.5, false};
  c.in.plastic = false;
  c.rec.plastic = false;
  c.seed = seed;
  PatternTaskConfig pc;
  pc.T = c.sample_steps;
  pc.n_input = c.n_in;
  pc.n_readouts = c.n_out;
  pc.input_rate_hz = 50.0;
  const SampleSpec s = gen_pattern_task(seed, pc);

  Network probe = build_network(c);
  probe.apply_updates = false;
  run_sample(probe, s);
  flush_plasticity(probe);

  auto loss_with = [&](std::size_t idx, double w) {
    Network net = build_network(c);
    net.plastic = false;
    net.out.syn[idx].w = w;
    return run_sample(net, s).loss;
  };
  std::mt19937_64 rng(seed ^ 0x5eedULL);
  std::uniform_int_distribution<std::size_t> pick(0, probe.out.syn.size() - 1);
  double worst = 0.0;
  for (int n = 0; n < entries; ++n) {
    const std::size_t idx = pick(rng);
    const double w = probe.out.syn[idx].w;
    const double fd = (loss_with(idx, w + h) - loss_with(idx, w - h)) / (2.0 * h);
    const double g = probe.out.syn[idx].grad_sum;
    const double scale = std::max(std::fabs(g), std::fabs(fd));
    const double rel = scale > 0.0 ? std::fabs(fd - g) / scale : 0.0;
    worst = std::max(worst, rel);
  }
  r.value = worst;
  r.pass = worst < tol;
  r.detail = std::to_string(entries) + " readout weights, max relative error " + fmt(worst);
  r.seconds = seconds_since(t0);
  return r;
}

CheckResult check_mode_equivalence(const NetworkConfig& cfg, const TaskStream& stream,
                                   std::int64_t iterations, double tol) {
  const auto t0 = clock_type::now();
  CheckResult r;
  r.name = "mode equivalence";
  r.tolerance = tol;
  NetworkConfig ct = cfg, ce = cfg;
  ct.mode = SimMode::TimeDriven;
  ce.mode = SimMode::EventDriven;
  Network nt = build_network(ct);
  Network ne = build_network(ce);
  double worst = 0.0;
  for (std::int64_t it = 0; it < iterations; ++it) {
    for (int b = 0; b < cfg.opt.batch_size; ++b) {
      const SampleSpec s = stream(it, b, false);
      const double lt = run_sample(nt, s).loss;
      const double le = run_sample(ne, s).loss;
      worst = std::max(worst, std::fabs(lt - le));
    }
    end_iteration(nt);
    end_iteration(ne);
  }
  r.value = worst;
  r.pass = worst < tol;
  r.detail = std::to_string(iterations) + " iterations, max |loss_event - loss_time| = " + fmt(worst);
  r.seconds = seconds_since(t0);
  return r;
}

std::vector<CheckResult> run_verification(std::uint64_t seed) {
  std::vector<CheckResult> out;
  out.push_back(check_algorithm_equivalence(seed));
  out.push_back(check_online_offline(seed));
  out.push_back(check_readout_finite_differences(seed));
  NetworkConfig c;
  c.sample_steps = 200;
  c.n_in = 20;
  c.n_rec = 20;
  c.seed = seed;
  c.opt.eta = 1e-2;
  PatternTaskConfig pc;
  pc.T = c.sample_steps;
  pc.n_input = c.n_in;
  out.push_back(check_mode_equivalence(
      c, [&](std::int64_t, int, bool) { return gen_pattern_task(seed, pc); }, 4));
  return out;
}

}  // namespace eprop
