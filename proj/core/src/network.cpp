#include "eprop/network.hpp"

#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include "eprop/error.hpp"

namespace eprop {

namespace {

template <class E>
struct Names {
  E value;
  const char* name;
};

constexpr Names<Variant> kVariants[] = {{Variant::Bsshslm2020, "bsshslm2020"},
                                        {Variant::EpropPlus, "eprop-plus"}};
constexpr Names<SimMode> kModes[] = {{SimMode::TimeDriven, "time-driven"},
                                     {SimMode::EventDriven, "event-driven"}};
constexpr Names<LossKind> kLosses[] = {{LossKind::MSE, "mse"},
                                       {LossKind::CrossEntropy, "cross-entropy"},
                                       {LossKind::TemporalMSE, "temporal-mse"}};
constexpr Names<SurrogateKind> kSurrogates[] = {
    {SurrogateKind::PiecewiseLinear, "piecewise-linear"},
    {SurrogateKind::Exponential, "exponential"},
    {SurrogateKind::FastSigmoid, "fast-sigmoid"},
    {SurrogateKind::Arctan, "arctan"}};
constexpr Names<OptimizerKind> kOptimizers[] = {{OptimizerKind::GD, "gd"},
                                                {OptimizerKind::Adam, "adam"}};
constexpr Names<RegMode> kRegModes[] = {{RegMode::Off, "off"},
                                        {RegMode::Static, "static"},
                                        {RegMode::Cumulative, "cumulative"},
                                        {RegMode::Ema, "ema"}};
constexpr Names<UpdatePolicyKind> kPolicies[] = {{UpdatePolicyKind::PerIteration, "per-iteration"},
                                                 {UpdatePolicyKind::PerSpike, "per-spike"}};
constexpr Names<NeuronModel> kModels[] = {{NeuronModel::Lif, "lif"},
                                          {NeuronModel::IgnoreAndFire, "ignore-and-fire"}};

template <class E, std::size_t N>
std::string name_of(const Names<E> (&table)[N], E v) {
  for (const auto& n : table)
    if (n.value == v) return n.name;
  return "?";
}

template <class E, std::size_t N>
E parse_of(const Names<E> (&table)[N], const std::string& s, const char* what) {
  for (const auto& n : table)
    if (s == n.name) return n.value;
  std::string opts;
  for (const auto& n : table) opts += std::string(opts.empty() ? "" : ", ") + n.name;
  throw ConfigError("unknown " + std::string(what) + " '" + s + "' (expected " + opts + ")");
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Bernoulli wiring, source-major with ascending targets.
Projection random_projection(std::int64_t n_src, std::int64_t n_tgt, double p, bool no_autapses,
                             std::mt19937_64& rng) {
  if (p < 0.0 || p > 1.0) throw ConfigError("connection probability outside [0, 1]");
  std::bernoulli_distribution draw(p);
  Projection proj;
  proj.n_src = n_src;
  proj.n_tgt = n_tgt;
  proj.ptr.assign(static_cast<std::size_t>(n_src) + 1, 0);
  for (std::int64_t i = 0; i < n_src; ++i) {
    for (std::int64_t j = 0; j < n_tgt; ++j) {
      if (no_autapses && i == j) continue;
      if (p >= 1.0 || draw(rng)) proj.tgt.push_back(j);
    }
    proj.ptr[static_cast<std::size_t>(i) + 1] = static_cast<std::int64_t>(proj.tgt.size());
  }
  proj.weight.assign(proj.tgt.size(), 0.0);
  return proj;
}

Projection make_projection(const ProjectionConfig& pc, std::int64_t n_src, std::int64_t n_tgt,
                           bool same_population, std::uint64_t seed, std::uint64_t stream) {
  auto rng = make_rng(seed, stream);
  Projection p = pc.indegree >= 0
                     ? fixed_indegree(n_src, n_tgt, pc.indegree, same_population, seed + stream)
                     : random_projection(n_src, n_tgt, pc.p_connect, same_population, rng);
  double fan_in = pc.indegree >= 0 ? static_cast<double>(pc.indegree)
                                   : pc.p_connect * static_cast<double>(n_src);
  if (fan_in < 1.0) fan_in = 1.0;
  const double sd = pc.init.scale_by_fan_in ? pc.init.std / std::sqrt(fan_in) : pc.init.std;
  std::normal_distribution<double> w(pc.init.mean, sd);
  for (double& x : p.weight) x = sd > 0.0 ? w(rng) : pc.init.mean;
  return p;
}

SynapseGroup make_group(Projection topo, bool plastic, int workers) {
  SynapseGroup g;
  g.plastic = plastic;
  g.syn.resize(topo.tgt.size());
  for (std::size_t s = 0; s < g.syn.size(); ++s) g.syn[s].w = topo.weight[s];
  const auto n_src = static_cast<std::size_t>(topo.n_src);
  g.by_worker.assign(static_cast<std::size_t>(workers) * n_src, {});
  for (std::size_t i = 0; i < n_src; ++i)
    for (std::int64_t s = topo.ptr[i]; s < topo.ptr[i + 1]; ++s) {
      const auto w = static_cast<std::size_t>(topo.tgt[static_cast<std::size_t>(s)] % workers);
      g.by_worker[w * n_src + i].push_back(s);
    }
  g.topo = std::move(topo);
  return g;
}

void check_projection(const Projection& p, std::int64_t n_src, std::int64_t n_tgt,
                      const char* what) {
  if (p.n_src != n_src || p.n_tgt != n_tgt ||
      p.ptr.size() != static_cast<std::size_t>(n_src) + 1 || p.weight.size() != p.tgt.size())
    throw ConfigError(std::string(what) + " projection does not match the population sizes");
  for (std::int64_t i = 0; i < n_src; ++i)
    for (std::int64_t s = p.ptr[static_cast<std::size_t>(i)];
         s < p.ptr[static_cast<std::size_t>(i) + 1]; ++s) {
      const auto t = p.tgt[static_cast<std::size_t>(s)];
      if (t < 0 || t >= n_tgt) throw ConfigError(std::string(what) + " target out of range");
      if (s > p.ptr[static_cast<std::size_t>(i)] && t <= p.tgt[static_cast<std::size_t>(s) - 1])
        throw ConfigError(std::string(what) + " targets must ascend per source");
    }
}

}  // namespace

std::string to_string(Variant v) { return name_of(kVariants, v); }
std::string to_string(SimMode m) { return name_of(kModes, m); }
std::string to_string(LossKind k) { return name_of(kLosses, k); }
std::string to_string(SurrogateKind k) { return name_of(kSurrogates, k); }
std::string to_string(OptimizerKind k) { return name_of(kOptimizers, k); }
std::string to_string(RegMode m) { return name_of(kRegModes, m); }
std::string to_string(UpdatePolicyKind k) { return name_of(kPolicies, k); }
std::string to_string(NeuronModel m) { return name_of(kModels, m); }
Variant parse_variant(const std::string& s) { return parse_of(kVariants, s, "variant"); }
SimMode parse_mode(const std::string& s) { return parse_of(kModes, s, "mode"); }
LossKind parse_loss(const std::string& s) { return parse_of(kLosses, s, "loss"); }
SurrogateKind parse_surrogate(const std::string& s) {
  return parse_of(kSurrogates, s, "surrogate");
}
OptimizerKind parse_optimizer(const std::string& s) {
  return parse_of(kOptimizers, s, "optimizer");
}
RegMode parse_reg_mode(const std::string& s) { return parse_of(kRegModes, s, "reg mode"); }
UpdatePolicyKind parse_policy(const std::string& s) {
  return parse_of(kPolicies, s, "update policy");
}
NeuronModel parse_model(const std::string& s) { return parse_of(kModels, s, "neuron model"); }

void NetworkConfig::validate() const {
  if (n_in < 0 || n_rec < 1 || n_out < 1) throw ConfigError("population sizes out of range");
  if (n_adaptive < 0 || n_adaptive > n_rec) throw ConfigError("n_adaptive exceeds n_rec");
  if (sample_steps < 1) throw ConfigError("sample_steps must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (archive_clean_every < 0) throw ConfigError("archive_clean_every must be >= 0");
  if (opt.eta < 0.0) throw ConfigError("learning rate must be >= 0");
  if (opt.batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (iaf_rate_hz <= 0.0) throw ConfigError("ignore-and-fire rate must be positive");
  delays.validate();
  if (policy == UpdatePolicyKind::PerSpike && delays.cutoff <= delays.d)
    throw ConfigError("per-spike updates need cutoff > d");
  make_lif_params(lif);
  if (tau_out <= 0.0) throw ConfigError("tau_out must be positive");
}

double NetworkConfig::kappa() const { return decay_factor(lif.dt, tau_out); }

double NetworkConfig::kappa_e() const { return tau_e < 0.0 ? kappa() : decay_factor(lif.dt, tau_e); }

NetworkConfig NetworkConfig::for_variant(Variant v, NetworkConfig c) {
  c.variant = v;
  if (v == Variant::Bsshslm2020) {
    c.policy = UpdatePolicyKind::PerIteration;
    c.reset_between_samples = true;
    c.lif.surrogate.kind = SurrogateKind::PiecewiseLinear;
    c.tau_e = -1.0;
    if (c.reg.mode == RegMode::Ema) c.reg.mode = RegMode::Static;
    if (c.loss == LossKind::TemporalMSE) c.loss = LossKind::CrossEntropy;
  } else {
    c.policy = UpdatePolicyKind::PerSpike;
    c.reset_between_samples = false;
    c.lif.surrogate.kind = SurrogateKind::Exponential;
    if (c.reg.mode == RegMode::Static || c.reg.mode == RegMode::Cumulative) c.reg.mode = RegMode::Ema;
    if (c.loss == LossKind::CrossEntropy) c.loss = LossKind::TemporalMSE;
  }
  return c;
}

NetworkConfig NetworkConfig::from(const Config& c, NetworkConfig b) {
  if (c.has("variant")) b = for_variant(parse_variant(c.get_string("variant", "")), b);
  b.n_in = static_cast<int>(c.get_int("network.n_in", b.n_in));
  b.n_rec = static_cast<int>(c.get_int("network.n_rec", b.n_rec));
  b.n_out = static_cast<int>(c.get_int("network.n_out", b.n_out));
  b.n_adaptive = static_cast<int>(c.get_int("network.n_adaptive", b.n_adaptive));
  b.model = parse_model(c.get_string("network.model", to_string(b.model)));

  b.lif.dt = c.get_double("neuron.dt", b.lif.dt);
  b.lif.tau_m = c.get_double("neuron.tau_m", b.lif.tau_m);
  b.lif.v_th = c.get_double("neuron.v_th", b.lif.v_th);
  b.lif.v_reset = c.get_double("neuron.v_reset", b.lif.v_reset);
  const std::string reset =
      c.get_string("neuron.reset", b.lif.reset_mode == ResetMode::ResetToValue ? "value" : "subtract");
  if (reset != "value" && reset != "subtract")
    throw ConfigError("neuron.reset must be 'subtract' or 'value'");
  b.lif.reset_mode = reset == "value" ? ResetMode::ResetToValue : ResetMode::SubtractThreshold;
  b.beta_a_adaptive = c.get_double("neuron.beta_a", b.beta_a_adaptive);
  b.tau_a_adaptive = c.get_double("neuron.tau_a", b.tau_a_adaptive);
  b.tau_out = c.get_double("neuron.tau_out", b.tau_out);
  b.tau_e = c.get_double("neuron.tau_e", b.tau_e);
  b.iaf_rate_hz = c.get_double("neuron.iaf_rate_hz", b.iaf_rate_hz);
  b.lif.surrogate.kind =
      parse_surrogate(c.get_string("surrogate.kind", to_string(b.lif.surrogate.kind)));
  b.lif.surrogate.gamma = c.get_double("surrogate.gamma", b.lif.surrogate.gamma);
  b.lif.surrogate.beta = c.get_double("surrogate.beta", b.lif.surrogate.beta);

  struct P {
    const char* name;
    ProjectionConfig* pc;
  };
  for (P p : {P{"in", &b.in}, P{"rec", &b.rec}, P{"out", &b.out}}) {
    const std::string n = p.name;
    p.pc->p_connect = c.get_double("connect.p_" + n, p.pc->p_connect);
    p.pc->indegree = c.get_int("connect.indeg_" + n, p.pc->indegree);
    p.pc->init.mean = c.get_double("weights." + n + "_mean", p.pc->init.mean);
    p.pc->init.std = c.get_double("weights." + n + "_std", p.pc->init.std);
    p.pc->init.scale_by_fan_in =
        c.get_bool("weights." + n + "_scale_by_fan_in", p.pc->init.scale_by_fan_in);
    p.pc->plastic = c.get_bool("plastic." + n, p.pc->plastic);
  }
  b.feedback.mean = c.get_double("weights.fb_mean", b.feedback.mean);
  b.feedback.std = c.get_double("weights.fb_std", b.feedback.std);
  b.feedback.scale_by_fan_in = c.get_bool("weights.fb_scale_by_fan_in", b.feedback.scale_by_fan_in);
  b.feedback_outdegree = c.get_int("connect.outdeg_fb", b.feedback_outdegree);

  b.delays.d = static_cast<int>(c.get_int("delays.d", b.delays.d));
  b.delays.d_ls = static_cast<int>(c.get_int("delays.d_ls", b.delays.d_ls));
  b.delays.cutoff = static_cast<int>(c.get_int("delays.cutoff", b.delays.cutoff));
  b.loss = parse_loss(c.get_string("loss", to_string(b.loss)));
  b.reg.mode = parse_reg_mode(c.get_string("reg.mode", to_string(b.reg.mode)));
  b.reg.c_reg = c.get_double("reg.c", b.reg.c_reg);
  if (c.has("reg.f_target_hz"))
    b.reg.f_target = c.get_double("reg.f_target_hz", 0.0) * b.lif.dt / 1000.0;
  b.reg.beta_ema = c.get_double("reg.beta", b.reg.beta_ema);
  b.opt.kind = parse_optimizer(c.get_string("opt.kind", to_string(b.opt.kind)));
  b.opt.eta = c.get_double("opt.eta", b.opt.eta);
  b.opt.beta1 = c.get_double("opt.beta1", b.opt.beta1);
  b.opt.beta2 = c.get_double("opt.beta2", b.opt.beta2);
  b.opt.eps_hat = c.get_double("opt.eps_hat", b.opt.eps_hat);
  b.opt.batch_size = static_cast<int>(c.get_int("batch_size", b.opt.batch_size));
  b.policy = parse_policy(c.get_string("policy", to_string(b.policy)));
  b.sample_steps = c.get_int("sample_steps", b.sample_steps);
  b.reset_between_samples = c.get_bool("reset", b.reset_between_samples);
  b.seed = static_cast<std::uint64_t>(c.get_int("seed", static_cast<std::int64_t>(b.seed)));
  b.mode = parse_mode(c.get_string("mode", to_string(b.mode)));
  b.workers = static_cast<int>(c.get_int("workers", b.workers));
  b.archive_clean_every = c.get_int("archive.clean_every", b.archive_clean_every);
  if (c.has("variant")) {
    // The variant decides how the loss and regularization are realized;
    // its other implications yield to explicit keys.
    const NetworkConfig m = for_variant(b.variant, b);
    b.loss = m.loss;
    b.reg.mode = m.reg.mode;
  }
  return b;
}

Config NetworkConfig::to_config() const {
  Config c;
  c.set("variant", to_string(variant));
  c.set("network.n_in", std::to_string(n_in));
  c.set("network.n_rec", std::to_string(n_rec));
  c.set("network.n_out", std::to_string(n_out));
  c.set("network.n_adaptive", std::to_string(n_adaptive));
  c.set("network.model", to_string(model));
  c.set("neuron.dt", num(lif.dt));
  c.set("neuron.tau_m", num(lif.tau_m));
  c.set("neuron.v_th", num(lif.v_th));
  c.set("neuron.v_reset", num(lif.v_reset));
  c.set("neuron.reset", lif.reset_mode == ResetMode::ResetToValue ? "value" : "subtract");
  c.set("neuron.beta_a", num(beta_a_adaptive));
  c.set("neuron.tau_a", num(tau_a_adaptive));
  c.set("neuron.tau_out", num(tau_out));
  c.set("neuron.tau_e", num(tau_e));
  c.set("neuron.iaf_rate_hz", num(iaf_rate_hz));
  c.set("surrogate.kind", to_string(lif.surrogate.kind));
  c.set("surrogate.gamma", num(lif.surrogate.gamma));
  c.set("surrogate.beta", num(lif.surrogate.beta));
  struct P {
    const char* name;
    const ProjectionConfig* pc;
  };
  for (P p : {P{"in", &in}, P{"rec", &rec}, P{"out", &out}}) {
    const std::string n = p.name;
    c.set("connect.p_" + n, num(p.pc->p_connect));
    c.set("connect.indeg_" + n, std::to_string(p.pc->indegree));
    c.set("weights." + n + "_mean", num(p.pc->init.mean));
    c.set("weights." + n + "_std", num(p.pc->init.std));
    c.set("weights." + n + "_scale_by_fan_in", p.pc->init.scale_by_fan_in ? "true" : "false");
    c.set("plastic." + n, p.pc->plastic ? "true" : "false");
  }
  c.set("weights.fb_mean", num(feedback.mean));
  c.set("weights.fb_std", num(feedback.std));
  c.set("weights.fb_scale_by_fan_in", feedback.scale_by_fan_in ? "true" : "false");
  c.set("connect.outdeg_fb", std::to_string(feedback_outdegree));
  c.set("delays.d", std::to_string(delays.d));
  c.set("delays.d_ls", std::to_string(delays.d_ls));
  c.set("delays.cutoff", std::to_string(delays.cutoff));
  c.set("loss", to_string(loss));
  c.set("reg.mode", to_string(reg.mode));
  c.set("reg.c", num(reg.c_reg));
  c.set("reg.f_target_hz", num(reg.f_target * 1000.0 / lif.dt));
  c.set("reg.beta", num(reg.beta_ema));
  c.set("opt.kind", to_string(opt.kind));
  c.set("opt.eta", num(opt.eta));
  c.set("opt.beta1", num(opt.beta1));
  c.set("opt.beta2", num(opt.beta2));
  c.set("opt.eps_hat", num(opt.eps_hat));
  c.set("batch_size", std::to_string(opt.batch_size));
  c.set("policy", to_string(policy));
  c.set("sample_steps", std::to_string(sample_steps));
  c.set("reset", reset_between_samples ? "true" : "false");
  c.set("seed", std::to_string(seed));
  c.set("mode", to_string(mode));
  c.set("workers", std::to_string(workers));
  c.set("archive.clean_every", std::to_string(archive_clean_every));
  return c;
}

std::size_t Network::n_synapses() const { return in.syn.size() + rec.syn.size() + out.syn.size(); }

std::uint64_t Network::weight_hash() const {
  std::uint64_t h = 1469598103934665603ull;
  for (const SynapseGroup* g : {&in, &rec, &out})
    for (const auto& s : g->syn) {
      std::uint64_t bits;
      std::memcpy(&bits, &s.w, sizeof bits);
      for (int b = 0; b < 8; ++b) {
        h ^= (bits >> (8 * b)) & 0xFF;
        h *= 1099511628211ull;
      }
    }
  return h;
}

Network build_network(const NetworkConfig& cfg) {
  cfg.validate();
  Projection in = make_projection(cfg.in, cfg.n_in, cfg.n_rec, false, cfg.seed, 11);
  Projection rec = make_projection(cfg.rec, cfg.n_rec, cfg.n_rec, true, cfg.seed, 12);
  Projection out = make_projection(cfg.out, cfg.n_rec, cfg.n_out, false, cfg.seed, 13);
  Projection fb;
  if (cfg.feedback_outdegree >= 0) {
    fb = fixed_outdegree(cfg.n_out, cfg.n_rec, cfg.feedback_outdegree, cfg.seed + 14);
  } else {
    auto rng = make_rng(cfg.seed, 14);
    fb = random_projection(cfg.n_out, cfg.n_rec, 1.0, false, rng);
  }
  {
    auto rng = make_rng(cfg.seed, 15);
    const double sd = cfg.feedback.scale_by_fan_in
                          ? cfg.feedback.std / std::sqrt(static_cast<double>(cfg.n_out))
                          : cfg.feedback.std;
    std::normal_distribution<double> w(cfg.feedback.mean, sd);
    for (double& x : fb.weight) x = sd > 0.0 ? w(rng) : cfg.feedback.mean;
  }
  return build_network(cfg, std::move(in), std::move(rec), std::move(out), fb);
}

Network build_network(const NetworkConfig& cfg, Projection in, Projection rec, Projection out,
                      const Projection& feedback) {
  cfg.validate();
  check_projection(in, cfg.n_in, cfg.n_rec, "input");
  check_projection(rec, cfg.n_rec, cfg.n_rec, "recurrent");
  check_projection(out, cfg.n_rec, cfg.n_out, "output");
  if (feedback.n_src != cfg.n_out || feedback.n_tgt != cfg.n_rec)
    throw ConfigError("feedback projection does not match the population sizes");

  Network net;
  net.cfg = cfg;
  const auto J = static_cast<std::size_t>(cfg.n_rec);
  const auto K = static_cast<std::size_t>(cfg.n_out);
  const auto I = static_cast<std::size_t>(cfg.n_in);
  net.kappa = cfg.kappa();
  const LifParams base = make_lif_params(cfg.lif);
  LifParams adaptive = cfg.lif;
  adaptive.beta_a = cfg.beta_a_adaptive;
  adaptive.tau_a = cfg.tau_a_adaptive;
  adaptive = make_lif_params(adaptive);
  for (std::size_t j = 0; j < J; ++j) {
    const bool alif = j >= J - static_cast<std::size_t>(cfg.n_adaptive);
    net.params.push_back(alif ? adaptive : base);
    net.trace.push_back(trace_params(net.params.back(), cfg.kappa_e()));
  }

  const int W = cfg.workers;
  net.in = make_group(std::move(in), cfg.in.plastic, W);
  net.rec = make_group(std::move(rec), cfg.rec.plastic, W);
  net.out = make_group(std::move(out), cfg.out.plastic, W);

  net.B.assign(J * K, 0.0);
  net.feedback.assign(J, {});
  for (std::int64_t k = 0; k < feedback.n_src; ++k)
    for (std::int64_t s = feedback.ptr[static_cast<std::size_t>(k)];
         s < feedback.ptr[static_cast<std::size_t>(k) + 1]; ++s)
      net.B[static_cast<std::size_t>(feedback.tgt[static_cast<std::size_t>(s)]) * K +
            static_cast<std::size_t>(k)] = feedback.weight[static_cast<std::size_t>(s)];
  for (std::size_t j = 0; j < J; ++j)
    for (std::size_t k = 0; k < K; ++k)
      if (net.B[j * K + k] != 0.0) net.feedback[j].emplace_back(static_cast<int>(k), net.B[j * K + k]);

  for (std::size_t j = 0; j < J; ++j) net.neurons.push_back(initial_state(net.params[j]));
  if (cfg.model == NeuronModel::IgnoreAndFire) {
    const std::int64_t period = ignore_and_fire_period(cfg.iaf_rate_hz, cfg.lif.dt);
    auto rng = make_rng(cfg.seed, 16);
    std::uniform_int_distribution<std::int64_t> ph(0, period - 1);
    net.iaf.resize(J);
    for (auto& s : net.iaf) s = IgnoreAndFireState{period, ph(rng)};
  }
  net.psi.assign(J, 0.0);
  net.rate.assign(J, 0.0);
  net.readouts.assign(K, ReadoutState{0.0, net.kappa});
  net.I_in.assign(J, 0.0);
  net.I_rec.assign(J, 0.0);
  net.I_out.assign(K, 0.0);
  const auto d = static_cast<std::size_t>(cfg.delays.d);
  net.z_ring.assign(d + 2, std::vector<std::uint8_t>(J, 0));
  net.x_ring.assign(d + 1, std::vector<std::uint8_t>(I, 0));
  if (cfg.mode == SimMode::TimeDriven) {
    net.psi_ring.assign(d + 1, std::vector<double>(J, 0.0));
    net.rate_ring.assign(d + 1, std::vector<double>(J, 0.0));
  }

  ArchiveConfig ac;
  ac.update_interval = cfg.sample_steps;
  ac.cutoff = cfg.delays.cutoff;
  ac.mode = cfg.policy == UpdatePolicyKind::PerSpike ? ArchiveMode::PerSpike
                                                     : ArchiveMode::FixedInterval;
  net.archives.assign(J, RecurrentArchive(ac));
  net.readout_archives.assign(K, ReadoutArchive(ac));
  if (W > 1) net.pool = std::make_shared<WorkerPool>(W);
  restart_plasticity(net);
  return net;
}

void restart_plasticity(Network& net) {
  for (auto& a : net.archives) a.reset();
  for (auto& a : net.readout_archives) a.reset();
  const bool adam_buffer = net.cfg.opt.kind == OptimizerKind::Adam &&
                           net.cfg.policy == UpdatePolicyKind::PerIteration;
  const std::int64_t iter = static_cast<std::int64_t>(net.iter_starts.size()) - 1;
  auto reset = [&](SynapseGroup& g, bool readout) {
    if (!g.plastic) return;
    for (std::size_t i = 0; i < g.syn.size(); ++i) {
      SynapseState& s = g.syn[i];
      const double w = s.w;
      const AdamState adam = s.adam;
      std::vector<double> buffer = std::move(s.buffer);
      std::vector<double> reg_hist = std::move(s.reg_hist);
      s = SynapseState{};
      s.w = w;
      s.adam = adam;
      s.last = net.now - 1;
      s.anchor = net.now;
      s.iter = iter;
      s.t_reg = net.now;
      if (adam_buffer) buffer.assign(static_cast<std::size_t>(net.cfg.sample_steps), 0.0);
      s.buffer = std::move(buffer);
      if (adam_buffer && !readout && net.cfg.reg.mode == RegMode::Static && net.cfg.reg.c_reg != 0.0)
        reg_hist.assign(static_cast<std::size_t>(net.cfg.sample_steps), 0.0);
      s.reg_hist = std::move(reg_hist);
      const auto j = static_cast<std::size_t>(g.topo.tgt[i]);
      if (readout)
        net.readout_archives[j].update_history().register_initial(net.now);
      else
        net.archives[j].update_history().register_initial(net.now);
    }
  };
  reset(net.in, false);
  reset(net.rec, false);
  reset(net.out, true);
}

}  // namespace eprop
