// Command-line runner: one experiment per invocation, machine-readable output.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "eprop/error.hpp"
#include "eprop/experiments.hpp"
#include "eprop/output.hpp"
#include "eprop/scaling.hpp"
#include "eprop/verification.hpp"

namespace fs = std::filesystem;
using namespace eprop;

namespace {

constexpr const char* kDatasetEnv = "EPROP_NMNIST_PATH";
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

struct Flags {
  std::optional<std::string> mode, variant, optimizer, surrogate, config_file, workers;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> iterations;
  std::optional<int> batch_size;
  std::optional<std::int64_t> eval_every;
  std::string output_dir = "out";
  std::string dataset_path;
  bool spikes = false;
  // scaling only
  std::optional<std::int64_t> steps;
  std::optional<int> scale;
  std::optional<std::string> layout;
};

void add_common(CLI::App* sub, Flags& f, bool training) {
  sub->add_option("--seed", f.seed, "Random seed");
  sub->add_option("--output-dir", f.output_dir, "Directory for CSV and manifest output")
      ->capture_default_str();
  sub->add_option("--config-file", f.config_file,
                  "INI config or JSON manifest; explicit flags override its values");
  if (!training) return;
  sub->add_option("--mode", f.mode, "time-driven | event-driven")
      ->check(CLI::IsMember({"time-driven", "event-driven"}));
  sub->add_option("--variant", f.variant, "bsshslm2020 | eprop-plus")
      ->check(CLI::IsMember({"bsshslm2020", "eprop-plus"}));
  sub->add_option("--iterations", f.iterations, "Training iterations")->check(CLI::PositiveNumber);
  sub->add_option("--batch-size", f.batch_size, "Samples per iteration")->check(CLI::PositiveNumber);
  sub->add_option("--optimizer", f.optimizer, "gd | adam")->check(CLI::IsMember({"gd", "adam"}));
  sub->add_option("--surrogate", f.surrogate,
                  "piecewise-linear | exponential | fast-sigmoid | arctan")
      ->check(CLI::IsMember({"piecewise-linear", "exponential", "fast-sigmoid", "arctan"}));
  sub->add_option("--workers", f.workers, "Worker threads");
  sub->add_option("--eval-every", f.eval_every, "Training iterations between evaluations");
  sub->add_flag("--spikes", f.spikes, "Dump recurrent spikes of one evaluation sample");
}

Config load_base(const std::string& task, const Flags& f) {
  Config c = builtin_defaults(task);
  if (f.config_file) c.merge(load_config_file(*f.config_file));
  if (f.mode) c.set("mode", *f.mode);
  if (f.variant) {
    // A new variant re-derives its implied settings unless the flags name them.
    c.set("variant", *f.variant);
    for (const char* k : {"policy", "reset", "surrogate.kind", "neuron.tau_e"}) c.set(k, "");
  }
  if (f.seed) c.set("seed", std::to_string(*f.seed));
  if (f.iterations) c.set("run.iterations", std::to_string(*f.iterations));
  if (f.batch_size) c.set("batch_size", std::to_string(*f.batch_size));
  if (f.optimizer) c.set("opt.kind", *f.optimizer);
  if (f.surrogate) c.set("surrogate.kind", *f.surrogate);
  if (f.workers) c.set("workers", *f.workers);
  if (f.eval_every) c.set("eval.every", std::to_string(*f.eval_every));
  if (f.spikes) c.set("output.spikes", "true");
  return c;
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void ensure_dir(const std::string& d) {
  std::error_code ec;
  fs::create_directories(d, ec);
  if (ec) throw ConfigError("cannot create output directory " + d + ": " + ec.message());
}

std::string path_in(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

int run_training_task(const std::string& task, const Flags& f) {
  Config c = load_base(task, f);
  std::string dataset;
  if (task == kNmnist) {
    dataset = f.dataset_path;
    if (dataset.empty())
      if (const char* env = std::getenv(kDatasetEnv)) dataset = env;
    if (dataset.empty() || !fs::is_directory(dataset)) {
      std::cerr << "error: N-MNIST dataset not found (use --dataset-path or " << kDatasetEnv
                << ")\n";
      return kExitUsage;
    }
  }
  // Empty values mark keys left to the variant.
  Config clean;
  for (const auto& [k, v] : c.items())
    if (!v.empty()) clean.set(k, v);

  ensure_dir(f.output_dir);
  const ExperimentOutput out = run_experiment(task, clean, dataset);
  write_metrics_csv(path_in(f.output_dir, "metrics.csv"), out.metrics.rows);
  if (!out.spikes.empty()) write_spike_csv(path_in(f.output_dir, "spikes.csv"), out.spikes);
  ManifestInfo m;
  m.subcommand = task;
  m.seed = out.net.seed;
  m.config = out.config;
  m.results = out.results;
  m.results.emplace_back("self_checks", out.ok() ? "pass" : "fail");
  for (const auto& msg : out.failed_checks) m.results.emplace_back("failed_check", msg);
  write_manifest(path_in(f.output_dir, "manifest.json"), m);

  const auto& rows = out.metrics.rows;
  std::printf("%s: %zu iterations, final loss %.6g, runtime %.2f s, real-time factor %.3g\n",
              task.c_str(), rows.size(), rows.empty() ? 0.0 : rows.back().loss,
              out.metrics.runtime_s, out.metrics.real_time_factor());
  for (const auto& msg : out.failed_checks) std::printf("self-check failed: %s\n", msg.c_str());
  return out.ok() ? 0 : kExitCheckFailed;
}

std::vector<int> parse_workers(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      const int w = std::stoi(tok);
      if (w < 1) throw std::invalid_argument(tok);
      out.push_back(w);
    } catch (const std::exception&) {
      throw ConfigError("--workers expects a comma-separated list of positive integers");
    }
  }
  if (out.empty()) throw ConfigError("--workers is empty");
  return out;
}

int run_scaling(const Flags& f) {
  Config c;
  if (f.config_file) c.merge(load_config_file(*f.config_file));
  if (f.seed) c.set("seed", std::to_string(*f.seed));
  if (f.steps) c.set("scaling.steps", std::to_string(*f.steps));
  if (f.scale) c.set("scaling.scale", std::to_string(*f.scale));
  if (f.layout) c.set("scaling.layout", *f.layout);
  if (f.workers) c.set("scaling.workers", *f.workers);

  ScalingConfig sc = ScalingConfig::from(c);
  ScalingOptions opt;
  opt.workers = parse_workers(c.get_string("scaling.workers", "1,2,4"));
  const std::string layout = c.get_string("scaling.layout", "strong");
  if (layout != "strong" && layout != "weak") throw ConfigError("scaling.layout: strong | weak");
  opt.layout = layout == "weak" ? ScalingLayout::Weak : ScalingLayout::Strong;
  opt.cutoff = static_cast<int>(c.get_int("scaling.cutoff", opt.cutoff));
  opt.eta = c.get_double("scaling.eta", opt.eta);
  opt.archive_clean_every = c.get_int("scaling.clean_every", opt.archive_clean_every);

  Config resolved = c;
  resolved.set("seed", std::to_string(sc.seed));
  resolved.set("scaling.scale", std::to_string(sc.scale));
  resolved.set("scaling.n_rec", std::to_string(sc.n_rec));
  resolved.set("scaling.n_in", std::to_string(sc.n_in));
  resolved.set("scaling.n_out", std::to_string(sc.n_out));
  resolved.set("scaling.indeg_in", std::to_string(sc.indeg_in));
  resolved.set("scaling.indeg_rec", std::to_string(sc.indeg_rec));
  resolved.set("scaling.indeg_out", std::to_string(sc.indeg_out));
  resolved.set("scaling.outdeg_fb", std::to_string(sc.outdeg_fb));
  resolved.set("scaling.rate_hz", num(sc.rate_hz));
  resolved.set("scaling.input_rate_hz", num(sc.input_rate_hz));
  resolved.set("scaling.steps", std::to_string(sc.steps));
  resolved.set("neuron.dt", num(sc.dt));
  resolved.set("scaling.layout", layout);
  resolved.set("scaling.cutoff", std::to_string(opt.cutoff));
  resolved.set("scaling.eta", num(opt.eta));
  resolved.set("scaling.clean_every", std::to_string(opt.archive_clean_every));
  {
    std::string w;
    for (int x : opt.workers) w += (w.empty() ? "" : ",") + std::to_string(x);
    resolved.set("scaling.workers", w);
  }

  ensure_dir(f.output_dir);
  const std::vector<ScalingRow> rows = run_scaling_benchmark(sc, opt);

  std::map<int, const ScalingRow*> stat, plas;
  for (const auto& r : rows) (r.plastic ? plas : stat)[r.workers] = &r;
  std::vector<std::string> failed;
  std::optional<std::uint64_t> hash_static, hash_plastic;
  for (const auto& r : rows) {
    auto& h = r.plastic ? hash_plastic : hash_static;
    if (!h) h = r.spike_hash;
    if (opt.layout == ScalingLayout::Strong && *h != r.spike_hash)
      failed.push_back("spike trains differ at " + std::to_string(r.workers) + " workers");
    if (std::fabs(r.rate_hz - sc.rate_hz) > 1e-9 * sc.rate_hz)
      failed.push_back("rate " + std::to_string(r.rate_hz) + " at " + std::to_string(r.workers) +
                       " workers");
  }

  const std::string csv = path_in(f.output_dir, "scaling.csv");
  {
    std::ofstream os(csv);
    if (!os) throw std::runtime_error("cannot write " + csv);
    os.precision(17);
    os << "workers,scale,plastic,n_neurons,n_synapses,build_s,runtime_s,simulated_s,"
          "real_time_factor,spikes_recurrent,rate_hz,spike_hash\n";
    for (const auto& r : rows)
      os << r.workers << ',' << r.scale << ',' << (r.plastic ? 1 : 0) << ',' << r.n_neurons << ','
         << r.n_synapses << ',' << r.build_s << ',' << r.runtime_s << ',' << r.simulated_s << ','
         << r.real_time_factor << ',' << r.spikes_recurrent << ',' << r.rate_hz << ','
         << r.spike_hash << '\n';
  }

  std::printf("%8s %10s %12s %11s %11s %9s %9s %8s\n", "workers", "neurons", "synapses",
              "static_s", "plastic_s", "rtf_stat", "rtf_plas", "rate_hz");
  for (int w : opt.workers) {
    const ScalingRow* s = stat.count(w) ? stat[w] : nullptr;
    const ScalingRow* p = plas.count(w) ? plas[w] : nullptr;
    const ScalingRow* any = s ? s : p;
    if (!any) continue;
    std::printf("%8d %10zu %12zu %11.3f %11.3f %9.3g %9.3g %8.4g\n", w, any->n_neurons,
                any->n_synapses, s ? s->runtime_s : NAN, p ? p->runtime_s : NAN,
                s ? s->real_time_factor : NAN, p ? p->real_time_factor : NAN, any->rate_hz);
  }

  ManifestInfo m;
  m.subcommand = "scaling";
  m.seed = sc.seed;
  m.config = resolved;
  for (const auto& r : rows) {
    const std::string key = std::string(r.plastic ? "plastic" : "static") + ".workers_" +
                            std::to_string(r.workers);
    m.results.emplace_back(key + ".runtime_s", std::to_string(r.runtime_s));
    m.results.emplace_back(key + ".real_time_factor", std::to_string(r.real_time_factor));
    m.results.emplace_back(key + ".spike_hash", std::to_string(r.spike_hash));
  }
  m.results.emplace_back("self_checks", failed.empty() ? "pass" : "fail");
  for (const auto& msg : failed) {
    m.results.emplace_back("failed_check", msg);
    std::printf("self-check failed: %s\n", msg.c_str());
  }
  write_manifest(path_in(f.output_dir, "manifest.json"), m);
  return failed.empty() ? 0 : kExitCheckFailed;
}

int run_verify(const Flags& f) {
  const std::uint64_t seed = f.seed.value_or(1);
  ensure_dir(f.output_dir);
  const auto checks = run_verification(seed);
  bool all = true;
  ManifestInfo m;
  m.subcommand = "verify";
  m.seed = seed;
  m.config.set("seed", std::to_string(seed));
  for (const auto& r : checks) {
    std::printf("%s  %-28s worst %.3g (tol %.3g)  %s  [%.2f s]\n", r.pass ? "PASS" : "FAIL",
                r.name.c_str(), r.value, r.tolerance, r.detail.c_str(), r.seconds);
    all = all && r.pass;
    m.results.emplace_back(r.name, r.pass ? "pass" : "fail");
  }
  m.results.emplace_back("self_checks", all ? "pass" : "fail");
  write_manifest(path_in(f.output_dir, "manifest.json"), m);
  return all ? 0 : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-driven eligibility propagation in spiking networks"};
  app.require_subcommand(1);
  Flags f;

  auto* pattern = app.add_subcommand(kPatternGeneration, "Pattern generation (regression)");
  auto* evidence = app.add_subcommand(kEvidenceAccumulation, "Evidence accumulation (classification)");
  auto* nmnist = app.add_subcommand(kNmnist, "N-MNIST classification");
  auto* scaling = app.add_subcommand("scaling", "Ignore-and-fire scaling benchmark");
  auto* verify = app.add_subcommand("verify", "Oracle-equivalence suite");
  for (auto* s : {pattern, evidence, nmnist}) add_common(s, f, true);
  nmnist->add_option("--dataset-path", f.dataset_path,
                     std::string("N-MNIST root; falls back to $") + kDatasetEnv);
  add_common(scaling, f, false);
  scaling->add_option("--workers", f.workers, "Comma-separated worker counts")
      ->capture_default_str();
  scaling->add_option("--steps", f.steps, "Simulated steps")->check(CLI::PositiveNumber);
  scaling->add_option("--scale", f.scale, "Network scale factor")->check(CLI::PositiveNumber);
  scaling->add_option("--layout", f.layout, "strong | weak")
      ->check(CLI::IsMember({"strong", "weak"}));
  add_common(verify, f, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*pattern) return run_training_task(kPatternGeneration, f);
    if (*evidence) return run_training_task(kEvidenceAccumulation, f);
    if (*nmnist) return run_training_task(kNmnist, f);
    if (*scaling) return run_scaling(f);
    return run_verify(f);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
}
