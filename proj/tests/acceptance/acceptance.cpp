// Acceptance run: one PASS/FAIL line per criterion. Exit status 1 if any fails.
// Usage: eprop_acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "eprop/experiments.hpp"
#include "eprop/optimizer.hpp"
#include "eprop/scaling.hpp"
#include "eprop/verification.hpp"
#include "protocols.hpp"
#include "synthetic_nmnist.hpp"

using namespace eprop;
namespace fs = std::filesystem;

namespace {

using clock_type = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double mean(const std::vector<double>& v, std::size_t from, std::size_t to) {
  double s = 0.0;
  for (std::size_t i = from; i < to; ++i) s += v[i];
  return s / static_cast<double>(to - from);
}

std::vector<double> train_column(const RunMetrics& m, bool loss) {
  std::vector<double> out;
  for (const auto& r : m.rows)
    if (r.phase == "train") out.push_back(loss ? r.loss : r.prediction_error);
  return out;
}

// 1. Event- and time-driven runs of the pattern network agree per sample.
Outcome mode_equivalence() {
  const auto t0 = clock_type::now();
  double worst = 0.0;
  bool pass = true;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    Config c = builtin_defaults(kPatternGeneration);
    c.set("seed", std::to_string(seed));
    c.set("batch_size", "1");
    const NetworkConfig base = NetworkConfig::from(
        c, NetworkConfig::for_variant(parse_variant(c.get_string("variant", "")), NetworkConfig{}));
    PatternTaskConfig pc = PatternTaskConfig::from(c);
    NetworkConfig net = base;
    net.n_in = pc.n_input;
    net.n_out = pc.n_readouts;
    net.sample_steps = pc.T;
    const SampleSpec sample = gen_pattern_task(seed, pc);
    const auto r = check_mode_equivalence(
        net, [&](std::int64_t, int, bool) { return sample; }, 4, 1e-9);
    worst = std::max(worst, r.value);
    pass = pass && r.pass;
  }
  const double secs = since(t0);
  return {pass && secs < 60.0, "max |loss_event - loss_time| " + fmt("%.3g", worst) +
                                   " over seeds 1-3 x 4 iterations, " + fmt("%.1f s", secs) +
                                   " (limit 60 s)"};
}

// 2. Update algorithms on random histories.
Outcome algorithm_equivalence() {
  const auto r = check_algorithm_equivalence(1, 50);
  return {r.pass && r.seconds < 10.0, r.detail + ", " + fmt("%.2f s", r.seconds) + " (limit 10 s)"};
}

// 3. Online accumulation against the future-summation form.
Outcome online_offline() {
  const auto r = check_online_offline(1, 100, 1e-10);
  return {r.pass && r.seconds < 30.0, r.detail + ", " + fmt("%.2f s", r.seconds) + " (limit 30 s)"};
}

// 4. Readout gradients against central differences.
Outcome finite_differences() {
  const auto r = check_readout_finite_differences(1, 20, 1e-5, 1e-5);
  return {r.pass, r.detail};
}

// 5. Pattern generation with output-only plasticity.
Outcome pattern_learning() {
  int ok = 0;
  double slowest = 0.0;
  std::string ratios;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    Config c;
    c.set("seed", std::to_string(seed));
    c.set("plastic.in", "false");
    c.set("plastic.rec", "false");
    c.set("run.iterations", "300");
    const auto t0 = clock_type::now();
    const auto out = run_experiment(kPatternGeneration, c);
    const double secs = since(t0);
    slowest = std::max(slowest, secs);
    const auto loss = train_column(out.metrics, true);
    const double first = mean(loss, 0, 20), last = mean(loss, loss.size() - 20, loss.size());
    ratios += (ratios.empty() ? "" : ", ") + fmt("%.3f", last / first);
    if (out.ok() && last < 0.5 * first && secs < 300.0) ++ok;
  }
  return {ok == 3, "last20/first20 loss ratio " + ratios + " (need < 0.5 for 3/3), slowest run " +
                       fmt("%.1f s", slowest) + " (limit 300 s)"};
}

// 6. Evidence accumulation with ALIF neurons, batch 8.
Outcome evidence() {
  int ok = 0;
  double slowest = 0.0;
  std::string errs;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    Config c;
    c.set("seed", std::to_string(seed));
    c.set("run.iterations", "150");
    c.set("batch_size", "8");
    const auto t0 = clock_type::now();
    const auto out = run_experiment(kEvidenceAccumulation, c);
    const double secs = since(t0);
    slowest = std::max(slowest, secs);
    const auto err = train_column(out.metrics, false);
    const double final_err = mean(err, err.size() - 10, err.size());
    errs += (errs.empty() ? "" : ", ") + fmt("%.3f", final_err);
    if (out.ok() && final_err < 0.35 && secs < 600.0) ++ok;
  }
  return {ok >= 2, "final prediction error (last 10 iterations) " + errs +
                       " (need < 0.35 for 2/3), slowest run " + fmt("%.1f s", slowest) +
                       " (limit 600 s)"};
}

// 7. Both variants on a synthetic two-class N-MNIST set.
Outcome nmnist_parity() {
  const fs::path root = fs::temp_directory_path() / "eprop_acceptance_nmnist";
  fs::remove_all(root);
  synthetic::SyntheticNmnistConfig sc;
  sc.per_class = 250;
  synthetic::write_synthetic_nmnist(root.string(), "Train", sc);
  const auto t0 = clock_type::now();
  bool pass = true;
  std::string detail;
  for (const char* variant : {"bsshslm2020", "eprop-plus"}) {
    Config c;
    c.set("variant", variant);
    c.set("run.iterations", "200");
    const auto out = run_experiment(kNmnist, c, root.string());
    const auto err = train_column(out.metrics, false);
    std::int64_t reached = -1;
    for (std::size_t i = 19; i < err.size() && reached < 0; ++i)
      if (mean(err, i - 19, i + 1) < 0.4) reached = static_cast<std::int64_t>(i);
    pass = pass && out.ok() && reached >= 0;
    detail += std::string(detail.empty() ? "" : ", ") + variant + " error < 0.4 " +
              (reached >= 0 ? "at iteration " + std::to_string(reached) : "never");
  }
  const double secs = since(t0);
  fs::remove_all(root);
  return {pass && secs < 1200.0, detail + " (20-iteration training error, 500 samples), " +
                                     fmt("%.1f s", secs) + " (limit 1200 s)"};
}

// 8. Delayed pairing of learning signal and eligibility.
Outcome delay_alignment() {
  std::string why;
  int ok = 0;
  for (int d = 0; d <= 2; ++d)
    for (int d_ls = 0; d_ls <= 2; ++d_ls)
      if (synthetic::delay_alignment_holds(d, d_ls, &why)) ++ok;
  const bool base = synthetic::zero_delay_matches_base_rule(1, 50, &why);
  return {ok == 9 && base, std::to_string(ok) + "/9 delay pairs aligned, d = d_ls = 0 " +
                               (base ? "bit-identical to the base rule" : "differs: " + why)};
}

// 9. Archive and update-history bounds.
Outcome history_bounds() {
  bool pass = true;
  std::string detail;
  for (ArchiveMode m : {ArchiveMode::FixedInterval, ArchiveMode::PerSpike}) {
    const auto r = synthetic::run_archive_protocol(m, 100000, 1);
    pass = pass && r.ok();
    detail += std::string(detail.empty() ? "" : "; ") +
              (m == ArchiveMode::PerSpike ? "per-spike" : "fixed-interval") + ": " +
              std::to_string(r.cleans) + " cleans, " + std::to_string(r.reads) + " reads, " +
              std::to_string(r.bound_violations + r.indegree_violations + r.missing_reads) +
              " violations" + (r.first_problem.empty() ? "" : " (" + r.first_problem + ")");
  }
  return {pass, detail + " over 1e5 steps"};
}

// 10. First Adam step.
Outcome adam_step_size() {
  OptimizerConfig c;
  c.kind = OptimizerKind::Adam;
  c.eta = 1e-3;
  AdamState s;
  const double dw = adam_update(s, 0.0, std::vector<double>{1.0}, c);
  const double ratio = dw / (-c.eta);
  return {ratio > 0.9999 && ratio < 1.0001, "dw/(-eta) = " + fmt("%.8f", ratio)};
}

// 11. Ignore-and-fire scaling run.
Outcome scaling() {
  ScalingConfig sc;  // 10000 neurons, in-degree 100, 20 s
  ScalingOptions opt;
  opt.workers = {1, 2, 4};
  const auto rows = run_scaling_benchmark(sc, opt);
  bool rate = true, same = true, slower = true;
  std::uint64_t h_static = 0, h_plastic = 0;
  std::string table;
  for (const auto& r : rows) {
    rate = rate && r.rate_hz == 5.0;
    auto& h = r.plastic ? h_plastic : h_static;
    if (!h) h = r.spike_hash;
    same = same && h == r.spike_hash;
    table += std::string("\n      ") + (r.plastic ? "plastic" : "static ") +
             " workers=" + std::to_string(r.workers) + " runtime " + fmt("%.2f s", r.runtime_s) +
             " rtf " + fmt("%.3g", r.real_time_factor) + " rate " + fmt("%.6g Hz", r.rate_hz);
  }
  for (const auto& p : rows) {
    if (!p.plastic) continue;
    for (const auto& s : rows)
      if (!s.plastic && s.workers == p.workers) slower = slower && p.runtime_s > s.runtime_s;
  }
  const std::size_t neurons = rows.empty() ? 0 : rows.front().n_neurons;
  return {rate && same && slower && rows.size() == 6,
          std::to_string(sc.n_rec) + " recurrent (" + std::to_string(neurons) +
              " total) neurons, rate exactly 5/s: " + (rate ? "yes" : "no") +
              ", identical spikes across 1/2/4 workers: " + (same ? "yes" : "no") +
              ", plastic slower than static: " + (slower ? "yes" : "no") + table};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "mode equivalence", mode_equivalence},
      {2, "algorithm equivalence", algorithm_equivalence},
      {3, "online/offline gradients", online_offline},
      {4, "readout finite differences", finite_differences},
      {5, "pattern learning", pattern_learning},
      {6, "evidence accumulation", evidence},
      {7, "N-MNIST variant parity", nmnist_parity},
      {8, "delay alignment", delay_alignment},
      {9, "history bounds", history_bounds},
      {10, "Adam first step", adam_step_size},
      {11, "scaling", scaling},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto t0 = clock_type::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %2d %-28s %s  [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), since(t0));
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d criteria failed\n", failed);
  return failed ? 1 : 0;
}
