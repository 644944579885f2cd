#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "eprop/output.hpp"
#include "synthetic_nmnist.hpp"

using namespace eprop;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(EPROP_CLI_PATH) + " " + args + " 2>&1";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, p)) r.out += buf;
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path fresh(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("eprop_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p.string();
}

std::string result(const ManifestInfo& m, const std::string& key) {
  for (const auto& [k, v] : m.results)
    if (k == key) return v;
  return {};
}

ManifestInfo manifest(const fs::path& dir) {
  std::ifstream is(dir / "manifest.json");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_manifest(ss.str());
}

const char* kTinyPattern =
    "[run]\niterations = 3\n[network]\nn_in = 10\nn_rec = 10\n[pattern]\nduration = 100\n";

}  // namespace

TEST(Cli, UsageErrorsExitWithTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("pattern-generation --bogus").code, 2);
  EXPECT_EQ(run("pattern-generation --variant nope").code, 2);
  EXPECT_EQ(run("pattern-generation --config-file /nonexistent.cfg").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, BadConfigValueExitsWithTwo) {
  const auto dir = fresh("badvalue");
  const auto cfg = write_file(dir / "bad.cfg", "[opt]\neta = fast\n");
  const auto r = run("pattern-generation --config-file " + cfg + " --output-dir " + dir.string());
  EXPECT_EQ(r.code, 2) << r.out;
}

TEST(Cli, TrainingWritesOutputsAndRerunsFromManifest) {
  const auto dir = fresh("pattern");
  const auto cfg = write_file(dir / "tiny.cfg", kTinyPattern);
  const auto a = dir / "a";
  auto r = run("pattern-generation --config-file " + cfg + " --spikes --output-dir " + a.string());
  ASSERT_EQ(r.code, 0) << r.out;
  const auto rows = read_metrics_csv((a / "metrics.csv").string());
  EXPECT_EQ(rows.size(), 3u);
  EXPECT_FALSE(read_spike_csv((a / "spikes.csv").string()).empty());
  const auto ma = manifest(a);
  EXPECT_EQ(ma.subcommand, "pattern-generation");
  EXPECT_EQ(result(ma, "self_checks"), "pass");

  const auto b = dir / "b";
  r = run("pattern-generation --config-file " + (a / "manifest.json").string() + " --output-dir " +
          b.string());
  ASSERT_EQ(r.code, 0) << r.out;
  const auto mb = manifest(b);
  EXPECT_EQ(result(ma, "weight_hash"), result(mb, "weight_hash"));
  const auto rows_b = read_metrics_csv((b / "metrics.csv").string());
  ASSERT_EQ(rows_b.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(rows_b[i].loss, rows[i].loss);
  EXPECT_EQ(ma.config.items(), mb.config.items());
}

TEST(Cli, FlagsOverrideConfigAndVariantRederivesPolicy) {
  const auto dir = fresh("variant");
  const auto cfg = write_file(dir / "tiny.cfg", kTinyPattern);
  const auto a = dir / "a";
  ASSERT_EQ(run("pattern-generation --config-file " + cfg + " --output-dir " + a.string()).code, 0);
  const auto b = dir / "b";
  const auto r = run("pattern-generation --config-file " + (a / "manifest.json").string() +
                     " --variant eprop-plus --seed 9 --iterations 2 --output-dir " + b.string());
  ASSERT_EQ(r.code, 0) << r.out;
  const auto m = manifest(b);
  EXPECT_EQ(m.config.get_string("policy", ""), "per-spike");
  EXPECT_EQ(m.config.get_string("surrogate.kind", ""), "exponential");
  EXPECT_EQ(m.config.get_string("reset", ""), "false");
  EXPECT_EQ(m.seed, 9u);
  EXPECT_EQ(read_metrics_csv((b / "metrics.csv").string()).size(), 2u);
}

TEST(Cli, NmnistDatasetHandling) {
  const auto dir = fresh("nmnist");
  auto r = run("nmnist --dataset-path " + (dir / "missing").string() + " --output-dir " +
               (dir / "o").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("EPROP_NMNIST_PATH"), std::string::npos);

  synthetic::SyntheticNmnistConfig sc;
  sc.per_class = 2;
  synthetic::write_synthetic_nmnist((dir / "data").string(), "Train", sc);
  const auto cfg = write_file(dir / "n.cfg", "[network]\nn_rec = 8\n[nmnist]\nduration = 60\n");
  r = run("nmnist --iterations 2 --config-file " + cfg + " --dataset-path " +
          (dir / "data").string() + " --output-dir " + (dir / "o").string());
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(result(manifest(dir / "o"), "nmnist.samples"), "4");

  // A truncated event file is a format error.
  std::ofstream(dir / "data" / "Train" / "0" / "zzz.bin", std::ios::binary) << "abc";
  r = run("nmnist --iterations 1 --config-file " + cfg + " --dataset-path " +
          (dir / "data").string() + " --output-dir " + (dir / "o").string());
  EXPECT_EQ(r.code, 2) << r.out;
  EXPECT_NE(r.out.find("byte offset 0"), std::string::npos) << r.out;
}

TEST(Cli, ScalingPrintsOneRowPerWorkerCount) {
  const auto dir = fresh("scaling");
  const auto cfg = write_file(dir / "s.cfg",
                              "[scaling]\nn_rec = 300\nn_in = 30\nn_out = 3\nindeg_in = 10\n"
                              "indeg_rec = 20\nindeg_out = 50\noutdeg_fb = 30\n");
  const auto r = run("scaling --config-file " + cfg + " --steps 1000 --output-dir " + dir.string());
  ASSERT_EQ(r.code, 0) << r.out;
  std::istringstream is(r.out);
  std::string line;
  int rows = 0;
  bool header = false;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string first;
    ls >> first;
    if (first == "workers") header = true;
    if (first == "1" || first == "2" || first == "4") ++rows;
  }
  EXPECT_TRUE(header);
  EXPECT_EQ(rows, 3);
  const auto m = manifest(dir);
  EXPECT_EQ(result(m, "self_checks"), "pass");
  EXPECT_EQ(m.config.get_string("scaling.steps", ""), "1000");
}

TEST(Cli, VerifyPassesAllChecks) {
  const auto dir = fresh("verify");
  const auto r = run("verify --output-dir " + dir.string());
  EXPECT_EQ(r.code, 0) << r.out;
  std::size_t pass = 0, pos = 0;
  while ((pos = r.out.find("PASS", pos)) != std::string::npos) {
    ++pass;
    ++pos;
  }
  EXPECT_EQ(pass, 4u);
}
