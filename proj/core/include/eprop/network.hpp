#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "eprop/algorithms.hpp"
#include "eprop/config.hpp"
#include "eprop/history.hpp"
#include "eprop/neuron.hpp"
#include "eprop/optimizer.hpp"
#include "eprop/plasticity.hpp"
#include "eprop/signals.hpp"
#include "eprop/tasks.hpp"
#include "eprop/workers.hpp"

namespace eprop {

enum class Variant { Bsshslm2020, EpropPlus };
enum class SimMode { TimeDriven, EventDriven };
enum class NeuronModel { Lif, IgnoreAndFire };

struct WeightInit {
  double mean = 0.0;
  double std = 1.0;
  bool scale_by_fan_in = true;  // std / sqrt(fan_in)
};

struct ProjectionConfig {
  double p_connect = 1.0;
  std::int64_t indegree = -1;  // >= 0: fixed in-degree instead of p_connect
  WeightInit init;
  bool plastic = true;
};

struct NetworkConfig {
  int n_in = 100;
  int n_rec = 100;
  int n_out = 1;
  int n_adaptive = 0;  // the last n_adaptive recurrent neurons are ALIF

  NeuronModel model = NeuronModel::Lif;
  LifParams lif;
  double beta_a_adaptive = 1.7;
  double tau_a_adaptive = 2000.0;
  double tau_out = 20.0;
  double iaf_rate_hz = 5.0;

  ProjectionConfig in;
  ProjectionConfig rec;
  ProjectionConfig out;
  WeightInit feedback{0.0, 1.0, false};
  std::int64_t feedback_outdegree = -1;  // >= 0: sparse random feedback

  DelayConfig delays;
  LossKind loss = LossKind::MSE;
  RegularizationParams reg;
  OptimizerConfig opt;
  UpdatePolicyKind policy = UpdatePolicyKind::PerIteration;
  std::int64_t sample_steps = 1000;
  Variant variant = Variant::Bsshslm2020;
  bool reset_between_samples = true;
  double tau_e = -1.0;  // eligibility filter time constant; < 0 uses tau_out
  std::uint64_t seed = 1;
  SimMode mode = SimMode::EventDriven;
  int workers = 1;
  std::int64_t archive_clean_every = 0;  // steps between cleaning calls; 0 = once per sample

  void validate() const;
  double kappa() const;
  double kappa_e() const;

  // Applies the variant's implied settings (surrogate, loss, regularization
  // form, update policy, resets) on top of an existing config.
  static NetworkConfig for_variant(Variant v, NetworkConfig base);
  // Reads network.*, neuron.*, surrogate.*, weights.*, connect.*, plastic.*,
  // delays.*, reg.*, opt.* and run keys; absent keys keep the base value.
  static NetworkConfig from(const Config& c, NetworkConfig base);
  // Inverse of from() for the run manifest.
  Config to_config() const;
};

std::string to_string(Variant v);
std::string to_string(SimMode m);
std::string to_string(LossKind k);
std::string to_string(SurrogateKind k);
std::string to_string(OptimizerKind k);
std::string to_string(RegMode m);
std::string to_string(UpdatePolicyKind k);
std::string to_string(NeuronModel m);
Variant parse_variant(const std::string& s);
SimMode parse_mode(const std::string& s);
LossKind parse_loss(const std::string& s);
SurrogateKind parse_surrogate(const std::string& s);
OptimizerKind parse_optimizer(const std::string& s);
RegMode parse_reg_mode(const std::string& s);
UpdatePolicyKind parse_policy(const std::string& s);
NeuronModel parse_model(const std::string& s);

// Per-synapse plasticity state shared by both simulation modes.
struct SynapseState {
  double w = 0.0;
  EligibilityState e;  // output synapses use e.filt as F_kappa[z]
  double psi_prev = 0.0;
  double grad_sum = 0.0;
  double adam_acc = 0.0;
  double sum_e = 0.0;
  AdamState adam;
  std::int64_t last = -1;       // last folded entry
  std::int64_t anchor = 0;      // per-spike: first entry after the latest update
  std::int64_t iter = 0;        // training iteration owning the accumulators
  std::int64_t t_reg = 0;       // registered update time in the target's archive
  std::int64_t decay_n = 0;     // trace decay steps not yet applied
  std::int64_t decay_from = 0;  // first of those steps
  std::vector<std::int64_t> pending;  // arrival steps not yet folded
  std::vector<double> buffer;         // per-step gradients for Adam with batching
  std::vector<double> reg_hist;       // per-step e of the current sample (static reg with Adam)
};

struct SynapseGroup {
  Projection topo;  // source-major, targets ascending per source
  std::vector<SynapseState> syn;
  bool plastic = true;
  // Synapse indices per (worker, source), targets ascending.
  std::vector<std::vector<std::int64_t>> by_worker;  // [worker * n_src + src]

  std::int64_t target(std::int64_t idx) const { return topo.tgt[static_cast<std::size_t>(idx)]; }
};

struct Network {
  NetworkConfig cfg;
  std::vector<LifParams> params;  // per recurrent neuron
  std::vector<TraceParams> trace;
  double kappa = 0.0;
  SynapseGroup in, rec, out;
  std::vector<double> B;  // n_rec x n_out
  std::vector<std::vector<std::pair<int, double>>> feedback;  // nonzero B per neuron

  // Dynamic state.
  std::vector<RecurrentNeuronState> neurons;
  std::vector<IgnoreAndFireState> iaf;
  std::vector<double> psi;
  std::vector<double> rate;
  std::vector<ReadoutState> readouts;
  std::vector<double> I_in, I_rec, I_out;
  // Spike and input history rings indexed by step modulo their length.
  std::vector<std::vector<std::uint8_t>> z_ring;
  std::vector<std::vector<std::uint8_t>> x_ring;
  std::vector<std::vector<double>> psi_ring, rate_ring;  // time-driven only

  std::vector<RecurrentArchive> archives;
  std::vector<ReadoutArchive> readout_archives;

  std::int64_t now = 0;           // next global step
  std::int64_t sample_start = 0;  // first step of the current sample
  std::vector<std::int64_t> iter_starts{0};
  bool plastic = true;
  bool apply_updates = true;
  std::shared_ptr<WorkerPool> pool;

  std::size_t n_synapses() const;
  // Hash over the bit patterns of every weight, in group and synapse order.
  std::uint64_t weight_hash() const;
  int n_workers() const { return pool ? pool->size() : 1; }
};

// Deterministic given cfg.seed. Throws ConfigError for invalid connectivity.
Network build_network(const NetworkConfig& cfg);

// Builds around given source-major projections (weights taken from them).
// feedback is n_out -> n_rec and fills B.
Network build_network(const NetworkConfig& cfg, Projection in, Projection rec, Projection out,
                      const Projection& feedback);

// Clears archives and per-synapse plastic state so that plasticity restarts
// at net.now; weights and optimizer moments are kept.
void restart_plasticity(Network& net);

}  // namespace eprop
