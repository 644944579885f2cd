#include "eprop/algorithms.hpp"

#include <algorithm>
#include <deque>

#include "eprop/error.hpp"

namespace eprop {

void DelayConfig::validate() const {
  if (d < 0 || d_ls < 0) throw ConfigError("delays must be non-negative");
  if (cutoff < 1) throw ConfigError("cutoff must be >= 1");
}

void SynapseHistories::validate() const {
  const auto n = static_cast<std::size_t>(T + 1);
  if (T < 1 || psi.size() != n || L.size() != n || f.size() != n || z.size() != n)
    throw ProtocolError("history shorter than T");
}

std::vector<std::int64_t> SynapseHistories::spike_times() const {
  std::vector<std::int64_t> out;
  for (std::int64_t t = 0; t <= T; ++t)
    if (z[static_cast<std::size_t>(t)]) out.push_back(t);
  return out;
}

DelayedPairing apply_learning_signal_delay(std::int64_t t, const DelayConfig& d) {
  return DelayedPairing{t - d.d_ls, t - d.d_sync()};
}

namespace {

struct Delayed {
  double filt = 0.0;
  double reg = 0.0;
  double f = 0.0;
};

// Shared per-step machinery. The trace index q = t - d_sync lags the
// contribution step t; the lag is realized either by delaying the trace
// values (Algorithms 1 and 2) or by delaying the presynaptic input
// (Algorithms 3 to 5). Both perform the same floating-point operations.
class Kernel {
 public:
  Kernel(const SynapseHistories& h, const AlgoParams& p) : h_(h), p_(p) {
    h.validate();
    p.delays.validate();
    ds_ = p.delays.d_sync();
  }

  std::int64_t d_sync() const { return ds_; }

  Delayed advance(std::int64_t q, double u) {
    const auto i = static_cast<std::size_t>(q);
    advance_trace(e_, u, h_.psi[i - 1], h_.psi[i], p_.trace, reg_beta(p_.reg, q - 1));
    return Delayed{e_.filt.value, e_.reg_trace, h_.f[i]};
  }

  // Trace evolution past the cutoff: no surrogate, no contribution.
  void decay(std::int64_t q, double u) {
    advance_trace(e_, u, 0.0, 0.0, p_.trace, reg_beta(p_.reg, q - 1));
  }

  double contrib(std::int64_t t, const Delayed& x) const {
    const std::int64_t li = t - p_.delays.d_ls;
    const double L = li >= 0 ? h_.L[static_cast<std::size_t>(li)] : 0.0;
    return contribution(L, x.filt, x.reg, x.f, p_.c_star, p_.reg.f_target);
  }

 private:
  const SynapseHistories& h_;
  const AlgoParams& p_;
  EligibilityState e_;
  std::int64_t ds_ = 0;
};

double apply_step(double w, double g, AdamState& adam, const OptimizerConfig& c) {
  if (c.kind == OptimizerKind::GD) return gd_update(w, g, c.eta);
  return w - adam_step(adam, g, c);
}

template <class OnContribution>
void run_time_driven(const SynapseHistories& h, const AlgoParams& p, OnContribution&& on) {
  Kernel k(h, p);
  std::deque<Delayed> fifo(static_cast<std::size_t>(k.d_sync()));
  for (std::int64_t t = 1; t <= h.T; ++t) {
    fifo.push_back(k.advance(t, h.z[static_cast<std::size_t>(t - 1)]));
    const Delayed x = fifo.front();
    fifo.pop_front();
    on(t, k.contrib(t, x));
  }
}

// Presynaptic input for the trace index q = t - d_sync, delivered either by
// a dense FIFO or a sparse list of spike times.
class ZFifo {
 public:
  ZFifo(std::int64_t ds, std::uint8_t z0) : q_(static_cast<std::size_t>(ds + 1), 0) {
    q_.back() = z0;
  }
  double pop_push(std::uint8_t z_t) {
    const double u = q_.front();
    q_.pop_front();
    q_.push_back(z_t);
    return u;
  }
  std::size_t size() const { return q_.size(); }

 private:
  std::deque<std::uint8_t> q_;
};

class SpikeTimes {
 public:
  SpikeTimes(std::int64_t ds, std::uint8_t z0) : ds_(ds) {
    if (z0) times_.push_back(0);
  }
  double pop_push(std::int64_t t, std::uint8_t z_t) {
    double u = 0.0;
    if (!times_.empty() && times_.front() == t - ds_ - 1) {
      times_.pop_front();
      u = 1.0;
    }
    if (z_t) times_.push_back(t);
    max_size_ = std::max(max_size_, times_.size());
    return u;
  }
  std::size_t max_size() const { return max_size_; }

 private:
  std::int64_t ds_;
  std::deque<std::int64_t> times_;
  std::size_t max_size_ = 0;
};

// Walks the inter-spike intervals (t_prev, t_spike] and a final (t_prev, T].
// on_step(t, u, spike_now) handles one step; on_event(t) runs after each interval.
template <class Step, class Event>
void walk_events(const SynapseHistories& h, Step&& on_step, Event&& on_event) {
  std::int64_t t_prev = 0;
  auto spikes = h.spike_times();
  if (!spikes.empty() && spikes.front() == 0) spikes.erase(spikes.begin());
  if (spikes.empty() || spikes.back() != h.T) spikes.push_back(h.T);
  for (std::int64_t t_spike : spikes) {
    if (t_spike <= t_prev) throw ProtocolError("spike time not after previous spike");
    for (std::int64_t t = t_prev + 1; t <= t_spike; ++t) on_step(t, t_prev, t_spike);
    on_event(t_spike);
    t_prev = t_spike;
  }
}

}  // namespace

AlgoResult time_driven_gradient(const SynapseHistories& h, const AlgoParams& p, double w0) {
  AlgoResult r;
  r.contributions.assign(static_cast<std::size_t>(h.T + 1), 0.0);
  run_time_driven(h, p, [&](std::int64_t t, double c) {
    r.contributions[static_cast<std::size_t>(t)] = c;
    r.grad += c;
  });
  if (p.opt.kind == OptimizerKind::GD) {
    r.weight = gd_update(w0, r.grad, p.opt.eta);
  } else {
    AdamState s;
    r.weight = adam_update(s, w0, std::span<const double>(r.contributions).subspan(1), p.opt);
  }
  return r;
}

AlgoResult time_driven_weight_update(const SynapseHistories& h, const AlgoParams& p,
                                     double w0) {
  AlgoResult r;
  r.contributions.assign(static_cast<std::size_t>(h.T + 1), 0.0);
  r.weight = w0;
  AdamState s;
  run_time_driven(h, p, [&](std::int64_t t, double c) {
    r.contributions[static_cast<std::size_t>(t)] = c;
    r.grad += c;
    r.weight = apply_step(r.weight, c, s, p.opt);
  });
  return r;
}

namespace {

template <class Source>
AlgoResult event_driven_impl(const SynapseHistories& h, const AlgoParams& p, double w0,
                             Source& src) {
  AlgoResult r;
  r.contributions.assign(static_cast<std::size_t>(h.T + 1), 0.0);
  Kernel k(h, p);
  const std::int64_t ds = k.d_sync();
  walk_events(
      h,
      [&](std::int64_t t, std::int64_t, std::int64_t t_spike) {
        const double u = src.pop_push(t, t == t_spike ? h.z[static_cast<std::size_t>(t)] : 0);
        const std::int64_t q = t - ds;
        const Delayed x = q >= 1 ? k.advance(q, u) : Delayed{};
        const double c = k.contrib(t, x);
        r.contributions[static_cast<std::size_t>(t)] = c;
        r.grad += c;
      },
      [](std::int64_t) {});
  if (p.opt.kind == OptimizerKind::GD) {
    r.weight = gd_update(w0, r.grad, p.opt.eta);
  } else {
    AdamState s;
    r.weight = adam_update(s, w0, std::span<const double>(r.contributions).subspan(1), p.opt);
  }
  return r;
}

struct FifoSource {
  ZFifo fifo;
  double pop_push(std::int64_t, std::uint8_t z) { return fifo.pop_push(z); }
};

}  // namespace

AlgoResult event_driven_update(const SynapseHistories& h, const AlgoParams& p, double w0) {
  FifoSource src{ZFifo(p.delays.d_sync(), h.z.at(0))};
  return event_driven_impl(h, p, w0, src);
}

AlgoResult optimized_event_update(const SynapseHistories& h, const AlgoParams& p, double w0,
                                  std::size_t* max_pending) {
  SpikeTimes src(p.delays.d_sync(), h.z.at(0));
  AlgoResult r = event_driven_impl(h, p, w0, src);
  if (max_pending) *max_pending = src.max_size();
  return r;
}

AlgoResult event_driven_per_spike_update(const SynapseHistories& h, const AlgoParams& p,
                                         double w0) {
  AlgoResult r;
  r.contributions.assign(static_cast<std::size_t>(h.T + 1), 0.0);
  r.weight = w0;
  Kernel k(h, p);
  const std::int64_t ds = k.d_sync();
  const std::int64_t cutoff = p.delays.cutoff;
  ZFifo fifo(ds, h.z.at(0));
  AdamState s;
  double acc = 0.0;
  double adam_acc = 0.0;
  walk_events(
      h,
      [&](std::int64_t t, std::int64_t t_prev, std::int64_t t_spike) {
        const double u = fifo.pop_push(t == t_spike ? h.z[static_cast<std::size_t>(t)] : 0);
        const std::int64_t q = t - ds;
        double c = 0.0;
        if (t <= t_prev + cutoff) {
          const Delayed x = q >= 1 ? k.advance(q, u) : Delayed{};
          c = k.contrib(t, x);
        } else if (q >= 1) {
          k.decay(q, u);
        }
        r.contributions[static_cast<std::size_t>(t)] = c;
        r.grad += c;
        acc += c;
        if (p.opt.kind == OptimizerKind::Adam) adam_acc += adam_step(s, c, p.opt);
      },
      [&](std::int64_t) {
        if (p.opt.kind == OptimizerKind::GD)
          r.weight = gd_update(r.weight, acc, p.opt.eta);
        else
          r.weight -= adam_acc;
        acc = 0.0;
        adam_acc = 0.0;
      });
  return r;
}

}  // namespace eprop
