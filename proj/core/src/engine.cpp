#include "eprop/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>

#include "eprop/error.hpp"

namespace eprop {

namespace {

enum class Kind { Input, Recurrent, Output };

// Both simulation modes fold archived (or ring-buffered) values into the
// synapse through the same functions below, one entry at a time and in
// entry order, so their arithmetic is identical.
class Engine {
 public:
  explicit Engine(Network& net) : net_(net) {
    const auto& c = net.cfg;
    T_ = c.sample_steps;
    reset_ = c.reset_between_samples;
    d_ = c.delays.d;
    d_ls_ = c.delays.d_ls;
    cutoff_ = c.delays.cutoff;
    per_spike_ = c.policy == UpdatePolicyKind::PerSpike;
    adam_ = c.opt.kind == OptimizerKind::Adam;
    event_ = c.mode == SimMode::EventDriven;
    reg_ = c.reg;
    static_reg_ = reg_.mode == RegMode::Static;
    reg_on_ = reg_.mode != RegMode::Off && reg_.c_reg != 0.0;
    c_star_ = reg_on_ && !static_reg_ ? effective_c_reg(reg_, T_) : 0.0;
    c_static_ = reg_on_ && static_reg_ ? effective_c_reg(reg_, T_) : 0.0;
    ring_z_ = static_cast<std::int64_t>(net.z_ring.size());
    ring_x_ = static_cast<std::int64_t>(net.x_ring.size());
  }

  std::int64_t local(std::int64_t q) const { return q % T_; }

  void run(const std::function<void(int)>& fn) {
    if (net_.pool)
      net_.pool->run(fn);
    else
      fn(0);
  }

  // ---- optimizer bookkeeping ------------------------------------------------

  void apply_iteration(SynapseState& s) {
    const double n = static_cast<double>(net_.cfg.opt.batch_size);
    if (adam_) {
      double acc = 0.0;
      for (double& g : s.buffer) {
        acc += adam_step(s.adam, g / n, net_.cfg.opt);
        g = 0.0;
      }
      s.w -= acc;
    } else {
      s.w = gd_update(s.w, s.grad_sum / n, net_.cfg.opt.eta);
      s.grad_sum = 0.0;
    }
  }

  void advance_iterations(SynapseState& s, std::int64_t t) {
    if (!net_.apply_updates) return;
    const auto& st = net_.iter_starts;
    while (s.iter + 1 < static_cast<std::int64_t>(st.size()) &&
           t >= st[static_cast<std::size_t>(s.iter + 1)]) {
      apply_iteration(s);
      ++s.iter;
    }
  }

  void apply_spike_update(SynapseState& s) {
    if (!net_.apply_updates) return;
    if (adam_) {
      s.w -= s.adam_acc;
      s.adam_acc = 0.0;
    } else {
      s.w = gd_update(s.w, s.grad_sum, net_.cfg.opt.eta);
      s.grad_sum = 0.0;
    }
  }

  // Contribution g attributed to step t.
  void account(SynapseState& s, std::int64_t t, double g) {
    if (per_spike_) {
      if (adam_)
        s.adam_acc += adam_step(s.adam, g, net_.cfg.opt);
      else
        s.grad_sum += g;
      return;
    }
    advance_iterations(s, t);
    if (adam_)
      s.buffer[static_cast<std::size_t>(local(t))] += g;
    else
      s.grad_sum += g;
  }

  // ---- recurrent and input synapses -----------------------------------------

  void apply_decay(SynapseState& s, const TraceParams& tp) {
    const auto n = static_cast<double>(s.decay_n);
    EligibilityState& e = s.e;
    if (e.eps_v != 0.0) e.eps_v *= std::pow(tp.alpha, n);
    if (tp.beta_a != 0.0 && e.eps_a != 0.0) e.eps_a *= std::pow(tp.rho, n);
    if (e.filt.value != 0.0) e.filt.value *= std::pow(tp.kappa_e, n);
    if (e.reg_trace != 0.0) {
      if (reg_.mode == RegMode::Ema) {
        e.reg_trace *= std::pow(reg_.beta_ema, n);
      } else if (reg_.mode == RegMode::Cumulative) {
        for (std::int64_t i = 0; i < s.decay_n; ++i)
          e.reg_trace *= reg_beta(reg_, local(s.decay_from + i));
      } else {
        e.reg_trace = 0.0;
      }
    }
    s.decay_n = 0;
  }

  void fold(SynapseState& s, const TraceParams& tp, std::int64_t q, double u, double psi, double L,
            double f) {
    const std::int64_t lq = local(q);
    if (lq == 0) {
      if (reset_) {
        s.e = EligibilityState{};
        s.psi_prev = 0.0;
        s.decay_n = 0;
      }
      s.sum_e = 0.0;
      std::fill(s.reg_hist.begin(), s.reg_hist.end(), 0.0);
    }
    double g = 0.0;
    if (per_spike_ && q >= s.anchor + cutoff_) {
      // Past the cutoff: decay only, batched until the next live entry.
      if (s.decay_n++ == 0) s.decay_from = q;
      s.psi_prev = 0.0;
    } else {
      if (s.decay_n) apply_decay(s, tp);
      advance_trace(s.e, u, s.psi_prev, psi, tp, reg_beta(reg_, lq));
      s.psi_prev = psi;
      if (!reset_ || lq + d_ + d_ls_ < T_) {
        if (static_reg_) {
          g = contribution(L, s.e.filt.value, s.e.reg_trace, f, 0.0, reg_.f_target);
          s.sum_e += s.e.reg_trace;
          if (!s.reg_hist.empty()) {
            s.reg_hist[static_cast<std::size_t>(lq)] = s.e.reg_trace;
            if (lq == T_ - 1 - d_ - d_ls_) g += spread_static_reg(s, q, f);
          } else if (lq == T_ - 1 - d_ - d_ls_) {
            g += reg_gradient(c_static_, f, reg_.f_target, s.sum_e);
          }
        } else {
          g = contribution(L, s.e.filt.value, s.e.reg_trace, f, c_star_, reg_.f_target);
        }
      }
    }
    account(s, q + d_, g);
    s.last = q;
  }

  // Adam needs the static regularization term per step, but the rate is
  // only known at the sample's last counted entry q. Entries before it get
  // their share here, in the same buffer slots account() would use; the
  // share of q itself is returned.
  double spread_static_reg(SynapseState& s, std::int64_t q, double f) {
    const double k = c_static_ * (f - reg_.f_target);
    const std::int64_t lq = local(q);
    for (std::int64_t i = 0; i < lq; ++i)
      s.buffer[static_cast<std::size_t>(local(q - lq + i + d_))] +=
          k * s.reg_hist[static_cast<std::size_t>(i)];
    return k * s.reg_hist[static_cast<std::size_t>(lq)];
  }

  // Entries [a, b] that cannot contribute: a silent stretch from a sample
  // start, the uncounted tail of a sample, or steps past the cutoff.
  void skip_range(SynapseState& s, std::int64_t a, std::int64_t b) {
    std::int64_t q = a;
    while (q <= b) {
      const std::int64_t ss = q - local(q);
      const std::int64_t seg_end = std::min(b, ss + T_ - 1);
      if (q == ss) {
        if (reset_) {
          s.e = EligibilityState{};
          s.decay_n = 0;
        }
        s.sum_e = 0.0;
        std::fill(s.reg_hist.begin(), s.reg_hist.end(), 0.0);
      }
      const std::int64_t n = seg_end - q + 1;
      if (s.decay_n == 0) s.decay_from = q;
      s.decay_n += n;
      s.psi_prev = 0.0;
      if (per_spike_ && adam_)
        for (std::int64_t i = 0; i < n; ++i) s.adam_acc += adam_step(s.adam, 0.0, net_.cfg.opt);
      q = seg_end + 1;
    }
    s.last = b;
    auto it = std::upper_bound(s.pending.begin(), s.pending.end(), b);
    s.pending.erase(s.pending.begin(), it);
  }

  static double pop_pending(SynapseState& s, std::int64_t q) {
    if (!s.pending.empty() && s.pending.front() == q) {
      s.pending.erase(s.pending.begin());
      return 1.0;
    }
    return 0.0;
  }

  void process_to(SynapseState& s, RecurrentArchive& arch, const TraceParams& tp,
                  std::int64_t q_end) {
    std::int64_t q = s.last + 1;
    while (q <= q_end) {
      std::int64_t hi = q_end;
      if (reset_) {
        const std::int64_t ss = q - local(q);
        const std::int64_t tail = ss + T_ - d_ - d_ls_;
        if (q >= tail) {
          const std::int64_t b = std::min(q_end, ss + T_ - 1);
          skip_range(s, q, b);
          q = b + 1;
          continue;
        }
        hi = std::min(hi, tail - 1);
        if (q == ss && (s.pending.empty() || s.pending.front() > hi)) {
          skip_range(s, q, hi);
          q = hi + 1;
          continue;
        }
      }
      if (per_spike_) {
        if (q >= s.anchor + cutoff_) {
          skip_range(s, q, q_end);
          return;
        }
        hi = std::min(hi, s.anchor + cutoff_ - 1);
      }
      for (const auto& en : arch.get_range(q - 1, hi))
        fold(s, tp, en.t, pop_pending(s, en.t), en.psi, en.L, en.f);
      q = hi + 1;
    }
  }

  std::int64_t reg_time(const SynapseState& s) const {
    if (per_spike_) return s.anchor;
    const std::int64_t nf = s.last + 1;
    if (!reset_) return nf;
    std::int64_t ss = nf - local(nf);
    if (nf - ss >= T_ - d_ - d_ls_) ss += T_;
    return ss;
  }

  std::int64_t reg_time_out(const SynapseState& s) const {
    if (per_spike_) return s.anchor;
    const std::int64_t nf = s.last + 1;
    return reset_ ? nf - local(nf) : nf;
  }

  static void reregister(UpdateHistory& h, SynapseState& s, std::int64_t t) {
    if (t == s.t_reg) return;
    h.register_update(s.t_reg, t);
    s.t_reg = t;
  }

  // ---- output synapses ------------------------------------------------------

  void fold_out(SynapseState& s, std::int64_t q, double u, double E) {
    if (reset_ && local(q) == 0) s.e.filt.value = 0.0;
    const bool live = !(per_spike_ && q >= s.anchor + cutoff_);
    s.e.filt.value = net_.kappa * s.e.filt.value + u;
    account(s, q, live ? E * s.e.filt.value : 0.0);
    s.last = q;
  }

  void process_out(SynapseState& s, ReadoutArchive& arch, std::int64_t q_end) {
    std::int64_t q = s.last + 1;
    while (q <= q_end) {
      std::int64_t hi = q_end;
      if (reset_) {
        const std::int64_t ss = q - local(q);
        hi = std::min(hi, ss + T_ - 1);
        if (q == ss && (s.pending.empty() || s.pending.front() > hi)) {
          s.e.filt.value = 0.0;
          if (per_spike_ && adam_)
            for (std::int64_t i = q; i <= hi; ++i)
              s.adam_acc += adam_step(s.adam, 0.0, net_.cfg.opt);
          s.last = hi;
          q = hi + 1;
          continue;
        }
      }
      if (per_spike_) {
        if (q >= s.anchor + cutoff_) {
          for (; q <= hi; ++q) fold_out(s, q, pop_pending(s, q), 0.0);
          continue;
        }
        hi = std::min(hi, s.anchor + cutoff_ - 1);
      }
      for (const auto& en : arch.get_range(q - 1, hi)) fold_out(s, en.t, pop_pending(s, en.t), en.E);
      q = hi + 1;
    }
  }

  // ---- spike delivery -------------------------------------------------------

  void on_arrival(SynapseState& s, std::int64_t j, std::int64_t tau, Kind kind) {
    const bool out = kind == Kind::Output;
    if (event_) {
      if (out)
        process_out(s, net_.readout_archives[static_cast<std::size_t>(j)], tau - 1);
      else
        process_to(s, net_.archives[static_cast<std::size_t>(j)],
                   net_.trace[static_cast<std::size_t>(j)], tau - 1 - d_);
    }
    if (per_spike_) {
      apply_spike_update(s);
      s.anchor = out ? tau : tau - d_;
    } else if (event_) {
      advance_iterations(s, tau);
    }
    if (event_) {
      if (out)
        reregister(net_.readout_archives[static_cast<std::size_t>(j)].update_history(), s,
                   reg_time_out(s));
      else
        reregister(net_.archives[static_cast<std::size_t>(j)].update_history(), s, reg_time(s));
      s.pending.push_back(tau);
    }
  }

  void transmit(SynapseGroup& g, Kind kind, const std::vector<std::int64_t>& sources,
                std::int64_t tau, std::vector<double>& I) {
    if (sources.empty() || g.syn.empty()) return;
    const bool plastic = net_.plastic && g.plastic;
    const auto n_src = static_cast<std::size_t>(g.topo.n_src);
    run([&](int w) {
      for (std::int64_t src : sources)
        for (std::int64_t idx : g.by_worker[static_cast<std::size_t>(w) * n_src +
                                            static_cast<std::size_t>(src)]) {
          SynapseState& s = g.syn[static_cast<std::size_t>(idx)];
          const std::int64_t j = g.topo.tgt[static_cast<std::size_t>(idx)];
          if (plastic) on_arrival(s, j, tau, kind);
          I[static_cast<std::size_t>(j)] += s.w;
        }
    });
  }

  // ---- time-driven synapse work ---------------------------------------------

  void time_driven_fold(std::int64_t t, const std::vector<double>& L, const std::vector<double>& E) {
    const int W = net_.n_workers();
    const std::int64_t q = t - d_;
    const bool l_valid = !reset_ || q >= t - local(t);
    run([&](int w) {
      auto fold_group = [&](SynapseGroup& g, Kind kind) {
        if (!g.plastic || q < 0) return;
        const auto n_src = static_cast<std::size_t>(g.topo.n_src);
        const auto slot = static_cast<std::size_t>(q % static_cast<std::int64_t>(net_.psi_ring.size()));
        for (std::size_t src = 0; src < n_src; ++src) {
          double u;
          if (kind == Kind::Input)
            u = net_.x_ring[static_cast<std::size_t>(q % ring_x_)][src];
          else
            u = q >= 1 ? net_.z_ring[static_cast<std::size_t>((q - 1) % ring_z_)][src] : 0.0;
          for (std::int64_t idx : g.by_worker[static_cast<std::size_t>(w) * n_src + src]) {
            SynapseState& s = g.syn[static_cast<std::size_t>(idx)];
            if (q <= s.last) continue;
            const auto j = static_cast<std::size_t>(g.topo.tgt[static_cast<std::size_t>(idx)]);
            fold(s, net_.trace[j], q, u, net_.psi_ring[slot][j], l_valid ? L[j] : 0.0,
                 net_.rate_ring[slot][j]);
          }
        }
      };
      fold_group(net_.in, Kind::Input);
      fold_group(net_.rec, Kind::Recurrent);
      if (net_.out.plastic) {
        const auto n_src = static_cast<std::size_t>(net_.out.topo.n_src);
        for (std::size_t src = 0; src < n_src; ++src) {
          const double u =
              t - d_ >= 0 ? net_.z_ring[static_cast<std::size_t>((t - d_) % ring_z_)][src] : 0.0;
          for (std::int64_t idx : net_.out.by_worker[static_cast<std::size_t>(w) * n_src + src]) {
            SynapseState& s = net_.out.syn[static_cast<std::size_t>(idx)];
            if (t <= s.last) continue;
            fold_out(s, t, u, E[static_cast<std::size_t>(net_.out.topo.tgt[static_cast<std::size_t>(idx)])]);
          }
        }
      }
    });
    (void)W;
  }

  // ---- one simulation step --------------------------------------------------

  struct StepIO {
    const std::uint8_t* x = nullptr;  // input row, n_in entries
    const double* target = nullptr;   // K entries
    bool window = false;
    const std::set<std::int64_t>* forced = nullptr;  // neurons forced to spike
    double* outputs = nullptr;  // K entries written
    double loss = 0.0;
    std::int64_t spikes = 0;
  };

  void step(StepIO& io, Recorder* rec) {
    const std::int64_t t = net_.now;
    const std::int64_t lt = local(t);
    const auto J = static_cast<std::size_t>(net_.cfg.n_rec);
    const auto K = static_cast<std::size_t>(net_.cfg.n_out);
    const auto I = static_cast<std::size_t>(net_.cfg.n_in);
    const int W = net_.n_workers();
    const bool archive_rec = event_ && net_.plastic && (net_.in.plastic || net_.rec.plastic);
    const bool archive_out = event_ && net_.plastic && net_.out.plastic;

    if (lt == 0) net_.sample_start = t;
    if (reset_ && lt == 0) {
      for (std::size_t j = 0; j < J; ++j) {
        net_.neurons[j] = initial_state(net_.params[j]);
        net_.rate[j] = 0.0;
      }
      for (auto& r : net_.readouts) r.y = 0.0;
      for (auto& row : net_.z_ring) std::fill(row.begin(), row.end(), 0);
    }

    auto& xrow = net_.x_ring[static_cast<std::size_t>(t % ring_x_)];
    std::vector<std::int64_t> in_src, rec_src, out_src;
    for (std::size_t i = 0; i < I; ++i) {
      xrow[i] = io.x[i];
      if (io.x[i]) in_src.push_back(static_cast<std::int64_t>(i));
    }
    const auto& zprev = net_.z_ring[static_cast<std::size_t>((t + ring_z_ - 1) % ring_z_)];
    for (std::size_t j = 0; j < J; ++j)
      if (zprev[j]) rec_src.push_back(static_cast<std::int64_t>(j));

    transmit(net_.in, Kind::Input, in_src, t, net_.I_in);
    transmit(net_.rec, Kind::Recurrent, rec_src, t, net_.I_rec);

    auto& zrow = net_.z_ring[static_cast<std::size_t>(t % ring_z_)];
    const double rb = static_reg_ ? static_cast<double>(lt) / static_cast<double>(lt + 1)
                                  : reg_beta(reg_, lt);
    const bool td = !event_;
    const auto slot = td ? static_cast<std::size_t>(t % static_cast<std::int64_t>(net_.psi_ring.size())) : 0;
    const bool iaf = net_.cfg.model == NeuronModel::IgnoreAndFire;
    run([&](int w) {
      for (std::size_t j = static_cast<std::size_t>(w); j < J; j += static_cast<std::size_t>(W)) {
        double psi;
        std::uint8_t z;
        const LifParams& p = net_.params[j];
        if (iaf) {
          const auto r = step_ignore_and_fire(net_.iaf[j]);
          net_.iaf[j] = r.state;
          z = r.z;
          const double v = p.v_th * static_cast<double>(r.state.phase) /
                           static_cast<double>(r.state.period);
          psi = surrogate_gradient(v, p.v_th, p.surrogate);
        } else {
          net_.neurons[j] = step_recurrent(net_.neurons[j], p, net_.I_rec[j], net_.I_in[j]);
          psi = surrogate_gradient(net_.neurons[j].v, net_.neurons[j].v_th_t, p.surrogate);
          z = net_.neurons[j].z;
        }
        if (io.forced && io.forced->count(static_cast<std::int64_t>(j))) {
          z = 1;
          if (!iaf) net_.neurons[j].z = 1;
        }
        net_.I_rec[j] = 0.0;
        net_.I_in[j] = 0.0;
        zrow[j] = z;
        net_.psi[j] = psi;
        net_.rate[j] = rate_step(net_.rate[j], z, rb);
        if (archive_rec) {
          auto& en = net_.archives[j].append_entry(t);
          en.psi = psi;
          en.f = net_.rate[j];
        }
        if (td) {
          net_.psi_ring[slot][j] = psi;
          net_.rate_ring[slot][j] = net_.rate[j];
        }
      }
    });
    for (std::size_t j = 0; j < J; ++j) io.spikes += zrow[j];
    if (rec && rec->spikes)
      for (std::size_t j = 0; j < J; ++j)
        if (zrow[j]) rec->spike_list.emplace_back(static_cast<std::int64_t>(j), t);

    if (t - d_ >= 0) {
      const auto& zd = net_.z_ring[static_cast<std::size_t>((t - d_) % ring_z_)];
      for (std::size_t j = 0; j < J; ++j)
        if (zd[j]) out_src.push_back(static_cast<std::int64_t>(j));
    }
    transmit(net_.out, Kind::Output, out_src, t, net_.I_out);

    std::vector<double> y(K);
    for (std::size_t k = 0; k < K; ++k) {
      net_.readouts[k] = step_readout(net_.readouts[k], net_.I_out[k]);
      net_.I_out[k] = 0.0;
      y[k] = net_.readouts[k].y;
    }
    const std::vector<double> outputs =
        net_.cfg.loss == LossKind::CrossEntropy ? softmax(y) : y;
    const LossStep ls = step_loss_and_error(net_.cfg.loss, outputs,
                                            std::span<const double>(io.target, K), io.window);
    io.loss += ls.loss;
    std::copy(outputs.begin(), outputs.end(), io.outputs);
    if (archive_out)
      for (std::size_t k = 0; k < K; ++k) net_.readout_archives[k].append_entry(t).E = ls.error[k];

    std::vector<double> L(J, 0.0);
    const std::int64_t q = t - d_;
    const bool write_l = archive_rec && q >= 0 && (!reset_ || q >= t - lt);
    const bool need_l = write_l || (td && net_.plastic) || (rec && rec->signals);
    if (need_l) {
      run([&](int w) {
        for (std::size_t j = static_cast<std::size_t>(w); j < J; j += static_cast<std::size_t>(W)) {
          double s = 0.0;
          for (const auto& [k, b] : net_.feedback[j]) s += b * ls.error[static_cast<std::size_t>(k)];
          L[j] = s;
          if (write_l)
            if (auto* en = net_.archives[j].find(q)) en->L = s;
        }
      });
    }
    if (td && net_.plastic) time_driven_fold(t, L, ls.error);

    if (rec && rec->signals) {
      rec->y.insert(rec->y.end(), y.begin(), y.end());
      rec->E.insert(rec->E.end(), ls.error.begin(), ls.error.end());
      rec->L.insert(rec->L.end(), L.begin(), L.end());
      rec->psi.insert(rec->psi.end(), net_.psi.begin(), net_.psi.end());
      rec->z.insert(rec->z.end(), zrow.begin(), zrow.end());
    }

    net_.now = t + 1;
    if (event_ && net_.plastic) {
      const std::int64_t every = net_.cfg.archive_clean_every;
      const bool due = per_spike_ && every > 0 ? net_.now % every == 0 : net_.now % T_ == 0;
      if (due) clean();
    }
  }

  void clean() {
    const std::int64_t now = net_.now;
    const bool contiguous = !per_spike_ && !reset_;
    auto clean_one = [&](auto& a, std::int64_t protect) {
      if (a.update_history().empty()) return;
      if (contiguous)
        a.erase_before(std::min(a.update_history().front(), protect));
      else
        a.erase_used_history(protect);
    };
    run([&](int w) {
      const int W = net_.n_workers();
      for (std::size_t j = static_cast<std::size_t>(w); j < net_.archives.size(); j += static_cast<std::size_t>(W))
        clean_one(net_.archives[j], now - d_);
      for (std::size_t k = static_cast<std::size_t>(w); k < net_.readout_archives.size();
           k += static_cast<std::size_t>(W))
        clean_one(net_.readout_archives[k], now);
    });
  }

  // ---- flushing -------------------------------------------------------------

  void flush() {
    if (!net_.plastic) return;
    const std::int64_t now = net_.now;
    auto fl = [&](SynapseGroup& g, bool out) {
      if (!g.plastic) return;
      for (std::size_t i = 0; i < g.syn.size(); ++i) {
        SynapseState& s = g.syn[i];
        const auto j = static_cast<std::size_t>(g.topo.tgt[i]);
        if (event_) {
          if (out)
            process_out(s, net_.readout_archives[j], now - 1);
          else
            process_to(s, net_.archives[j], net_.trace[j], now - 1 - d_);
        }
        if (per_spike_)
          apply_spike_update(s);
        else
          advance_iterations(s, now);
      }
    };
    fl(net_.in, false);
    fl(net_.rec, false);
    fl(net_.out, true);
  }

  void end_iteration() {
    net_.iter_starts.push_back(net_.now);
    if (event_ || per_spike_ || !net_.plastic) return;
    for (SynapseGroup* g : {&net_.in, &net_.rec, &net_.out})
      if (g->plastic)
        for (auto& s : g->syn) advance_iterations(s, net_.now);
  }

 private:
  Network& net_;
  std::int64_t T_ = 1;
  bool reset_ = true;
  int d_ = 0;
  int d_ls_ = 0;
  std::int64_t cutoff_ = 1;
  bool per_spike_ = false;
  bool adam_ = false;
  bool event_ = true;
  RegularizationParams reg_;
  bool static_reg_ = false;
  bool reg_on_ = false;
  double c_star_ = 0.0;
  double c_static_ = 0.0;
  std::int64_t ring_z_ = 1;
  std::int64_t ring_x_ = 1;
};

void check_sample(const Network& net, const SampleSpec& s) {
  s.validate();
  if (s.T != net.cfg.sample_steps)
    throw ConfigError("sample duration " + std::to_string(s.T) + " differs from sample_steps " +
                      std::to_string(net.cfg.sample_steps));
  if (s.input_spikes.size() != static_cast<std::size_t>(net.cfg.n_in))
    throw ConfigError("sample has " + std::to_string(s.input_spikes.size()) +
                      " input channels, network expects " + std::to_string(net.cfg.n_in));
  if (s.target.K != static_cast<std::size_t>(net.cfg.n_out))
    throw ConfigError("target dimension differs from the readout count");
  if (net.now % net.cfg.sample_steps != 0)
    throw ProtocolError("samples must start on a multiple of sample_steps");
}

}  // namespace

SampleResult run_sample(Network& net, const SampleSpec& sample, const RunOptions& opt) {
  check_sample(net, sample);
  Engine eng(net);
  const std::int64_t T = sample.T;
  const auto K = static_cast<std::size_t>(net.cfg.n_out);
  const auto I = static_cast<std::size_t>(net.cfg.n_in);
  const std::vector<unsigned char> raster = sample.raster();
  std::vector<double> outputs(static_cast<std::size_t>(T) * K, 0.0);
  std::vector<std::set<std::int64_t>> forced(static_cast<std::size_t>(T));
  for (const auto& [j, t] : opt.forced_spikes) {
    if (j < 0 || j >= net.cfg.n_rec || t < 0 || t >= T)
      throw ConfigError("forced spike outside the network or sample");
    forced[static_cast<std::size_t>(t)].insert(j);
  }
  SampleResult res;
  for (std::int64_t lt = 0; lt < T; ++lt) {
    const auto r = static_cast<std::size_t>(lt);
    Engine::StepIO io;
    io.x = raster.data() + r * I;
    io.target = sample.target.values.data() + r * K;
    io.window = sample.target.window[r] != 0;
    io.forced = forced[r].empty() ? nullptr : &forced[r];
    io.outputs = outputs.data() + r * K;
    eng.step(io, opt.recorder);
    res.loss += io.loss;
    res.spikes_recurrent += io.spikes;
  }
  if (sample.label) {
    const std::size_t p = prediction(outputs, K, sample.target.window);
    res.prediction = static_cast<int>(p);
    res.correct = static_cast<int>(p) == *sample.label;
  }
  return res;
}

void end_iteration(Network& net) { Engine(net).end_iteration(); }

void flush_plasticity(Network& net) { Engine(net).flush(); }

void set_plasticity(Network& net, bool on) {
  if (!on) {
    flush_plasticity(net);
    net.plastic = false;
  } else if (!net.plastic) {
    restart_plasticity(net);
    net.plastic = true;
  }
}

RunMetrics run_training(Network& net, const TaskStream& stream, std::int64_t iterations,
                        const EvalSchedule& eval,
                        const std::function<void(const IterationMetrics&)>& on_row) {
  using clock = std::chrono::steady_clock;
  RunMetrics m;
  const auto t_start = clock::now();
  const int N = net.cfg.opt.batch_size;
  std::int64_t steps = 0;
  auto one = [&](std::int64_t it, bool is_eval) {
    const auto t0 = clock::now();
    IterationMetrics row;
    row.iteration = it;
    row.phase = is_eval ? "eval" : "train";
    std::int64_t labelled = 0, wrong = 0;
    for (int b = 0; b < N; ++b) {
      const SampleResult r = run_sample(net, stream(it, b, is_eval));
      steps += net.cfg.sample_steps;
      row.loss += r.loss;
      row.spikes_recurrent += r.spikes_recurrent;
      if (r.correct) {
        ++labelled;
        if (!*r.correct) ++wrong;
      }
    }
    if (!is_eval) end_iteration(net);
    row.loss /= static_cast<double>(N);
    row.prediction_error = labelled ? static_cast<double>(wrong) / static_cast<double>(labelled)
                                    : std::numeric_limits<double>::quiet_NaN();
    row.runtime_s = std::chrono::duration<double>(clock::now() - t0).count();
    m.rows.push_back(row);
    if (on_row) on_row(row);
  };
  std::int64_t eval_index = 0;
  for (std::int64_t it = 0; it < iterations; ++it) {
    one(it, false);
    if (eval.every > 0 && (it + 1) % eval.every == 0) {
      set_plasticity(net, false);
      for (int e = 0; e < eval.iterations; ++e) one(eval_index++, true);
      set_plasticity(net, true);
    }
  }
  flush_plasticity(net);
  m.runtime_s = std::chrono::duration<double>(clock::now() - t_start).count();
  m.simulated_s = static_cast<double>(steps) * net.cfg.lif.dt / 1000.0;
  return m;
}

}  // namespace eprop
