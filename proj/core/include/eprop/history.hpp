#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "eprop/error.hpp"

namespace eprop {

struct RecurrentHistoryEntry {
  std::int64_t t = 0;
  double psi = 0.0;
  double L = 0.0;
  double f = 0.0;
};

struct ReadoutHistoryEntry {
  std::int64_t t = 0;
  double E = 0.0;
};

// Sorted (t_update, access_counter) pairs, one counter per registered synapse.
class UpdateHistory {
 public:
  void register_initial(std::int64_t t);
  void register_update(std::int64_t t_old, std::int64_t t_new);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<std::pair<std::int64_t, int>>& entries() const { return entries_; }
  std::int64_t front() const;
  int total() const;
  bool contains(std::int64_t t) const;
  void clear() { entries_.clear(); }

 private:
  void increment(std::int64_t t);
  std::vector<std::pair<std::int64_t, int>> entries_;
};

enum class ArchiveMode { FixedInterval, PerSpike };

struct ArchiveConfig {
  ArchiveMode mode = ArchiveMode::FixedInterval;
  std::int64_t update_interval = 1000;
  std::int64_t shift = 0;
  std::int64_t cutoff = 64;

  void validate() const;
  // Start of the update interval containing t.
  std::int64_t interval_start(std::int64_t t) const;
};

template <class Entry>
class EpropArchive {
 public:
  using const_iterator = typename std::deque<Entry>::const_iterator;

  struct Range {
    const_iterator first;
    const_iterator last;
    const_iterator begin() const { return first; }
    const_iterator end() const { return last; }
    std::size_t size() const { return static_cast<std::size_t>(last - first); }
    bool empty() const { return first == last; }
  };

  EpropArchive() = default;
  explicit EpropArchive(ArchiveConfig cfg) : cfg_(cfg) { cfg_.validate(); }

  const ArchiveConfig& config() const { return cfg_; }
  UpdateHistory& update_history() { return updates_; }
  const UpdateHistory& update_history() const { return updates_; }

  Entry& append_entry(std::int64_t t) {
    if (!entries_.empty() && t <= entries_.back().t)
      throw ProtocolError("duplicate or out-of-order history entry at t=" + std::to_string(t));
    Entry e;
    e.t = t;
    entries_.push_back(e);
    return entries_.back();
  }

  // Entry for t, or nullptr when it is not archived.
  Entry* find(std::int64_t t) {
    auto it = lower(t);
    if (it == entries_.end() || it->t != t) return nullptr;
    return &*it;
  }

  Entry& at(std::int64_t t) {
    Entry* e = find(t);
    if (!e) throw ProtocolError("write to missing history entry t=" + std::to_string(t));
    return *e;
  }

  // Entries with t_a < t <= t_b. Throws if any step in the range is missing.
  Range get_range(std::int64_t t_a, std::int64_t t_b) const {
    if (t_b <= t_a) return Range{entries_.end(), entries_.end()};
    auto first = entries_.end();
    const std::int64_t off = entries_.empty() ? -1 : t_a + 1 - entries_.front().t;
    if (off >= 0 && off < static_cast<std::int64_t>(entries_.size()) &&
        entries_[static_cast<std::size_t>(off)].t == t_a + 1)
      first = entries_.begin() + off;  // gap-free prefix
    else
      first = std::lower_bound(entries_.begin(), entries_.end(), t_a + 1,
                               [](const Entry& e, std::int64_t t) { return e.t < t; });
    const auto n = t_b - t_a;
    if (first == entries_.end() || first->t != t_a + 1 || entries_.end() - first < n ||
        (first + (n - 1))->t != t_b)
      throw ProtocolError("history range (" + std::to_string(t_a) + ", " + std::to_string(t_b) +
                          "] not fully archived");
    return Range{first, first + n};
  }

  // Cleans entries no registered synapse can request. Entries with
  // t >= protect_from are never removed (still being written).
  void erase_used_history(std::int64_t protect_from = std::numeric_limits<std::int64_t>::max()) {
    if (updates_.empty()) return;
    const auto& ups = updates_.entries();
    const std::int64_t front = ups.front().first;
    auto keep = [&](std::int64_t t) {
      if (t >= protect_from) return true;
      if (t < front) return false;
      if (cfg_.mode == ArchiveMode::FixedInterval) {
        return updates_.contains(cfg_.interval_start(t));
      }
      // Per-spike: keep [t_k, t_k + cutoff) after each registered update time.
      auto it = std::upper_bound(ups.begin(), ups.end(), t,
                                 [](std::int64_t v, const auto& p) { return v < p.first; });
      const std::int64_t t0 = std::prev(it)->first;
      return t < t0 + cfg_.cutoff;
    };
    std::deque<Entry> kept;
    for (const Entry& e : entries_)
      if (keep(e.t)) kept.push_back(e);
    entries_.swap(kept);
  }

  // Removes every entry with t < t_min regardless of registrations.
  void erase_before(std::int64_t t_min) {
    while (!entries_.empty() && entries_.front().t < t_min) entries_.pop_front();
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::deque<Entry>& entries() const { return entries_; }
  void clear() { entries_.clear(); }
  // Drops entries and registrations.
  void reset() {
    entries_.clear();
    updates_.clear();
  }

 private:
  typename std::deque<Entry>::iterator lower(std::int64_t t) {
    return std::lower_bound(entries_.begin(), entries_.end(), t,
                            [](const Entry& e, std::int64_t v) { return e.t < v; });
  }

  ArchiveConfig cfg_;
  std::deque<Entry> entries_;
  UpdateHistory updates_;
};

using RecurrentArchive = EpropArchive<RecurrentHistoryEntry>;
using ReadoutArchive = EpropArchive<ReadoutHistoryEntry>;

// Line-oriented dump "t psi L f" for fixtures.
void dump_history(std::ostream& os, const RecurrentArchive& a);
void dump_history(std::ostream& os, const ReadoutArchive& a);
std::vector<RecurrentHistoryEntry> parse_history_dump(const std::string& text);

}  // namespace eprop
