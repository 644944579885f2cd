#include "eprop/history.hpp"

#include <iomanip>
#include <sstream>

namespace eprop {

void UpdateHistory::increment(std::int64_t t) {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), t,
                             [](const auto& p, std::int64_t v) { return p.first < v; });
  if (it != entries_.end() && it->first == t)
    ++it->second;
  else
    entries_.insert(it, {t, 1});
}

void UpdateHistory::register_initial(std::int64_t t) { increment(t); }

void UpdateHistory::register_update(std::int64_t t_old, std::int64_t t_new) {
  if (t_old == t_new) {
    if (!contains(t_old))
      throw ProtocolError("re-registration at unknown update time " + std::to_string(t_old));
    return;
  }
  auto it = std::lower_bound(entries_.begin(), entries_.end(), t_old,
                             [](const auto& p, std::int64_t v) { return p.first < v; });
  if (it == entries_.end() || it->first != t_old)
    throw ProtocolError("decrement of missing update-history entry " + std::to_string(t_old));
  if (--it->second == 0) entries_.erase(it);
  increment(t_new);
}

std::int64_t UpdateHistory::front() const {
  if (entries_.empty()) throw ProtocolError("empty update history");
  return entries_.front().first;
}

int UpdateHistory::total() const {
  int n = 0;
  for (const auto& p : entries_) n += p.second;
  return n;
}

bool UpdateHistory::contains(std::int64_t t) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), t,
                             [](const auto& p, std::int64_t v) { return p.first < v; });
  return it != entries_.end() && it->first == t;
}

void ArchiveConfig::validate() const {
  if (update_interval < 1) throw ConfigError("update_interval must be >= 1");
  if (cutoff < 1) throw ConfigError("cutoff must be >= 1");
}

std::int64_t ArchiveConfig::interval_start(std::int64_t t) const {
  std::int64_t k = (t - shift) / update_interval;
  if ((t - shift) < 0 && (t - shift) % update_interval != 0) --k;
  return shift + k * update_interval;
}

void dump_history(std::ostream& os, const RecurrentArchive& a) {
  os << std::setprecision(17);
  for (const auto& e : a.entries()) os << e.t << ' ' << e.psi << ' ' << e.L << ' ' << e.f << '\n';
}

void dump_history(std::ostream& os, const ReadoutArchive& a) {
  os << std::setprecision(17);
  for (const auto& e : a.entries()) os << e.t << ' ' << e.E << '\n';
}

std::vector<RecurrentHistoryEntry> parse_history_dump(const std::string& text) {
  std::vector<RecurrentHistoryEntry> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    RecurrentHistoryEntry e;
    if (!(ls >> e.t >> e.psi >> e.L >> e.f)) throw ProtocolError("malformed history line: " + line);
    out.push_back(e);
  }
  return out;
}

}  // namespace eprop
