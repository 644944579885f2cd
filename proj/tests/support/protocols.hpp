#pragma once

#include <cstdint>
#include <string>

#include "eprop/history.hpp"

namespace eprop::synthetic {

struct ArchiveProtocolReport {
  std::int64_t steps = 0;
  std::int64_t cleans = 0;
  std::int64_t reads = 0;
  std::int64_t bound_violations = 0;      // archive longer than the registrations allow
  std::int64_t indegree_violations = 0;   // update history larger than the in-degree
  std::int64_t missing_reads = 0;         // get_range touched a cleaned entry
  std::string first_problem;

  bool ok() const { return !bound_violations && !indegree_violations && !missing_reads; }
};

// Randomized archive protocol for one neuron: every step appends an entry; on
// a spike arrival a synapse reads the entries its update needs and
// re-registers; cleaning runs at random times (per-spike) or at interval
// boundaries (fixed interval). Checks the length bound after every clean.
ArchiveProtocolReport run_archive_protocol(ArchiveMode mode, std::int64_t steps, std::uint64_t seed,
                                           std::int64_t indegree = 12, std::int64_t cutoff = 7,
                                           std::int64_t interval = 25);

// Single presynaptic spike and a single learning-signal pulse swept over
// every position. True when every update algorithm yields a nonzero
// contribution exactly at t = s + 1 + d + d_ls for the pulse at s + 1 + d, and
// nowhere else.
bool delay_alignment_holds(int d, int d_ls, std::string* why = nullptr);

// d = d_ls = 0 against the undelayed per-step sum, bit for bit.
bool zero_delay_matches_base_rule(std::uint64_t seed, int instances, std::string* why = nullptr);

}  // namespace eprop::synthetic
