#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eprop/tasks.hpp"

namespace eprop::synthetic {

// Stand-in for the real recordings: digit-like shapes (0 = ellipse ring,
// 1 = slanted bar) scanned by three 100 ms saccades, with ON/OFF events from
// brightness changes above a contrast step and sparse noise events.
struct SyntheticNmnistConfig {
  std::vector<int> digits{0, 1};
  int per_class = 250;
  double contrast_step = 0.25;
  double noise_rate_hz = 0.5;  // per pixel, polarity uniform
  std::uint64_t seed = 7;
};

std::vector<NmnistEvent> synthetic_digit_events(int digit, std::uint64_t seed,
                                                const SyntheticNmnistConfig& cfg);

// Writes <root>/<split>/<digit>/<index>.bin for every requested sample.
void write_synthetic_nmnist(const std::string& root, const std::string& split,
                            const SyntheticNmnistConfig& cfg);

}  // namespace eprop::synthetic
