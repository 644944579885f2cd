#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace eprop {

enum class LossKind { MSE, CrossEntropy, TemporalMSE };

inline constexpr double kProbabilityFloor = 1e-12;

std::vector<double> softmax(std::span<const double> y);

struct LossStep {
  double loss = 0.0;
  std::vector<double> error;
};

// `out` holds readout voltages for MSE kinds and softmax probabilities for
// cross-entropy. `target` is y* or the one-hot pi*.
LossStep step_loss_and_error(LossKind kind, std::span<const double> out,
                             std::span<const double> target, bool window_open);

// B is J x K row-major.
std::vector<double> learning_signal(std::span<const double> B, std::size_t J, std::size_t K,
                                    std::span<const double> E);

// signal is T x K row-major, mask has T entries. Throws on an empty window.
std::size_t prediction(std::span<const double> signal, std::size_t K,
                       std::span<const unsigned char> mask);

}  // namespace eprop
