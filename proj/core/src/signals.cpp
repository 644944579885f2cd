#include "eprop/signals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "eprop/error.hpp"

namespace eprop {

std::vector<double> softmax(std::span<const double> y) {
  if (y.empty()) throw std::invalid_argument("softmax of empty vector");
  const double m = *std::max_element(y.begin(), y.end());
  std::vector<double> p(y.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (!std::isfinite(y[k])) throw NumericInputError("non-finite softmax input");
    p[k] = std::exp(y[k] - m);
    sum += p[k];
  }
  for (double& v : p) v /= sum;
  return p;
}

LossStep step_loss_and_error(LossKind kind, std::span<const double> out,
                             std::span<const double> target, bool window_open) {
  if (out.size() != target.size()) throw std::invalid_argument("loss dimension mismatch");
  const std::size_t K = out.size();
  LossStep r;
  r.error.assign(K, 0.0);
  if (!window_open) return r;
  switch (kind) {
    case LossKind::MSE:
      for (std::size_t k = 0; k < K; ++k) {
        const double d = out[k] - target[k];
        r.loss += 0.5 * d * d;
        r.error[k] = d;
      }
      break;
    case LossKind::TemporalMSE: {
      const double inv_k = 1.0 / static_cast<double>(K);
      for (std::size_t k = 0; k < K; ++k) {
        const double d = out[k] - target[k];
        r.loss += inv_k * d * d;
        r.error[k] = 2.0 * inv_k * d;
      }
      break;
    }
    case LossKind::CrossEntropy:
      for (std::size_t k = 0; k < K; ++k) {
        if (target[k] != 0.0) r.loss -= target[k] * std::log(std::max(out[k], kProbabilityFloor));
        r.error[k] = out[k] - target[k];
      }
      break;
  }
  return r;
}

std::vector<double> learning_signal(std::span<const double> B, std::size_t J, std::size_t K,
                                    std::span<const double> E) {
  if (B.size() != J * K || E.size() != K) throw std::invalid_argument("feedback dimension mismatch");
  std::vector<double> L(J, 0.0);
  for (std::size_t j = 0; j < J; ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < K; ++k) s += B[j * K + k] * E[k];
    L[j] = s;
  }
  return L;
}

std::size_t prediction(std::span<const double> signal, std::size_t K,
                       std::span<const unsigned char> mask) {
  if (K == 0 || signal.size() != mask.size() * K)
    throw std::invalid_argument("prediction dimension mismatch");
  std::vector<double> mean(K, 0.0);
  std::size_t n = 0;
  for (std::size_t t = 0; t < mask.size(); ++t) {
    if (!mask[t]) continue;
    ++n;
    for (std::size_t k = 0; k < K; ++k) mean[k] += signal[t * K + k];
  }
  if (n == 0) throw std::invalid_argument("prediction over an empty learning window");
  std::size_t best = 0;
  for (std::size_t k = 1; k < K; ++k)
    if (mean[k] > mean[best]) best = k;
  return best;
}

}  // namespace eprop
