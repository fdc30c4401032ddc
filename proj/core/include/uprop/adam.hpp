#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "uprop/tensor.hpp"

namespace uprop::nn {

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam with bias-corrected moment estimates.
struct AdamState {
  AdamConfig config;
  std::uint64_t step_count = 0;
  std::vector<Tensor2> first_moment;
  std::vector<Tensor2> second_moment;

  AdamState() = default;
  /// Zero accumulators shaped like `params`.
  AdamState(AdamConfig cfg, std::span<const Tensor2* const> params);
};

/// One update: params[i] -= lr · m̂ / (√v̂ + ε). Increments step_count.
void adam_step(AdamState& state, std::span<Tensor2* const> params,
               std::span<const Tensor2* const> grads);

}  // namespace uprop::nn
