#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "uprop/data.hpp"
#include "uprop/gru.hpp"
#include "uprop/prob.hpp"

namespace uprop::forecaster {

/// Architecture of the uncertainty-propagation network.
struct ModelSpec {
  std::size_t dims = 3;
  std::size_t layers = 3;
  std::size_t hidden = 64;
  double dropout = 0.2;
  double sigma_floor = 1e-3;

  void validate() const;
  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct TrainConfig {
  std::size_t lookahead = 2;
  std::size_t epochs = 20;
  double learning_rate = 0.001;
  std::size_t batch_size = 32;
  std::size_t window_length = 120;
  std::uint64_t seed = 0;
  /// Upper bound of the per-window probability that a rollout input cell is
  /// fed its ground truth (σ = 0) instead of the prediction. 0 = pure
  /// self-feeding.
  double rollout_reveal = 1.0;
  /// Upper bound of the per-window probability that a context cell is hidden
  /// and fed the previous belief instead, as filtering does with missing
  /// data. 0 = fully observed context.
  double context_hide = 0.6;

  void validate() const;
  /// Smallest number of observed context steps preceding a training rollout: ⌈L/4⌉.
  std::size_t min_context() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// GRU stack over 2N distribution-parameter inputs and an affine readout to
/// 2N raw outputs (N locations, N pre-squash scales).
struct Network {
  nn::GruStackParams stack;
  nn::LinearParams readout;

  /// Canonical parameter order and names ("gru.<layer>.<tensor>", "readout.weight", ...).
  std::vector<std::pair<std::string, nn::Tensor2*>> named_tensors();
  std::vector<std::pair<std::string, const nn::Tensor2*>> named_tensors() const;
  std::vector<nn::Tensor2*> tensors();
  std::vector<const nn::Tensor2*> tensors() const;
  /// Same shapes, all zeros (gradient buffers).
  Network zeros_like() const;
  void set_zero();

  friend bool operator==(const Network&, const Network&) = default;
};

struct UPropModel {
  std::size_t dims = 0;
  Network net;
  prob::SigmaSquash squash;
  data::NormStats norm;
  TrainConfig train_config;

  /// Freshly initialized model (uniform weights, zero biases) drawn from `init_seed`.
  static UPropModel create(const ModelSpec& spec, const TrainConfig& train,
                           data::NormStats norm, std::uint64_t init_seed);

  ModelSpec spec() const;
  void validate() const;

  friend bool operator==(const UPropModel&, const UPropModel&) = default;
};

/// k-step belief sequence; steps[j] is the belief for origin_t + j + 1.
struct Forecast {
  std::size_t origin_t = 0;
  std::vector<prob::DistVector> steps;

  std::size_t horizon() const noexcept { return steps.size(); }
  /// Converts locations and scales to original units.
  Forecast denormalized(const data::NormStats& norm) const;
};

/// Builds the network input for one time step: observed cells become
/// (value, 0); a missing cell takes the pending forecast's (μ, σ) when one
/// exists, otherwise the prior's.
prob::DistVector encode_input(std::span<const std::optional<double>> obs,
                              const prob::DistVector* pending, const prob::DistVector& prior);

/// One deterministic step (dropout off). Advances `h` in place and returns the
/// belief for the next time step.
prob::DistVector step(const UPropModel& model, const prob::DistVector& input,
                      nn::HiddenState& h);

/// Consumes `context` from a zero state, then feeds each prediction back as
/// the next input for k steps. No sampling.
Forecast rollout(const UPropModel& model, std::span<const prob::DistVector> context,
                 std::size_t k);

/// Continues a rollout from a state that has already produced `first`
/// (the belief for origin_t + 1).
Forecast rollout_from(const UPropModel& model, nn::HiddenState h, prob::DistVector first,
                      std::size_t origin_t, std::size_t k);

struct FilterStep {
  prob::DistVector input;     // what the network consumed at t
  prob::DistVector forecast;  // one-step belief for t + 1
};

/// Online pass over a normalized series with missing values handled by
/// propagating the previous one-step forecast.
std::vector<FilterStep> filter_series(const UPropModel& model, const data::TimeSeries& series);

/// Cold-start prior for missing values with no pending forecast: N(0, 1) per dimension.
prob::DistVector default_prior(std::size_t dims);

}  // namespace uprop::forecaster
