#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "uprop/data.hpp"
#include "uprop/forecaster.hpp"
#include "uprop/rng.hpp"
#include "uprop/tape.hpp"

namespace uprop::forecaster {

/// Where and how one training rollout is taken from a window.
struct RolloutSample {
  std::size_t context = 0;    // observed steps before the rollout
  std::size_t lookahead = 0;  // scored beliefs
  std::uint64_t dropout_seed = 0;
  /// (lookahead − 1) × N flags for the fed-back inputs at steps
  /// context .. context + lookahead − 2; a set flag feeds the ground truth
  /// (σ = 0) for that cell instead of the prediction. Empty = none revealed.
  std::vector<std::uint8_t> reveal;
  /// context × N flags; a set flag hides that context cell, which is then fed
  /// the belief produced at the previous step (the prior N(0, 1) at step 0).
  /// Empty = none hidden.
  std::vector<std::uint8_t> hide;
};

/// Multi-step training loss on one normalized, fully observed window.
///
/// Steps [0, context) are fed as observations (σ = 0), apart from hidden
/// cells, with dropout drawn from `dropout_seed`; the belief produced after the last context step is then
/// fed back as input, without sampling and with dropout off, until
/// `lookahead` beliefs exist. Returns the mean per-point NLL of steps
/// [context, context + lookahead) under those beliefs. When `grad` is non-null
/// the gradient of the returned loss is added to it.
double window_loss(const UPropModel& model, const data::TimeSeries& window,
                   const RolloutSample& sample, Network* grad = nullptr, nn::Tape* tape = nullptr);

/// Draws the rollout anchor, dropout seed, reveal mask and hide mask for one window visit.
RolloutSample draw_sample(const TrainConfig& config, std::size_t dims, Rng& rng,
                          std::uint64_t dropout_seed);

struct TrainResult {
  UPropModel model;
  std::vector<double> loss_history;  // epoch-mean training loss
};

using EpochCallback = std::function<void(std::size_t epoch, double mean_loss)>;

/// Fits a model on fully observed windows given in original units. The
/// normalization statistics are computed from these windows and stored in
/// the model. Throws DataError on missing values and ConfigError on invalid
/// settings.
TrainResult train(std::span<const data::TimeSeries> windows, const ModelSpec& spec,
                  const TrainConfig& config, const EpochCallback& on_epoch = {});

}  // namespace uprop::forecaster
