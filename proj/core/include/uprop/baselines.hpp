#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "uprop/forecaster.hpp"

namespace uprop::baselines {

/// Imputed values are clamped to this range (normalized units).
inline constexpr double kImputeClamp = 8.0;

enum class ImputeKind { kMean, kSample };

struct ImputePolicy {
  ImputeKind kind = ImputeKind::kMean;
  std::uint64_t seed = 0;  // kSample only
};

/// Filtering pass where a missing cell is replaced by the pending forecast's
/// mean, or by a draw from it, and presented to the network as a certain
/// observation (σ = 0). Same weights as forecaster::filter_series.
std::vector<forecaster::FilterStep> filter_series_imputed(const forecaster::UPropModel& model,
                                                          const data::TimeSeries& series,
                                                          const ImputePolicy& policy);

struct McForecast {
  std::size_t origin_t = 0;
  std::vector<prob::DistVector> steps;  // empirical mean and std of sampled values
};

/// Monte-Carlo rollout of the conventional model: every trajectory samples
/// from the current belief and feeds the sample back as an observation.
/// Trajectory i draws from a generator seeded by (seed, i).
McForecast mc_rollout(const forecaster::UPropModel& model,
                      std::span<const prob::DistVector> context, std::size_t k,
                      std::size_t n_samples, std::uint64_t seed);

}  // namespace uprop::baselines
