#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "uprop/forecaster.hpp"

namespace uprop::novelty {

enum class ScoreKind { kVolatility, kSurprise, kKl };

std::string_view to_string(ScoreKind kind);
/// Accepts "volatility", "surprise", "kl"; throws ConfigError otherwise.
ScoreKind parse_score_kind(std::string_view name);

struct NoveltyScore {
  std::size_t t = 0;  // target time step the score refers to
  ScoreKind kind = ScoreKind::kKl;
  double value = 0.0;
  bool flagged = false;
};

struct Threshold {
  ScoreKind kind = ScoreKind::kKl;
  double cutoff = 0.0;
  double quantile = 0.99;
};

/// Mean predicted σ over dimensions at the first forecast step.
double volatility_score(const forecaster::Forecast& f);

/// Per-point NLL of the observed cells of `x` under step `j` of `f`, averaged
/// over observed dimensions. Throws DomainError if nothing is observed.
double surprise_score(const forecaster::Forecast& f, std::size_t j,
                      std::span<const std::optional<double>> x);

/// KL between forecasts of `target_t` made from origins target_t − near_offset
/// (p) and target_t − far_offset (q). Context inputs are built with missing
/// values propagated. `reverse` swaps the direction to KL(q‖p).
double kl_novelty(const forecaster::UPropModel& model, const data::TimeSeries& series,
                  std::size_t target_t, std::size_t near_offset, std::size_t far_offset,
                  bool reverse = false);

struct StreamOptions {
  std::size_t near_offset = 1;
  std::size_t far_offset = 8;
  bool reverse_kl = false;
};

/// Scores every step of a normalized series that the chosen signal defines:
/// volatility and surprise for t ≥ 1 (surprise skips fully missing steps),
/// kl for t ≥ far_offset. Scores are unflagged.
std::vector<NoveltyScore> score_stream(const forecaster::UPropModel& model,
                                       const data::TimeSeries& series, ScoreKind kind,
                                       const StreamOptions& options = {});

/// Empirical q-quantile with linear interpolation between order statistics.
/// Needs at least 100 scores and q ∈ [0.5, 1).
Threshold calibrate_threshold(std::span<const double> scores, double q, ScoreKind kind);

/// Sets `flagged` on every score strictly above the cutoff.
void apply_threshold(std::span<NoveltyScore> scores, const Threshold& threshold);

/// Linear-interpolation quantile (type 7) without the calibration preconditions.
double quantile(std::vector<double> values, double q);

}  // namespace uprop::novelty
