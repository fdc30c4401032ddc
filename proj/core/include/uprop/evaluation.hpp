#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "uprop/data.hpp"
#include "uprop/forecaster.hpp"

namespace uprop::evaluation {

/// How missing cells are fed to the network during filtering.
enum class Method { kUprop, kMean, kSample };

std::string_view to_string(Method m);
/// Accepts "uprop", "mean", "sample"; throws ConfigError otherwise.
Method parse_method(std::string_view name);

/// Dispatches to forecaster::filter_series or baselines::filter_series_imputed.
std::vector<forecaster::FilterStep> run_filter(const forecaster::UPropModel& model,
                                               const data::TimeSeries& normalized_series,
                                               Method method, std::uint64_t seed);

struct CellScore {
  double nll = 0.0;       // mean per-point NLL
  double coverage = 0.0;  // fraction of truths inside the 95% interval
  std::size_t count = 0;  // scored cells
};

/// Scores the one-step forecasts of `steps` against every cell of `truth`
/// (normalized) at time steps [first_scored, T).
CellScore score_one_step(const data::TimeSeries& truth,
                         std::span<const forecaster::FilterStep> steps, std::size_t first_scored);

struct EvalOptions {
  std::vector<double> missing_rates{0.05, 0.1, 0.2, 0.5};
  std::vector<Method> methods{Method::kUprop, Method::kMean, Method::kSample};
  std::uint64_t seed = 0;
  /// First scored step; 0 means the model's minimum training context ⌈L/4⌉.
  std::size_t first_scored = 0;
};

/// Per-(missing rate, lookahead, method) scores. Columns are indexed by the
/// models' training lookahead.
struct EvalGrid {
  std::vector<double> rates;
  std::vector<std::size_t> lookaheads;
  std::vector<Method> methods;
  std::vector<CellScore> cells;  // [rate][lookahead][method]

  const CellScore& cell(std::size_t rate, std::size_t lookahead, std::size_t method) const;
  /// cell(method).nll − cell(uprop).nll
  double difference(std::size_t rate, std::size_t lookahead, std::size_t method) const;
  std::size_t method_index(Method m) const;
};

/// Emulates missingness on each test window (same mask for every model and
/// method at a given rate), runs each method's filtering pass and scores the
/// one-step forecasts against the retained ground truth. `test_windows` are
/// fully observed and in original units; each model normalizes with its own
/// statistics. Independent seeds per cell derive from (seed, rate, lookahead,
/// method, window).
EvalGrid evaluate_grid(std::span<const forecaster::UPropModel> models,
                       std::span<const data::TimeSeries> test_windows, const EvalOptions& options);

}  // namespace uprop::evaluation
