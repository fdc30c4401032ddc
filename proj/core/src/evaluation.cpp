#include "uprop/evaluation.hpp"

#include <string>

#include "uprop/baselines.hpp"
#include "uprop/errors.hpp"
#include "uprop/rng.hpp"

namespace uprop::evaluation {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kUprop:
      return "uprop";
    case Method::kMean:
      return "mean";
    case Method::kSample:
      return "sample";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "uprop") return Method::kUprop;
  if (name == "mean") return Method::kMean;
  if (name == "sample") return Method::kSample;
  throw ConfigError("unknown method \"" + std::string(name) + "\" (expected uprop, mean or sample)");
}

std::vector<forecaster::FilterStep> run_filter(const forecaster::UPropModel& model,
                                               const data::TimeSeries& series, Method method,
                                               std::uint64_t seed) {
  switch (method) {
    case Method::kUprop:
      return forecaster::filter_series(model, series);
    case Method::kMean:
      return baselines::filter_series_imputed(model, series, {baselines::ImputeKind::kMean, seed});
    case Method::kSample:
      return baselines::filter_series_imputed(model, series,
                                              {baselines::ImputeKind::kSample, seed});
  }
  throw ConfigError("unknown method");
}

CellScore score_one_step(const data::TimeSeries& truth,
                         std::span<const forecaster::FilterStep> steps, std::size_t first_scored) {
  nn::expect_size(steps.size(), truth.steps, "score_one_step steps");
  CellScore score;
  double nll_sum = 0.0;
  std::size_t covered = 0;
  for (std::size_t t = std::max<std::size_t>(first_scored, 1); t < truth.steps; ++t) {
    const auto& belief = steps[t - 1].forecast;
    for (std::size_t d = 0; d < truth.dims; ++d) {
      const double x = truth.at(t, d);
      nll_sum += prob::nll_term(belief.mu[d], belief.sigma[d], x);
      const double half = prob::kZ95 * belief.sigma[d];
      if (x >= belief.mu[d] - half && x <= belief.mu[d] + half) ++covered;
      ++score.count;
    }
  }
  if (score.count == 0) throw RangeError("no cells to score");
  score.nll = nll_sum / static_cast<double>(score.count);
  score.coverage = static_cast<double>(covered) / static_cast<double>(score.count);
  return score;
}

const CellScore& EvalGrid::cell(std::size_t rate, std::size_t lookahead, std::size_t method) const {
  return cells.at((rate * lookaheads.size() + lookahead) * methods.size() + method);
}

std::size_t EvalGrid::method_index(Method m) const {
  for (std::size_t i = 0; i < methods.size(); ++i) {
    if (methods[i] == m) return i;
  }
  throw ConfigError("method " + std::string(to_string(m)) + " not in grid");
}

double EvalGrid::difference(std::size_t rate, std::size_t lookahead, std::size_t method) const {
  return cell(rate, lookahead, method).nll -
         cell(rate, lookahead, method_index(Method::kUprop)).nll;
}

EvalGrid evaluate_grid(std::span<const forecaster::UPropModel> models,
                       std::span<const data::TimeSeries> test_windows, const EvalOptions& options) {
  if (models.empty()) throw ConfigError("evaluation needs at least one model");
  if (test_windows.empty()) throw DataError("evaluation needs at least one test window");
  EvalGrid grid;
  grid.rates = options.missing_rates;
  grid.methods = options.methods;
  for (const auto& m : models) grid.lookaheads.push_back(m.train_config.lookahead);
  grid.method_index(Method::kUprop);

  for (std::size_t r = 0; r < grid.rates.size(); ++r) {
    std::vector<data::TimeSeries> masked;
    masked.reserve(test_windows.size());
    for (std::size_t w = 0; w < test_windows.size(); ++w) {
      masked.push_back(
          data::emulate_missing(test_windows[w], grid.rates[r], derive_seed({options.seed, r, w})));
    }
    for (std::size_t l = 0; l < models.size(); ++l) {
      const auto& model = models[l];
      const std::size_t first = options.first_scored > 0 ? options.first_scored
                                                         : model.train_config.min_context();
      std::vector<data::TimeSeries> truth, input;
      for (std::size_t w = 0; w < test_windows.size(); ++w) {
        truth.push_back(data::normalize(test_windows[w], model.norm));
        input.push_back(data::normalize(masked[w], model.norm));
      }
      for (std::size_t m = 0; m < grid.methods.size(); ++m) {
        double nll_sum = 0.0;
        double covered = 0.0;
        std::size_t count = 0;
        for (std::size_t w = 0; w < truth.size(); ++w) {
          const auto seed = derive_seed(
              {options.seed, r, grid.lookaheads[l], static_cast<std::uint64_t>(grid.methods[m]), w});
          const auto steps = run_filter(model, input[w], grid.methods[m], seed);
          const auto s = score_one_step(truth[w], steps, first);
          nll_sum += s.nll * static_cast<double>(s.count);
          covered += s.coverage * static_cast<double>(s.count);
          count += s.count;
        }
        grid.cells.push_back({nll_sum / static_cast<double>(count),
                              covered / static_cast<double>(count), count});
      }
    }
  }
  return grid;
}

}  // namespace uprop::evaluation
