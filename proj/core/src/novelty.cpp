#include "uprop/novelty.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "uprop/errors.hpp"

namespace uprop::novelty {

using forecaster::Forecast;
using forecaster::UPropModel;

std::string_view to_string(ScoreKind kind) {
  switch (kind) {
    case ScoreKind::kVolatility:
      return "volatility";
    case ScoreKind::kSurprise:
      return "surprise";
    case ScoreKind::kKl:
      return "kl";
  }
  return "unknown";
}

ScoreKind parse_score_kind(std::string_view name) {
  if (name == "volatility") return ScoreKind::kVolatility;
  if (name == "surprise") return ScoreKind::kSurprise;
  if (name == "kl") return ScoreKind::kKl;
  throw ConfigError("unknown detection method \"" + std::string(name) +
                    "\" (expected kl, surprise or volatility)");
}

double volatility_score(const Forecast& f) {
  if (f.horizon() == 0) throw RangeError("volatility_score needs a forecast with horizon >= 1");
  const auto& s = f.steps.front().sigma;
  double acc = 0.0;
  for (double v : s) acc += v;
  return acc / static_cast<double>(s.size());
}

double surprise_score(const Forecast& f, std::size_t j, std::span<const std::optional<double>> x) {
  if (j >= f.horizon()) throw RangeError("surprise_score step beyond forecast horizon");
  const auto& belief = f.steps[j];
  nn::expect_size(x.size(), belief.dims(), "surprise_score observation");
  double acc = 0.0;
  std::size_t scored = 0;
  for (std::size_t d = 0; d < x.size(); ++d) {
    if (!x[d].has_value()) continue;
    acc += prob::nll_term(belief.mu[d], belief.sigma[d], *x[d]);
    ++scored;
  }
  if (scored == 0) throw DomainError("surprise_score undefined: every dimension is missing");
  return acc / static_cast<double>(scored);
}

namespace {

void check_offsets(std::size_t near_offset, std::size_t far_offset) {
  if (near_offset < 1 || far_offset < near_offset) {
    throw RangeError("kl offsets must satisfy far >= near >= 1");
  }
}

double directed_kl(const prob::DistVector& p, const prob::DistVector& q, bool reverse) {
  return reverse ? prob::kl(q, p) : prob::kl(p, q);
}

}  // namespace

double kl_novelty(const UPropModel& model, const data::TimeSeries& series, std::size_t target_t,
                  std::size_t near_offset, std::size_t far_offset, bool reverse) {
  check_offsets(near_offset, far_offset);
  if (target_t < far_offset) {
    throw RangeError("kl_novelty: insufficient history for target " + std::to_string(target_t) +
                     " with far offset " + std::to_string(far_offset));
  }
  const std::size_t near_origin = target_t - near_offset;
  if (near_origin >= series.steps) throw RangeError("kl_novelty: origin beyond end of series");

  const auto filtered = forecaster::filter_series(model, series.slice(0, near_origin + 1));
  std::vector<prob::DistVector> inputs;
  inputs.reserve(filtered.size());
  for (const auto& s : filtered) inputs.push_back(s.input);

  const std::span<const prob::DistVector> all(inputs);
  const auto p = forecaster::rollout(model, all.first(near_origin + 1), near_offset);
  const auto q = forecaster::rollout(model, all.first(target_t - far_offset + 1), far_offset);
  return directed_kl(p.steps.back(), q.steps.back(), reverse);
}

std::vector<NoveltyScore> score_stream(const UPropModel& model, const data::TimeSeries& series,
                                       ScoreKind kind, const StreamOptions& options) {
  nn::expect_size(series.dims, model.dims, "score_stream dims");
  std::vector<NoveltyScore> out;
  const std::size_t T = series.steps;

  if (kind == ScoreKind::kKl) {
    check_offsets(options.near_offset, options.far_offset);
    const std::size_t near = options.near_offset;
    const std::size_t far = options.far_offset;
    std::vector<std::optional<prob::DistVector>> p_for(T), q_for(T);

    const auto prior = forecaster::default_prior(model.dims);
    auto h = nn::zero_state(model.net.stack);
    std::optional<prob::DistVector> pending;
    for (std::size_t o = 0; o < T; ++o) {
      const auto obs = series.observation(o);
      const auto input = forecaster::encode_input(obs, pending ? &*pending : nullptr, prior);
      auto pred = forecaster::step(model, input, h);
      if (o + near < T) {
        const auto f = forecaster::rollout_from(model, h, pred, o, far);
        p_for[o + near] = f.steps[near - 1];
        if (o + far < T) q_for[o + far] = f.steps[far - 1];
      }
      pending = std::move(pred);
    }
    for (std::size_t t = far; t < T; ++t) {
      out.push_back({t, kind, directed_kl(*p_for[t], *q_for[t], options.reverse_kl), false});
    }
    return out;
  }

  const auto filtered = forecaster::filter_series(model, series);
  for (std::size_t t = 1; t < T; ++t) {
    Forecast f;
    f.origin_t = t - 1;
    f.steps.push_back(filtered[t - 1].forecast);
    if (kind == ScoreKind::kVolatility) {
      out.push_back({t, kind, volatility_score(f), false});
      continue;
    }
    const auto obs = series.observation(t);
    if (std::none_of(obs.begin(), obs.end(), [](const auto& v) { return v.has_value(); })) continue;
    out.push_back({t, kind, surprise_score(f, 0, obs), false});
  }
  return out;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw CalibrationError("quantile of an empty set");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

Threshold calibrate_threshold(std::span<const double> scores, double q, ScoreKind kind) {
  if (scores.size() < 100) {
    throw CalibrationError("calibration needs at least 100 scores, got " +
                           std::to_string(scores.size()));
  }
  if (!(q >= 0.5 && q < 1.0)) throw ConfigError("calibration quantile must be in [0.5, 1)");
  return Threshold{kind, quantile({scores.begin(), scores.end()}, q), q};
}

void apply_threshold(std::span<NoveltyScore> scores, const Threshold& threshold) {
  for (auto& s : scores) s.flagged = s.value > threshold.cutoff;
}

}  // namespace uprop::novelty
