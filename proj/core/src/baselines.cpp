#include "uprop/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "uprop/errors.hpp"
#include "uprop/rng.hpp"

namespace uprop::baselines {

using forecaster::FilterStep;
using forecaster::UPropModel;

std::vector<FilterStep> filter_series_imputed(const UPropModel& model,
                                              const data::TimeSeries& series,
                                              const ImputePolicy& policy) {
  nn::expect_size(series.dims, model.dims, "filter_series_imputed dims");
  const auto prior = forecaster::default_prior(model.dims);
  Rng rng(policy.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto h = nn::zero_state(model.net.stack);
  std::vector<FilterStep> out;
  out.reserve(series.steps);

  for (std::size_t t = 0; t < series.steps; ++t) {
    const prob::DistVector& belief = out.empty() ? prior : out.back().forecast;
    prob::DistVector input(model.dims);
    for (std::size_t d = 0; d < model.dims; ++d) {
      if (series.is_observed(t, d)) {
        input.mu[d] = series.at(t, d);
        continue;
      }
      double v = belief.mu[d];
      if (policy.kind == ImputeKind::kSample) v += belief.sigma[d] * gauss(rng);
      input.mu[d] = std::clamp(v, -kImputeClamp, kImputeClamp);
    }
    auto pred = forecaster::step(model, input, h);
    out.push_back({std::move(input), std::move(pred)});
  }
  return out;
}

McForecast mc_rollout(const UPropModel& model, std::span<const prob::DistVector> context,
                      std::size_t k, std::size_t n_samples, std::uint64_t seed) {
  if (n_samples < 2) throw RangeError("mc_rollout needs at least 2 samples");
  if (k == 0) throw RangeError("mc_rollout horizon must be at least 1");
  if (context.empty()) throw RangeError("mc_rollout needs a non-empty context");

  auto h0 = nn::zero_state(model.net.stack);
  prob::DistVector first;
  for (const auto& in : context) first = forecaster::step(model, in, h0);

  const std::size_t n = model.dims;
  std::vector<double> mean(k * n, 0.0);
  std::vector<std::vector<double>> samples(n_samples, std::vector<double>(k * n));

  for (std::size_t i = 0; i < n_samples; ++i) {
    Rng rng(derive_seed({seed, i}));
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto h = h0;
    prob::DistVector belief = first;
    for (std::size_t j = 0; j < k; ++j) {
      prob::DistVector input(n);
      for (std::size_t d = 0; d < n; ++d) {
        const double s = belief.mu[d] + belief.sigma[d] * gauss(rng);
        samples[i][j * n + d] = s;
        input.mu[d] = std::clamp(s, -kImputeClamp, kImputeClamp);
      }
      if (j + 1 < k) belief = forecaster::step(model, input, h);
    }
  }

  for (const auto& s : samples) {
    for (std::size_t c = 0; c < k * n; ++c) mean[c] += s[c];
  }
  for (double& m : mean) m /= static_cast<double>(n_samples);
  std::vector<double> var(k * n, 0.0);
  for (const auto& s : samples) {
    for (std::size_t c = 0; c < k * n; ++c) {
      const double dev = s[c] - mean[c];
      var[c] += dev * dev;
    }
  }

  McForecast f;
  f.origin_t = context.size() - 1;
  for (std::size_t j = 0; j < k; ++j) {
    prob::DistVector step_belief(n);
    for (std::size_t d = 0; d < n; ++d) {
      step_belief.mu[d] = mean[j * n + d];
      step_belief.sigma[d] = std::sqrt(var[j * n + d] / static_cast<double>(n_samples - 1));
    }
    f.steps.push_back(std::move(step_belief));
  }
  return f;
}

}  // namespace uprop::baselines
