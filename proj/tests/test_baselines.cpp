#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "uprop/baselines.hpp"
#include "uprop/errors.hpp"
#include "uprop/forecaster.hpp"

using namespace uprop;
using namespace uprop::baselines;
using prob::DistVector;

namespace {

// Every predicted σ sits at the floor: readout σ rows zeroed, σ biases −40.
forecaster::UPropModel floor_sigma_model(std::size_t dims, std::uint64_t seed) {
  auto m = test_support::random_model(dims, 6, 2, seed);
  auto& w = m.net.readout.weight;
  for (std::size_t r = dims; r < 2 * dims; ++r) {
    for (std::size_t c = 0; c < w.cols; ++c) w(r, c) = 0.0;
    m.net.readout.bias.data[r] = -40.0;
  }
  return m;
}

std::vector<DistVector> observed_context(const data::TimeSeries& s) {
  std::vector<DistVector> out;
  for (std::size_t t = 0; t < s.steps; ++t) out.push_back(DistVector::observed(s.row(t)));
  return out;
}

}  // namespace

TEST(Imputation, FullyObservedMatchesFilterSeries) {
  const auto model = test_support::random_model(3, 5, 2, 1);
  const auto s = test_support::noise_series(15, 3, 2);
  const auto ref = forecaster::filter_series(model, s);
  for (auto kind : {ImputeKind::kMean, ImputeKind::kSample}) {
    const auto got = filter_series_imputed(model, s, {kind, 9});
    ASSERT_EQ(got.size(), ref.size());
    for (std::size_t t = 0; t < ref.size(); ++t) {
      EXPECT_EQ(got[t].input, ref[t].input);
      EXPECT_EQ(got[t].forecast, ref[t].forecast);
    }
  }
}

TEST(Imputation, MeanPolicyFeedsCertainForecastMean) {
  const auto model = test_support::random_model(3, 5, 2, 3);
  auto s = test_support::noise_series(15, 3, 2);
  s.set_missing(6, 0);
  s.set_missing(7, 0);
  s.set_missing(0, 1);
  const auto got = filter_series_imputed(model, s, {ImputeKind::kMean, 0});
  for (const auto& step : got) {
    for (double sg : step.input.sigma) EXPECT_EQ(sg, 0.0);
  }
  EXPECT_EQ(got[6].input.mu[0], got[5].forecast.mu[0]);
  EXPECT_EQ(got[7].input.mu[0], got[6].forecast.mu[0]);
  EXPECT_EQ(got[0].input.mu[1], 0.0);
}

TEST(Imputation, SampleAtFloorStaysNearMean) {
  const auto model = floor_sigma_model(2, 4);
  auto s = test_support::noise_series(30, 2, 5);
  for (std::size_t t = 3; t < 30; t += 3) s.set_missing(t, t % 2);
  const auto got = filter_series_imputed(model, s, {ImputeKind::kSample, 77});
  for (std::size_t t = 3; t < 30; t += 3) {
    const std::size_t d = t % 2;
    EXPECT_EQ(got[t].input.sigma[d], 0.0);
    EXPECT_LE(std::abs(got[t].input.mu[d] - got[t - 1].forecast.mu[d]), 4.0 * 1e-3);
  }
}

TEST(Imputation, SampleIsSeededAndClamped) {
  auto model = test_support::random_model(1, 4, 1, 6);
  model.net.readout.weight.fill(0.0);
  model.net.readout.bias.data = {0.0, 30.0};  // σ ≈ 30
  auto s = test_support::noise_series(40, 1, 1);
  for (std::size_t t = 1; t < 40; ++t) s.set_missing(t, 0);
  const auto a = filter_series_imputed(model, s, {ImputeKind::kSample, 5});
  const auto b = filter_series_imputed(model, s, {ImputeKind::kSample, 5});
  const auto c = filter_series_imputed(model, s, {ImputeKind::kSample, 6});
  bool differs = false, clamped = false;
  for (std::size_t t = 1; t < 40; ++t) {
    EXPECT_EQ(a[t].input, b[t].input);
    differs = differs || a[t].input != c[t].input;
    EXPECT_LE(std::abs(a[t].input.mu[0]), kImputeClamp);
    clamped = clamped || std::abs(a[t].input.mu[0]) == kImputeClamp;
  }
  EXPECT_TRUE(differs);
  EXPECT_TRUE(clamped);
}

TEST(MonteCarlo, NearDeterministicModelMatchesRollout) {
  const auto model = floor_sigma_model(2, 7);
  const auto ctx = observed_context(test_support::noise_series(10, 2, 3));
  const auto det = forecaster::rollout(model, ctx, 5);
  const auto mc = mc_rollout(model, ctx, 5, 1000, 1);
  ASSERT_EQ(mc.steps.size(), 5u);
  EXPECT_EQ(mc.origin_t, 9u);
  for (std::size_t j = 0; j < 5; ++j) {
    for (std::size_t d = 0; d < 2; ++d) EXPECT_NEAR(mc.steps[j].mu[d], det.steps[j].mu[d], 1e-2);
  }
}

TEST(MonteCarlo, SeededAndValidated) {
  const auto model = test_support::random_model(2, 4, 1, 8);
  const auto ctx = observed_context(test_support::noise_series(5, 2, 3));
  const auto a = mc_rollout(model, ctx, 3, 20, 4);
  const auto b = mc_rollout(model, ctx, 3, 20, 4);
  EXPECT_EQ(a.steps, b.steps);
  EXPECT_THROW(mc_rollout(model, ctx, 3, 1, 4), RangeError);
  EXPECT_THROW(mc_rollout(model, ctx, 0, 20, 4), RangeError);
}

TEST(MonteCarlo, StandardErrorShrinksWithSampleCount) {
  const auto model = test_support::random_model(1, 6, 2, 10);
  const auto ctx = observed_context(test_support::noise_series(6, 1, 2));
  const auto spread_of_means = [&](std::size_t n) {
    std::vector<double> means;
    for (std::uint64_t b = 0; b < 10; ++b) means.push_back(mc_rollout(model, ctx, 4, n, 100 + b).steps[3].mu[0]);
    double m = 0.0;
    for (double v : means) m += v;
    m /= 10.0;
    double ss = 0.0;
    for (double v : means) ss += (v - m) * (v - m);
    return std::sqrt(ss / 9.0);
  };
  const double ratio = spread_of_means(100) / spread_of_means(1000);
  EXPECT_GT(ratio, std::sqrt(10.0) / 2.0);
  EXPECT_LT(ratio, std::sqrt(10.0) * 2.0);
}
