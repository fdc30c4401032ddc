#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "uprop/errors.hpp"
#include "uprop/forecaster.hpp"
#include "uprop/synth.hpp"
#include "uprop/training.hpp"

using namespace uprop;
using namespace uprop::forecaster;
using prob::DistVector;

namespace {

std::vector<DistVector> observed_inputs(const data::TimeSeries& s, std::size_t n) {
  std::vector<DistVector> out;
  for (std::size_t t = 0; t < n; ++t) out.push_back(DistVector::observed(s.row(t)));
  return out;
}

}  // namespace

TEST(EncodeInput, ObservedMissingAndPrior) {
  const std::vector<std::optional<double>> all{1.0, 2.0, 3.0};
  const auto prior = default_prior(3);
  EXPECT_EQ(encode_input(all, nullptr, prior), DistVector({1, 2, 3}, {0, 0, 0}));

  const DistVector pending({10, 20, 30}, {0.1, 0.2, 0.3});
  const std::vector<std::optional<double>> one_missing{1.0, std::nullopt, 3.0};
  EXPECT_EQ(encode_input(one_missing, &pending, prior), DistVector({1, 20, 3}, {0, 0.2, 0}));

  const std::vector<std::optional<double>> none(3, std::nullopt);
  EXPECT_EQ(encode_input(none, nullptr, prior), DistVector({0, 0, 0}, {1, 1, 1}));
  EXPECT_THROW(encode_input(none, &pending, default_prior(2)), ShapeError);
}

TEST(Step, DeterministicAndAboveFloor) {
  const auto model = test_support::random_model(3, 8, 2, 1);
  const DistVector in({0.3, -0.2, 1.0}, {0.0, 0.5, 0.0});
  auto h1 = nn::zero_state(model.net.stack);
  auto h2 = h1;
  const auto a = step(model, in, h1);
  const auto b = step(model, in, h2);
  EXPECT_EQ(a, b);
  EXPECT_EQ(h1, h2);
  for (double s : a.sigma) EXPECT_GE(s, model.squash.floor);
}

TEST(Step, ZeroWeightsReturnReadoutBias) {
  auto model = test_support::random_model(2, 4, 2, 3);
  model.net.set_zero();
  model.net.readout.bias.data = {0.7, -1.2, 0.0, -3.0};
  auto h = nn::zero_state(model.net.stack);
  const auto out = step(model, DistVector({5.0, 6.0}, {0.0, 1.0}), h);
  EXPECT_EQ(out.mu, (std::vector<double>{0.7, -1.2}));
  EXPECT_DOUBLE_EQ(out.sigma[0], std::log(2.0) + 1e-3);
  EXPECT_DOUBLE_EQ(out.sigma[1], std::log1p(std::exp(-3.0)) + 1e-3);
}

TEST(Rollout, PrefixConsistencyAndOneStep) {
  const auto model = test_support::random_model(3, 6, 2, 5);
  const auto s = test_support::noise_series(12, 3, 2);
  const auto ctx = observed_inputs(s, 12);
  const auto long_f = rollout(model, ctx, 8);
  EXPECT_EQ(long_f.horizon(), 8u);
  EXPECT_EQ(long_f.origin_t, 11u);
  for (std::size_t j = 1; j < 8; ++j) {
    const auto short_f = rollout(model, ctx, j);
    for (std::size_t i = 0; i < j; ++i) EXPECT_EQ(short_f.steps[i], long_f.steps[i]);
  }
  auto h = nn::zero_state(model.net.stack);
  DistVector last;
  for (const auto& in : ctx) last = step(model, in, h);
  EXPECT_EQ(rollout(model, ctx, 1).steps[0], last);
  EXPECT_THROW(rollout(model, ctx, 0), RangeError);
}

TEST(Rollout, ShapeMatchesLookaheadByDims) {
  // k = 3 future steps of N = 5 dims: a 3 × 5 truth against a 3 × 10 belief.
  const auto model = test_support::random_model(5, 4, 1, 8);
  const auto s = test_support::noise_series(6, 5, 1);
  const auto f = rollout(model, observed_inputs(s, 6), 3);
  ASSERT_EQ(f.steps.size(), 3u);
  for (const auto& b : f.steps) EXPECT_EQ(b.flatten().size(), 10u);
}

TEST(Forecast, DenormalizeScalesLocationsAndScales) {
  Forecast f{4, {DistVector({1.0, -1.0}, {0.5, 2.0})}};
  const data::NormStats norm{{10.0, 0.0}, {2.0, 3.0}};
  const auto d = f.denormalized(norm);
  EXPECT_EQ(d.origin_t, 4u);
  EXPECT_EQ(d.steps[0].mu, (std::vector<double>{12.0, -3.0}));
  EXPECT_EQ(d.steps[0].sigma, (std::vector<double>{1.0, 6.0}));
}

TEST(FilterSeries, ObservedInputsHaveZeroScale) {
  const auto model = test_support::random_model(2, 5, 2, 2);
  const auto s = test_support::noise_series(10, 2, 3);
  const auto steps = filter_series(model, s);
  ASSERT_EQ(steps.size(), 10u);
  for (std::size_t t = 0; t < 10; ++t) {
    EXPECT_EQ(steps[t].input, DistVector::observed(s.row(t)));
  }
}

TEST(FilterSeries, MissingCellTakesPreviousForecast) {
  const auto model = test_support::random_model(3, 5, 2, 4);
  auto s = test_support::noise_series(10, 3, 3);
  s.set_missing(4, 1);
  s.set_missing(0, 2);
  const auto steps = filter_series(model, s);
  EXPECT_EQ(steps[4].input.mu[1], steps[3].forecast.mu[1]);
  EXPECT_EQ(steps[4].input.sigma[1], steps[3].forecast.sigma[1]);
  EXPECT_EQ(steps[4].input.sigma[0], 0.0);
  EXPECT_EQ(steps[0].input.mu[2], 0.0);
  EXPECT_EQ(steps[0].input.sigma[2], 1.0);
}

TEST(FilterSeries, MissingTailEqualsRollout) {
  const auto model = test_support::random_model(3, 6, 3, 6);
  auto s = test_support::noise_series(20, 3, 8);
  s.set_missing(5, 0);
  const std::size_t last_observed = 13, tail = 6;
  for (std::size_t t = last_observed + 1; t < 20; ++t) {
    for (std::size_t d = 0; d < 3; ++d) s.set_missing(t, d);
  }
  const auto steps = filter_series(model, s);
  std::vector<DistVector> ctx;
  for (std::size_t t = 0; t <= last_observed; ++t) ctx.push_back(steps[t].input);
  const auto f = rollout(model, ctx, tail);
  for (std::size_t j = 0; j < tail; ++j) EXPECT_EQ(steps[last_observed + j].forecast, f.steps[j]);
}

TEST(Config, ValidationMessages) {
  ModelSpec spec;
  EXPECT_NO_THROW(spec.validate());
  spec.dropout = 1.0;
  EXPECT_THROW(spec.validate(), ConfigError);
  TrainConfig tc;
  EXPECT_NO_THROW(tc.validate());
  EXPECT_EQ(tc.min_context(), 30u);
  tc.lookahead = tc.window_length;
  EXPECT_THROW(tc.validate(), ConfigError);
  tc = TrainConfig{};
  tc.learning_rate = -1.0;
  EXPECT_THROW(tc.validate(), ConfigError);
  tc = TrainConfig{};
  tc.context_hide = 1.0;
  EXPECT_THROW(tc.validate(), ConfigError);
}

TEST(DrawSample, AnchorRangeAndMaskShapes) {
  TrainConfig tc;
  tc.window_length = 40;
  tc.lookahead = 4;
  Rng rng(1);
  std::size_t lo = 1000, hi = 0;
  for (int i = 0; i < 500; ++i) {
    const auto s = draw_sample(tc, 3, rng, 0);
    lo = std::min(lo, s.context);
    hi = std::max(hi, s.context);
    EXPECT_EQ(s.reveal.size(), 9u);
    EXPECT_EQ(s.hide.size(), s.context * 3);
  }
  EXPECT_EQ(lo, 10u);
  EXPECT_EQ(hi, 36u);
  tc.rollout_reveal = 0.0;
  tc.context_hide = 0.0;
  const auto plain = draw_sample(tc, 3, rng, 0);
  EXPECT_TRUE(plain.reveal.empty());
  EXPECT_TRUE(plain.hide.empty());
}

TEST(WindowLoss, IsMeanPointNll) {
  auto model = test_support::random_model(2, 3, 1, 4);
  model.net.set_zero();
  model.net.readout.bias.data = {0.0, 0.0, 0.0, 0.0};
  const auto w = data::TimeSeries::complete(4, 2, {0, 0, 0, 0, 1, -1, 0, 2});
  const double sigma = std::log(2.0) + 1e-3;
  const auto term = [&](double x) { return prob::nll_term(0.0, sigma, x); };
  const double want = (term(1) + term(-1) + term(0) + term(2)) / 4.0;
  EXPECT_NEAR(window_loss(model, w, {2, 2, 0, {}, {}}), want, 1e-12);
  EXPECT_THROW(window_loss(model, w, {3, 2, 0, {}, {}}), RangeError);
}

TEST(Train, LossDecreasesOnLearnableData) {
  const auto series = data::synth_ar_seasonal(1200, 2, 0.8, 0.2, 60.0, 3);
  const std::vector<data::TimeSeries> all{series};
  const auto windows = data::window_all(all, 40, 10);
  ModelSpec spec{2, 1, 8, 0.0, 1e-3};
  TrainConfig tc;
  tc.lookahead = 2;
  tc.epochs = 20;
  tc.batch_size = 8;
  tc.window_length = 40;
  tc.seed = 4;
  const auto r = train(windows, spec, tc);
  ASSERT_EQ(r.loss_history.size(), 20u);
  EXPECT_LT(r.loss_history.back(), r.loss_history.front());
  EXPECT_LT(r.loss_history.back(), 0.8 * r.loss_history.front());
}

TEST(Train, SameSeedSameModel) {
  const auto windows = data::window_all(data::synth_cloud(1, 400, 2), 40, 20);
  ModelSpec spec{3, 2, 6, 0.2, 1e-3};
  TrainConfig tc;
  tc.lookahead = 3;
  tc.epochs = 2;
  tc.batch_size = 4;
  tc.window_length = 40;
  tc.seed = 11;
  const auto a = train(windows, spec, tc);
  const auto b = train(windows, spec, tc);
  EXPECT_EQ(a.loss_history, b.loss_history);
  EXPECT_EQ(a.model, b.model);
  tc.seed = 12;
  EXPECT_NE(train(windows, spec, tc).loss_history, a.loss_history);
}

TEST(Train, RejectsMissingValuesAndWrongShapes) {
  auto windows = data::window_all(data::synth_cloud(1, 400, 2), 40, 40);
  ModelSpec spec{3, 1, 4, 0.0, 1e-3};
  TrainConfig tc;
  tc.epochs = 1;
  tc.window_length = 40;
  windows[2].set_missing(3, 1);
  EXPECT_THROW(train(windows, spec, tc), DataError);
  windows[2] = windows[1];
  spec.dims = 2;
  EXPECT_THROW(train(windows, spec, tc), DataError);
  spec.dims = 3;
  tc.window_length = 50;
  EXPECT_THROW(train(windows, spec, tc), DataError);
}
