#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "support.hpp"
#include "uprop/data.hpp"
#include "uprop/errors.hpp"
#include "uprop/synth.hpp"

using namespace uprop;
using namespace uprop::data;
using test_support::TempDir;

namespace {

double lag1_autocorrelation(const TimeSeries& s, std::size_t d) {
  double mean = 0.0;
  for (std::size_t t = 0; t < s.steps; ++t) mean += s.at(t, d);
  mean /= static_cast<double>(s.steps);
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < s.steps; ++t) {
    const double a = s.at(t, d) - mean;
    den += a * a;
    if (t + 1 < s.steps) num += a * (s.at(t + 1, d) - mean);
  }
  return num / den;
}

}  // namespace

TEST(TimeSeries, AccessorsAndMask) {
  TimeSeries s(3, 2);
  EXPECT_EQ(s.missing_count(), 6u);
  s.set(0, 0, 1.5);
  s.set(2, 1, -2.0);
  EXPECT_TRUE(s.is_observed(0, 0));
  EXPECT_EQ(s.get(0, 1), std::nullopt);
  EXPECT_EQ(s.get(2, 1), -2.0);
  s.set_missing(0, 0);
  EXPECT_EQ(s.at(0, 0), 0.0);
  EXPECT_EQ(s.missing_count(), 5u);
  const auto obs = s.observation(2);
  EXPECT_FALSE(obs[0].has_value());
  EXPECT_EQ(*obs[1], -2.0);
}

TEST(TimeSeries, SliceKeepsStartIndex) {
  auto s = TimeSeries::complete(4, 1, {0, 1, 2, 3}, 10);
  const auto sub = s.slice(1, 2);
  EXPECT_EQ(sub.start, 11);
  EXPECT_EQ(sub.values, (std::vector<double>{1, 2}));
  EXPECT_THROW(s.slice(3, 2), RangeError);
}

TEST(Csv, ParsesEmptyFieldAsMissing) {
  TempDir dir("csv");
  test_support::write_file(dir / "a.csv", "t,dim_0,dim_1\n0,1.5,2\n1,,3\n2,4,5e-1\n");
  const auto s = load_csv(dir / "a.csv");
  EXPECT_EQ(s.steps, 3u);
  EXPECT_EQ(s.dims, 2u);
  EXPECT_EQ(s.missing_count(), 1u);
  EXPECT_FALSE(s.is_observed(1, 0));
  EXPECT_EQ(s.at(2, 1), 0.5);
}

TEST(Csv, GapInTimeNamesTheRow) {
  TempDir dir("csv");
  test_support::write_file(dir / "gap.csv", "t,dim_0\n1,1\n2,2\n4,3\n");
  try {
    load_csv(dir / "gap.csv");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 3u);
    EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos);
  }
}

TEST(Csv, RejectsMalformedInput) {
  TempDir dir("csv");
  test_support::write_file(dir / "h.csv", "time,x\n0,1\n");
  EXPECT_THROW(load_csv(dir / "h.csv"), ParseError);
  test_support::write_file(dir / "r.csv", "t,dim_0,dim_1\n0,1\n");
  EXPECT_THROW(load_csv(dir / "r.csv"), ParseError);
  test_support::write_file(dir / "n.csv", "t,dim_0\n0,abc\n");
  EXPECT_THROW(load_csv(dir / "n.csv"), ParseError);
  test_support::write_file(dir / "i.csv", "t,dim_0\n0,inf\n");
  EXPECT_THROW(load_csv(dir / "i.csv"), ParseError);
  EXPECT_THROW(load_csv(dir / "missing.csv"), DataError);
}

TEST(Csv, RoundTripIsExactIncludingMask) {
  TempDir dir("csv");
  auto s = test_support::noise_series(50, 3, 9);
  s.start = 7;
  for (std::size_t t = 0; t < 50; t += 7) s.set_missing(t, t % 3);
  s.set(3, 1, 1.0 / 3.0);
  s.set(4, 2, -1e-300);
  save_csv(s, dir / "s.csv");
  EXPECT_EQ(load_csv(dir / "s.csv"), s);
}

TEST(Csv, MaskSidecarRoundTrip) {
  TempDir dir("mask");
  const auto truth = test_support::noise_series(20, 2, 1);
  const auto masked = emulate_missing(truth, 0.3, 5);
  save_mask_csv(masked, mask_path_for(dir / "x.csv"));
  EXPECT_EQ(mask_path_for(dir / "x.csv").filename(), "x.mask.csv");
  EXPECT_EQ(load_mask_csv(dir / "x.mask.csv", 20, 2), masked.observed);
}

TEST(Csv, DirectoryListingSkipsSidecars) {
  TempDir dir("list");
  const auto s = test_support::noise_series(5, 1, 2);
  save_csv(s, dir / "b.csv");
  save_csv(s, dir / "a.csv");
  save_mask_csv(s, dir / "a.mask.csv");
  const auto files = list_series_files(dir.path());
  ASSERT_EQ(files.size(), 2u);
  EXPECT_EQ(files[0].filename(), "a.csv");
  EXPECT_EQ(files[1].filename(), "b.csv");
}

TEST(Normalize, WorkedExample) {
  const auto s = TimeSeries::complete(3, 1, {1, 2, 3});
  const std::vector<TimeSeries> all{s};
  const auto stats = compute_norm_stats(all);
  EXPECT_DOUBLE_EQ(stats.mean[0], 2.0);
  EXPECT_NEAR(stats.std[0], std::sqrt(2.0 / 3.0), 1e-15);
  const auto n = normalize(s, stats);
  EXPECT_NEAR(n.at(0, 0), -1.22474, 5e-6);
  EXPECT_EQ(n.at(1, 0), 0.0);
  EXPECT_NEAR(n.at(2, 0), 1.22474, 5e-6);
}

TEST(Normalize, ConstantDimensionIsFloored) {
  const auto s = TimeSeries::complete(4, 2, {5, 1, 5, 2, 5, 3, 5, 4});
  const std::vector<TimeSeries> all{s};
  const auto stats = compute_norm_stats(all);
  EXPECT_EQ(stats.std[0], NormStats::kStdFloor);
  const auto n = normalize(s, stats);
  for (std::size_t t = 0; t < 4; ++t) EXPECT_EQ(n.at(t, 0), 0.0);
}

TEST(Normalize, MaskPreservedAndInverse) {
  auto s = test_support::noise_series(30, 2, 4);
  for (auto& v : s.values) v = 10.0 + 3.0 * v;
  s.set_missing(4, 1);
  const std::vector<TimeSeries> all{s};
  const auto stats = compute_norm_stats(all);
  const auto n = normalize(s, stats);
  EXPECT_EQ(n.observed, s.observed);
  const auto back = denormalize(n, stats);
  EXPECT_EQ(back.observed, s.observed);
  for (std::size_t i = 0; i < s.values.size(); ++i) EXPECT_NEAR(back.values[i], s.values[i], 1e-12);
}

TEST(EmulateMissing, BoundsAndDeterminism) {
  const auto s = test_support::noise_series(100, 3, 3);
  EXPECT_EQ(emulate_missing(s, 0.0, 1), s);
  const auto a = emulate_missing(s, 0.5, 42);
  EXPECT_NEAR(static_cast<double>(a.missing_count()), 150.0, 50.0);
  EXPECT_EQ(emulate_missing(s, 0.5, 42), a);
  EXPECT_NE(emulate_missing(s, 0.5, 43).observed, a.observed);
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    if (a.observed[i]) EXPECT_EQ(a.values[i], s.values[i]);
  }
  EXPECT_THROW(emulate_missing(a, 0.1, 1), DataError);
  EXPECT_THROW(emulate_missing(s, 1.0, 1), RangeError);
}

TEST(Window, CountsAndBounds) {
  const auto s = test_support::noise_series(240, 2, 1);
  EXPECT_EQ(window(s.slice(0, 120), 120, 120).size(), 1u);
  const auto two = window(s, 120, 120);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0].start, 0);
  EXPECT_EQ(two[1].start, 120);
  EXPECT_EQ(two[1].row(0)[0], s.row(120)[0]);
  EXPECT_EQ(window(s, 120, 20).size(), 7u);
  EXPECT_THROW(window(s.slice(0, 100), 120, 120), RangeError);
}

TEST(Split, EightyTenTen) {
  std::vector<TimeSeries> windows;
  for (int i = 0; i < 100; ++i) windows.push_back(TimeSeries::complete(1, 1, {double(i)}));
  const auto parts = split(windows, {}, 3);
  EXPECT_EQ(parts.train.size(), 80u);
  EXPECT_EQ(parts.val.size(), 10u);
  EXPECT_EQ(parts.test.size(), 10u);
  std::set<double> seen;
  for (const auto* part : {&parts.train, &parts.val, &parts.test}) {
    for (const auto& w : *part) seen.insert(w.at(0, 0));
  }
  EXPECT_EQ(seen.size(), 100u);
  EXPECT_EQ(split(windows, {}, 3).test, parts.test);
  EXPECT_THROW(split(windows, {0.8, 0.3, 0.1}, 3), ConfigError);
}

TEST(Synth, CloudChannelsAreInRange) {
  const auto nodes = synth_cloud(3, 3000, 5);
  ASSERT_EQ(nodes.size(), 3u);
  for (const auto& s : nodes) {
    EXPECT_EQ(s.dims, 3u);
    EXPECT_TRUE(s.fully_observed());
    for (std::size_t t = 0; t < s.steps; ++t) {
      EXPECT_GE(s.at(t, 0), 0.0);
      EXPECT_GE(s.at(t, 1), 0.0);
      EXPECT_GE(s.at(t, 2), 0.0);
      EXPECT_LE(s.at(t, 2), 1.0);
    }
  }
}

TEST(Synth, CloudIsDeterministicAndPersistent) {
  EXPECT_EQ(synth_cloud(2, 500, 9), synth_cloud(2, 500, 9));
  EXPECT_NE(synth_cloud(1, 500, 9)[0], synth_cloud(1, 500, 10)[0]);
  const auto s = synth_cloud(1, 10000, 1)[0];
  for (std::size_t d = 0; d < 3; ++d) EXPECT_GT(lag1_autocorrelation(s, d), 0.5) << "dim " << d;
  EXPECT_THROW(synth_cloud(1, 100, 1), RangeError);
}

TEST(Synth, RandomWalkAndInjection) {
  const auto walks = synth_random_walk(4, 200, 0.5, 3);
  ASSERT_EQ(walks.size(), 4u);
  EXPECT_EQ(walks[0].dims, 1u);
  const auto s = synth_ar_seasonal(300, 2, 0.8, 0.1, 50.0, 2);
  const auto shifted = inject_level_shift(s, 100, 1, 6.0);
  for (std::size_t t = 0; t < 300; ++t) {
    EXPECT_EQ(shifted.at(t, 0), s.at(t, 0));
    EXPECT_DOUBLE_EQ(shifted.at(t, 1), s.at(t, 1) + (t >= 100 ? 6.0 : 0.0));
  }
}
