#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace uprop::data {

/// T × N equispaced record with a per-cell observed mask. Missing cells hold 0.
struct TimeSeries {
  std::int64_t start = 0;  // index of the first step
  std::size_t steps = 0;
  std::size_t dims = 0;
  std::vector<double> values;          // row-major T × N
  std::vector<std::uint8_t> observed;  // 1 = observed

  TimeSeries() = default;
  TimeSeries(std::size_t t, std::size_t n);
  /// Fully observed series from row-major values.
  static TimeSeries complete(std::size_t t, std::size_t n, std::vector<double> values,
                             std::int64_t start = 0);

  bool is_observed(std::size_t t, std::size_t d) const { return observed[t * dims + d] != 0; }
  double at(std::size_t t, std::size_t d) const { return values[t * dims + d]; }
  std::optional<double> get(std::size_t t, std::size_t d) const;
  void set(std::size_t t, std::size_t d, double v);
  void set_missing(std::size_t t, std::size_t d);

  std::span<const double> row(std::size_t t) const { return {values.data() + t * dims, dims}; }
  /// The step's cells as optionals (nullopt = missing).
  std::vector<std::optional<double>> observation(std::size_t t) const;

  bool fully_observed() const;
  std::size_t missing_count() const;
  TimeSeries slice(std::size_t begin, std::size_t length) const;

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;
};

/// Per-dimension mean and population std from a training split.
struct NormStats {
  static constexpr double kStdFloor = 1e-6;

  std::vector<double> mean;
  std::vector<double> std;

  std::size_t dims() const noexcept { return mean.size(); }
  friend bool operator==(const NormStats&, const NormStats&) = default;
};

NormStats compute_norm_stats(std::span<const TimeSeries> series);
TimeSeries normalize(const TimeSeries& series, const NormStats& stats);
TimeSeries denormalize(const TimeSeries& series, const NormStats& stats);

/// Masks each cell independently with probability `rate`. Requires a fully
/// observed input; the input itself is the retained ground truth.
TimeSeries emulate_missing(const TimeSeries& series, double rate, std::uint64_t seed);

/// Contiguous windows of `length` steps starting every `stride` steps.
std::vector<TimeSeries> window(const TimeSeries& series, std::size_t length, std::size_t stride);
std::vector<TimeSeries> window_all(std::span<const TimeSeries> series, std::size_t length,
                                   std::size_t stride);

struct SplitFractions {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

struct DatasetSplit {
  std::vector<TimeSeries> train;
  std::vector<TimeSeries> val;
  std::vector<TimeSeries> test;
};

/// Shuffles windows with `seed`, then partitions them by fractions
/// (train and val counts are floored; test takes the remainder).
DatasetSplit split(std::vector<TimeSeries> windows, SplitFractions fractions, std::uint64_t seed);

/// CSV with header "t,dim_0,...,dim_{N-1}"; empty field = missing.
TimeSeries load_csv(const std::filesystem::path& path);
void save_csv(const TimeSeries& series, const std::filesystem::path& path);

/// 0/1 observed-mask sidecar with the same header and shape as the data CSV.
void save_mask_csv(const TimeSeries& series, const std::filesystem::path& path);
std::vector<std::uint8_t> load_mask_csv(const std::filesystem::path& path, std::size_t steps,
                                        std::size_t dims);
/// "<stem>.mask.csv" next to a data file.
std::filesystem::path mask_path_for(const std::filesystem::path& data_path);

/// A single CSV or every data CSV in a directory (sorted, mask sidecars excluded).
std::vector<std::filesystem::path> list_series_files(const std::filesystem::path& path);
std::vector<TimeSeries> load_series(const std::filesystem::path& path);

}  // namespace uprop::data
