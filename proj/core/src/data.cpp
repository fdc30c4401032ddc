#include "uprop/data.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "uprop/errors.hpp"
#include "uprop/rng.hpp"

namespace uprop::data {

namespace fs = std::filesystem;

TimeSeries::TimeSeries(std::size_t t, std::size_t n)
    : steps(t), dims(n), values(t * n, 0.0), observed(t * n, 0) {}

TimeSeries TimeSeries::complete(std::size_t t, std::size_t n, std::vector<double> vals,
                                std::int64_t start) {
  if (vals.size() != t * n) throw ShapeError("TimeSeries::complete: value count != T*N");
  TimeSeries s;
  s.start = start;
  s.steps = t;
  s.dims = n;
  s.values = std::move(vals);
  s.observed.assign(t * n, 1);
  return s;
}

std::optional<double> TimeSeries::get(std::size_t t, std::size_t d) const {
  if (!is_observed(t, d)) return std::nullopt;
  return at(t, d);
}

void TimeSeries::set(std::size_t t, std::size_t d, double v) {
  values[t * dims + d] = v;
  observed[t * dims + d] = 1;
}

void TimeSeries::set_missing(std::size_t t, std::size_t d) {
  values[t * dims + d] = 0.0;
  observed[t * dims + d] = 0;
}

std::vector<std::optional<double>> TimeSeries::observation(std::size_t t) const {
  std::vector<std::optional<double>> out(dims);
  for (std::size_t d = 0; d < dims; ++d) out[d] = get(t, d);
  return out;
}

bool TimeSeries::fully_observed() const {
  return std::all_of(observed.begin(), observed.end(), [](std::uint8_t m) { return m != 0; });
}

std::size_t TimeSeries::missing_count() const {
  return static_cast<std::size_t>(std::count(observed.begin(), observed.end(), 0));
}

TimeSeries TimeSeries::slice(std::size_t begin, std::size_t length) const {
  if (begin + length > steps) throw RangeError("TimeSeries::slice beyond end of series");
  TimeSeries out(length, dims);
  out.start = start + static_cast<std::int64_t>(begin);
  std::copy_n(values.begin() + begin * dims, length * dims, out.values.begin());
  std::copy_n(observed.begin() + begin * dims, length * dims, out.observed.begin());
  return out;
}

NormStats compute_norm_stats(std::span<const TimeSeries> series) {
  if (series.empty()) throw DataError("cannot compute normalization statistics of no data");
  const std::size_t n = series.front().dims;
  std::vector<double> sum(n, 0.0);
  std::vector<std::size_t> count(n, 0);
  for (const auto& s : series) {
    if (s.dims != n) throw ShapeError("normalization statistics over series of differing dims");
    for (std::size_t t = 0; t < s.steps; ++t) {
      for (std::size_t d = 0; d < n; ++d) {
        if (s.is_observed(t, d)) {
          sum[d] += s.at(t, d);
          ++count[d];
        }
      }
    }
  }
  NormStats stats;
  stats.mean.resize(n);
  stats.std.resize(n);
  for (std::size_t d = 0; d < n; ++d) {
    if (count[d] == 0) throw DataError("dimension " + std::to_string(d) + " has no observations");
    stats.mean[d] = sum[d] / static_cast<double>(count[d]);
  }
  std::vector<double> sq(n, 0.0);
  for (const auto& s : series) {
    for (std::size_t t = 0; t < s.steps; ++t) {
      for (std::size_t d = 0; d < n; ++d) {
        if (s.is_observed(t, d)) {
          const double dev = s.at(t, d) - stats.mean[d];
          sq[d] += dev * dev;
        }
      }
    }
  }
  for (std::size_t d = 0; d < n; ++d) {
    stats.std[d] = std::max(std::sqrt(sq[d] / static_cast<double>(count[d])), NormStats::kStdFloor);
  }
  return stats;
}

TimeSeries normalize(const TimeSeries& series, const NormStats& stats) {
  if (stats.dims() != series.dims) throw ShapeError("normalize: stats dims != series dims");
  TimeSeries out = series;
  for (std::size_t t = 0; t < series.steps; ++t) {
    for (std::size_t d = 0; d < series.dims; ++d) {
      if (series.is_observed(t, d)) {
        out.values[t * series.dims + d] = (series.at(t, d) - stats.mean[d]) / stats.std[d];
      }
    }
  }
  return out;
}

TimeSeries denormalize(const TimeSeries& series, const NormStats& stats) {
  if (stats.dims() != series.dims) throw ShapeError("denormalize: stats dims != series dims");
  TimeSeries out = series;
  for (std::size_t t = 0; t < series.steps; ++t) {
    for (std::size_t d = 0; d < series.dims; ++d) {
      if (series.is_observed(t, d)) {
        out.values[t * series.dims + d] = series.at(t, d) * stats.std[d] + stats.mean[d];
      }
    }
  }
  return out;
}

TimeSeries emulate_missing(const TimeSeries& series, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate < 1.0)) throw RangeError("missing rate must be in [0, 1)");
  if (!series.fully_observed()) {
    throw DataError("emulate_missing requires a fully observed series");
  }
  TimeSeries out = series;
  if (rate == 0.0) return out;
  Rng rng(seed);
  std::bernoulli_distribution drop(rate);
  for (std::size_t i = 0; i < out.observed.size(); ++i) {
    if (drop(rng)) {
      out.observed[i] = 0;
      out.values[i] = 0.0;
    }
  }
  return out;
}

std::vector<TimeSeries> window(const TimeSeries& series, std::size_t length, std::size_t stride) {
  if (length == 0 || stride == 0) throw RangeError("window length and stride must be positive");
  if (length > series.steps) {
    throw RangeError("window length " + std::to_string(length) + " exceeds series length " +
                     std::to_string(series.steps));
  }
  std::vector<TimeSeries> out;
  for (std::size_t begin = 0; begin + length <= series.steps; begin += stride) {
    out.push_back(series.slice(begin, length));
  }
  return out;
}

std::vector<TimeSeries> window_all(std::span<const TimeSeries> series, std::size_t length,
                                   std::size_t stride) {
  std::vector<TimeSeries> out;
  for (const auto& s : series) {
    auto w = window(s, length, stride);
    std::move(w.begin(), w.end(), std::back_inserter(out));
  }
  return out;
}

DatasetSplit split(std::vector<TimeSeries> windows, SplitFractions f, std::uint64_t seed) {
  const double total = f.train + f.val + f.test;
  if (f.train < 0 || f.val < 0 || f.test < 0 || std::abs(total - 1.0) > 1e-9) {
    throw ConfigError("split fractions must be nonnegative and sum to 1");
  }
  Rng rng(seed);
  std::shuffle(windows.begin(), windows.end(), rng);
  const std::size_t n = windows.size();
  // Small epsilon keeps 0.8·100 from flooring to 79.
  const auto n_train = static_cast<std::size_t>(std::floor(f.train * static_cast<double>(n) + 1e-9));
  const auto n_val = static_cast<std::size_t>(std::floor(f.val * static_cast<double>(n) + 1e-9));
  DatasetSplit out;
  auto it = std::make_move_iterator(windows.begin());
  out.train.assign(it, it + static_cast<std::ptrdiff_t>(n_train));
  out.val.assign(it + static_cast<std::ptrdiff_t>(n_train),
                 it + static_cast<std::ptrdiff_t>(n_train + n_val));
  out.test.assign(it + static_cast<std::ptrdiff_t>(n_train + n_val),
                  std::make_move_iterator(windows.end()));
  return out;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

/// Reads the header and returns N, validating "t,dim_0,...".
std::size_t read_header(std::istream& in, const fs::path& path) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(0, "empty file " + path.string());
  const auto fields = split_fields(trim(line));
  if (fields.size() < 2 || trim(fields[0]) != "t") {
    throw ParseError(0, "header must be \"t,dim_0,...,dim_{N-1}\" in " + path.string());
  }
  for (std::size_t i = 1; i < fields.size(); ++i) {
    if (trim(fields[i]) != "dim_" + std::to_string(i - 1)) {
      throw ParseError(0, "header column " + std::to_string(i) + " must be dim_" +
                              std::to_string(i - 1));
    }
  }
  return fields.size() - 1;
}

std::string header_line(std::size_t dims) {
  std::string h = "t";
  for (std::size_t d = 0; d < dims; ++d) h += fmt::format(",dim_{}", d);
  return h;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

}  // namespace

TimeSeries load_csv(const fs::path& path) {
  auto in = open_in(path);
  const std::size_t dims = read_header(in, path);

  TimeSeries s;
  s.dims = dims;
  std::string line;
  std::size_t row = 0;
  std::int64_t prev_t = 0;
  while (std::getline(in, line)) {
    const auto body = trim(line);
    if (body.empty()) continue;
    ++row;
    const auto fields = split_fields(body);
    if (fields.size() != dims + 1) {
      throw ParseError(row, fmt::format("expected {} fields, got {}", dims + 1, fields.size()));
    }
    std::int64_t t = 0;
    if (!parse_number(trim(fields[0]), t)) throw ParseError(row, "t is not an integer");
    if (row == 1) {
      s.start = t;
    } else if (t != prev_t + 1) {
      throw ParseError(row, fmt::format("t must be consecutive: expected {}, got {}", prev_t + 1, t));
    }
    prev_t = t;
    for (std::size_t d = 0; d < dims; ++d) {
      const auto f = trim(fields[d + 1]);
      if (f.empty()) {
        s.values.push_back(0.0);
        s.observed.push_back(0);
        continue;
      }
      double v = 0.0;
      if (!parse_number(f, v) || !std::isfinite(v)) {
        throw ParseError(row, fmt::format("dim_{} is not a finite number: \"{}\"", d, f));
      }
      s.values.push_back(v);
      s.observed.push_back(1);
    }
  }
  s.steps = row;
  return s;
}

void save_csv(const TimeSeries& series, const fs::path& path) {
  auto out = open_out(path);
  std::string buf = header_line(series.dims);
  buf += '\n';
  for (std::size_t t = 0; t < series.steps; ++t) {
    buf += fmt::format("{}", series.start + static_cast<std::int64_t>(t));
    for (std::size_t d = 0; d < series.dims; ++d) {
      buf += ',';
      if (series.is_observed(t, d)) buf += fmt::format("{:.17g}", series.at(t, d));
    }
    buf += '\n';
  }
  out << buf;
}

void save_mask_csv(const TimeSeries& series, const fs::path& path) {
  auto out = open_out(path);
  std::string buf = header_line(series.dims);
  buf += '\n';
  for (std::size_t t = 0; t < series.steps; ++t) {
    buf += fmt::format("{}", series.start + static_cast<std::int64_t>(t));
    for (std::size_t d = 0; d < series.dims; ++d) {
      buf += series.is_observed(t, d) ? ",1" : ",0";
    }
    buf += '\n';
  }
  out << buf;
}

std::vector<std::uint8_t> load_mask_csv(const fs::path& path, std::size_t steps, std::size_t dims) {
  auto in = open_in(path);
  if (read_header(in, path) != dims) throw ParseError(0, "mask dims differ from data dims");
  std::vector<std::uint8_t> mask;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    const auto body = trim(line);
    if (body.empty()) continue;
    ++row;
    const auto fields = split_fields(body);
    if (fields.size() != dims + 1) throw ParseError(row, "ragged mask row");
    for (std::size_t d = 0; d < dims; ++d) {
      const auto f = trim(fields[d + 1]);
      if (f != "0" && f != "1") throw ParseError(row, "mask cells must be 0 or 1");
      mask.push_back(f == "1" ? 1 : 0);
    }
  }
  if (row != steps) throw ParseError(row, "mask row count differs from data");
  return mask;
}

fs::path mask_path_for(const fs::path& data_path) {
  auto p = data_path;
  p.replace_extension();
  p += ".mask.csv";
  return p;
}

std::vector<fs::path> list_series_files(const fs::path& path) {
  if (!fs::exists(path)) throw DataError("no such file or directory: " + path.string());
  if (!fs::is_directory(path)) return {path};
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path)) {
    const auto name = entry.path().filename().string();
    if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
    if (name.size() >= 9 && name.ends_with(".mask.csv")) continue;
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw DataError("no CSV files in " + path.string());
  return files;
}

std::vector<TimeSeries> load_series(const fs::path& path) {
  std::vector<TimeSeries> out;
  for (const auto& f : list_series_files(path)) out.push_back(load_csv(f));
  return out;
}

}  // namespace uprop::data
