#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>

#include "uprop/data.hpp"
#include "uprop/forecaster.hpp"
#include "uprop/rng.hpp"
#include "uprop/training.hpp"

namespace uprop::test_support {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("uprop_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

/// Randomly initialized model with nonzero biases, identity normalization.
inline forecaster::UPropModel random_model(std::size_t dims, std::size_t hidden, std::size_t layers,
                                           std::uint64_t seed, double dropout = 0.0) {
  forecaster::ModelSpec spec{dims, layers, hidden, dropout, 1e-3};
  forecaster::TrainConfig tc;
  tc.window_length = 16;
  tc.lookahead = 2;
  data::NormStats norm{std::vector<double>(dims, 0.0), std::vector<double>(dims, 1.0)};
  auto model = forecaster::UPropModel::create(spec, tc, norm, seed);
  Rng rng(derive_seed({seed, 99}));
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (auto* t : model.net.tensors()) {
    for (double& v : t->data) v += 0.3 * u(rng);
  }
  return model;
}

/// Gaussian noise series, fully observed.
inline data::TimeSeries noise_series(std::size_t steps, std::size_t dims, std::uint64_t seed) {
  data::TimeSeries s(steps, dims);
  Rng rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t d = 0; d < dims; ++d) s.set(t, d, n(rng));
  }
  return s;
}

/// Worst relative error between tape gradients and central differences of
/// window_loss over every parameter entry. The denominator has an absolute
/// floor of 1e-6 so exactly-zero gradients compare against round-off.
inline double max_gradient_error(forecaster::UPropModel model, const data::TimeSeries& window,
                                 const forecaster::RolloutSample& sample, double h = 1e-5) {
  auto grad = model.net.zeros_like();
  forecaster::window_loss(model, window, sample, &grad);
  const auto params = model.net.tensors();
  const auto grads = std::as_const(grad).tensors();
  double worst = 0.0;
  for (std::size_t p = 0; p < params.size(); ++p) {
    for (std::size_t i = 0; i < params[p]->data.size(); ++i) {
      double& w = params[p]->data[i];
      const double saved = w;
      w = saved + h;
      const double up = forecaster::window_loss(model, window, sample);
      w = saved - h;
      const double down = forecaster::window_loss(model, window, sample);
      w = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double analytic = grads[p]->data[i];
      const double denom = std::max({std::abs(numeric), std::abs(analytic), 1e-6});
      worst = std::max(worst, std::abs(numeric - analytic) / denom);
    }
  }
  return worst;
}

}  // namespace uprop::test_support
