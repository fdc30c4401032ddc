#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace uprop::prob {

/// Two-sided 95% standard normal quantile.
inline constexpr double kZ95 = 1.9599640;

/// Independent normal beliefs, one (location, scale) pair per dimension.
/// A scale of exactly 0 encodes a certain observation.
///
/// The flattened layout [mu_0..mu_{N-1}, sigma_0..sigma_{N-1}] is what the
/// network consumes and produces.
struct DistVector {
  std::vector<double> mu;
  std::vector<double> sigma;

  DistVector() = default;
  explicit DistVector(std::size_t dims) : mu(dims, 0.0), sigma(dims, 0.0) {}
  DistVector(std::vector<double> m, std::vector<double> s);

  static DistVector observed(std::span<const double> values);
  static DistVector standard(std::size_t dims);
  /// Inverse of flatten(); the span must have even length.
  static DistVector from_flat(std::span<const double> flat);

  std::size_t dims() const noexcept { return mu.size(); }
  std::vector<double> flatten() const;

  friend bool operator==(const DistVector&, const DistVector&) = default;
};

/// Maps an unconstrained network output to a strictly positive scale.
struct SigmaSquash {
  double floor = 1e-3;

  /// softplus(raw) + floor
  double operator()(double raw) const;

  friend bool operator==(const SigmaSquash&, const SigmaSquash&) = default;
};

double softplus(double x);

double squash_sigma(double raw, const SigmaSquash& squash);

/// Σ_i ½ln(2π) + ln σ_i + (x_i − μ_i)² / (2σ_i²). Throws DomainError on σ_i = 0.
double nll(const DistVector& belief, std::span<const double> x);

/// Per-dimension terms of nll().
double nll_term(double mu, double sigma, double x);

/// KL(p‖q) for independent normals. Throws DomainError on any zero scale.
double kl(const DistVector& p, const DistVector& q);

/// μ ± 1.9599640 σ per dimension.
std::pair<std::vector<double>, std::vector<double>> interval95(const DistVector& belief);

}  // namespace uprop::prob
