#include "uprop/prob.hpp"

#include <cmath>

#include "uprop/errors.hpp"
#include "uprop/tensor.hpp"

namespace uprop::prob {

namespace {
constexpr double kHalfLog2Pi = 0.91893853320467274178;
}  // namespace

DistVector::DistVector(std::vector<double> m, std::vector<double> s)
    : mu(std::move(m)), sigma(std::move(s)) {
  nn::expect_size(sigma.size(), mu.size(), "DistVector scales");
  for (double v : sigma) {
    if (!(v >= 0.0)) throw DomainError("DistVector scale must be nonnegative");
  }
}

DistVector DistVector::observed(std::span<const double> values) {
  return DistVector(std::vector<double>(values.begin(), values.end()),
                    std::vector<double>(values.size(), 0.0));
}

DistVector DistVector::standard(std::size_t dims) {
  return DistVector(std::vector<double>(dims, 0.0), std::vector<double>(dims, 1.0));
}

DistVector DistVector::from_flat(std::span<const double> flat) {
  if (flat.size() % 2 != 0) throw ShapeError("flattened DistVector must have even length");
  const std::size_t n = flat.size() / 2;
  return DistVector(std::vector<double>(flat.begin(), flat.begin() + n),
                    std::vector<double>(flat.begin() + n, flat.end()));
}

std::vector<double> DistVector::flatten() const {
  std::vector<double> out;
  out.reserve(2 * mu.size());
  out.insert(out.end(), mu.begin(), mu.end());
  out.insert(out.end(), sigma.begin(), sigma.end());
  return out;
}

double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double SigmaSquash::operator()(double raw) const { return softplus(raw) + floor; }

double squash_sigma(double raw, const SigmaSquash& squash) { return squash(raw); }

double nll_term(double mu, double sigma, double x) {
  if (!(sigma > 0.0)) throw DomainError("nll: scale must be positive (scoring against an observation?)");
  const double d = x - mu;
  return kHalfLog2Pi + std::log(sigma) + d * d / (2.0 * sigma * sigma);
}

double nll(const DistVector& belief, std::span<const double> x) {
  nn::expect_size(x.size(), belief.dims(), "nll observation");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += nll_term(belief.mu[i], belief.sigma[i], x[i]);
  return acc;
}

double kl(const DistVector& p, const DistVector& q) {
  nn::expect_size(q.dims(), p.dims(), "kl operand");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.dims(); ++i) {
    const double sp = p.sigma[i];
    const double sq = q.sigma[i];
    if (!(sp > 0.0) || !(sq > 0.0)) throw DomainError("kl: scales must be positive");
    const double d = p.mu[i] - q.mu[i];
    acc += std::log(sq / sp) + (sp * sp + d * d) / (2.0 * sq * sq) - 0.5;
  }
  return acc;
}

std::pair<std::vector<double>, std::vector<double>> interval95(const DistVector& belief) {
  std::vector<double> lo(belief.dims()), hi(belief.dims());
  for (std::size_t i = 0; i < belief.dims(); ++i) {
    lo[i] = belief.mu[i] - kZ95 * belief.sigma[i];
    hi[i] = belief.mu[i] + kZ95 * belief.sigma[i];
  }
  return {std::move(lo), std::move(hi)};
}

}  // namespace uprop::prob
