#include "uprop/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "uprop/errors.hpp"

namespace uprop::nn {

Tensor2 Tensor2::column(std::span<const double> values) {
  Tensor2 t(values.size(), 1);
  std::copy(values.begin(), values.end(), t.data.begin());
  return t;
}

void Tensor2::fill(double v) { std::fill(data.begin(), data.end(), v); }

void matvec(const Tensor2& w, std::span<const double> x, std::span<double> y) {
  expect_size(x.size(), w.cols, "matvec input");
  expect_size(y.size(), w.rows, "matvec output");
  const double* row = w.data.data();
  for (std::size_t r = 0; r < w.rows; ++r, row += w.cols) {
    double acc = 0.0;
    for (std::size_t c = 0; c < w.cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

void matvec_transpose_accumulate(const Tensor2& w, std::span<const double> y_grad,
                                 std::span<double> x_grad) {
  const double* row = w.data.data();
  for (std::size_t r = 0; r < w.rows; ++r, row += w.cols) {
    const double g = y_grad[r];
    if (g == 0.0) continue;
    for (std::size_t c = 0; c < w.cols; ++c) x_grad[c] += row[c] * g;
  }
}

void outer_accumulate(std::span<const double> y_grad, std::span<const double> x,
                      Tensor2& w_grad) {
  double* row = w_grad.data.data();
  for (std::size_t r = 0; r < w_grad.rows; ++r, row += w_grad.cols) {
    const double g = y_grad[r];
    if (g == 0.0) continue;
    for (std::size_t c = 0; c < w_grad.cols; ++c) row[c] += g * x[c];
  }
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void expect_size(std::size_t actual, std::size_t expected, const char* what) {
  if (actual != expected) {
    throw ShapeError(std::string(what) + ": expected size " + std::to_string(expected) +
                     ", got " + std::to_string(actual));
  }
}

}  // namespace uprop::nn
