#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace uprop::nn {

/// Dense row-major matrix of doubles. Vectors are stored as n×1.
struct Tensor2 {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Tensor2() = default;
  Tensor2(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  static Tensor2 column(std::span<const double> values);

  std::size_t size() const noexcept { return data.size(); }
  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<double> span() noexcept { return data; }
  std::span<const double> span() const noexcept { return data; }

  void fill(double v);
  bool same_shape(const Tensor2& other) const noexcept {
    return rows == other.rows && cols == other.cols;
  }

  friend bool operator==(const Tensor2&, const Tensor2&) = default;
};

/// y = W x
void matvec(const Tensor2& w, std::span<const double> x, std::span<double> y);
/// x_grad += Wᵀ y_grad
void matvec_transpose_accumulate(const Tensor2& w, std::span<const double> y_grad,
                                 std::span<double> x_grad);
/// W_grad += y_grad ⊗ x
void outer_accumulate(std::span<const double> y_grad, std::span<const double> x,
                      Tensor2& w_grad);

double sigmoid(double x);

/// Throws ShapeError with a message naming `what` unless actual == expected.
void expect_size(std::size_t actual, std::size_t expected, const char* what);

}  // namespace uprop::nn
