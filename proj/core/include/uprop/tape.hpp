#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "uprop/tensor.hpp"

namespace uprop::nn {

/// Reverse-mode gradient tape over dense vectors.
///
/// Every recorded node owns a contiguous slice of a flat value arena, so a
/// tape can be cleared and reused across training windows without
/// reallocating. Parameters enter either as matrices in `matvec` or as vector
/// leaves via `parameter`; in both cases their gradients are accumulated into
/// the caller-supplied gradient tensor during `backward`.
class Tape {
 public:
  struct Var {
    std::uint32_t id = 0;
  };

  /// A parameter tensor and the buffer its gradient accumulates into.
  /// `grad` may be null, in which case the parameter is treated as constant.
  struct ParamRef {
    const Tensor2* value = nullptr;
    Tensor2* grad = nullptr;
  };

  void clear();
  std::size_t node_count() const noexcept { return nodes_.size(); }

  Var constant(std::span<const double> values);
  Var parameter(ParamRef p);

  Var matvec(ParamRef w, Var x);
  Var add(Var a, Var b);
  Var mul(Var a, Var b);
  Var mul_scalar(Var a, double c);
  Var one_minus(Var a);
  Var sigmoid(Var a);
  Var tanh(Var a);
  /// softplus(a) + offset, elementwise.
  Var softplus(Var a, double offset);
  /// Elementwise multiplication by fixed factors (dropout masks).
  Var scale(Var a, std::span<const double> factors);
  Var concat(Var a, Var b);
  /// out_i = replace_i ? replacement_i : a_i. Replaced entries pass no gradient.
  Var blend(Var a, std::span<const double> replacement, std::span<const std::uint8_t> replace);
  Var slice(Var a, std::size_t offset, std::size_t length);
  Var sum(Var a);
  /// Scalar Σ_i [½ln2π + ln σ_i + (x_i−μ_i)²/(2σ_i²)].
  Var gaussian_nll(Var mu, Var sigma, std::span<const double> target);

  std::span<const double> value(Var v) const;
  std::span<const double> grad(Var v) const;
  std::size_t length(Var v) const { return nodes_[v.id].length; }

  /// Back-propagates from a scalar output; parameter gradients are added to
  /// their ParamRef::grad buffers.
  void backward(Var output);

 private:
  enum class Op : std::uint8_t {
    kConstant,
    kParameter,
    kMatvec,
    kAdd,
    kMul,
    kMulScalar,
    kOneMinus,
    kSigmoid,
    kTanh,
    kSoftplus,
    kScale,
    kConcat,
    kBlend,
    kSlice,
    kSum,
    kGaussianNll,
  };

  struct Node {
    Op op;
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    std::uint32_t offset = 0;
    std::uint32_t length = 0;
    std::uint32_t aux = 0;  // offset into aux_ or slice start
    double scalar = 0.0;
    ParamRef param;
  };

  Var push(Op op, std::size_t length);
  double* val(std::uint32_t id) { return values_.data() + nodes_[id].offset; }
  const double* val(std::uint32_t id) const { return values_.data() + nodes_[id].offset; }
  double* grd(std::uint32_t id) { return grads_.data() + nodes_[id].offset; }
  std::uint32_t push_aux(std::span<const double> values);
  void require_same(Var a, Var b, const char* what) const;

  std::vector<Node> nodes_;
  std::vector<double> values_;
  std::vector<double> grads_;
  std::vector<double> aux_;
};

}  // namespace uprop::nn
