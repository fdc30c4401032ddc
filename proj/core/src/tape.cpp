#include "uprop/tape.hpp"

#include <algorithm>
#include <cmath>

#include "uprop/errors.hpp"
#include "uprop/prob.hpp"

namespace uprop::nn {

namespace {
constexpr double kHalfLog2Pi = 0.91893853320467274178;
}  // namespace

void Tape::clear() {
  nodes_.clear();
  values_.clear();
  grads_.clear();
  aux_.clear();
}

Tape::Var Tape::push(Op op, std::size_t length) {
  Node n;
  n.op = op;
  n.offset = static_cast<std::uint32_t>(values_.size());
  n.length = static_cast<std::uint32_t>(length);
  values_.resize(values_.size() + length);
  nodes_.push_back(n);
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

std::uint32_t Tape::push_aux(std::span<const double> values) {
  const auto off = static_cast<std::uint32_t>(aux_.size());
  aux_.insert(aux_.end(), values.begin(), values.end());
  return off;
}

void Tape::require_same(Var a, Var b, const char* what) const {
  expect_size(nodes_[b.id].length, nodes_[a.id].length, what);
}

Tape::Var Tape::constant(std::span<const double> values) {
  Var v = push(Op::kConstant, values.size());
  std::copy(values.begin(), values.end(), val(v.id));
  return v;
}

Tape::Var Tape::parameter(ParamRef p) {
  Var v = push(Op::kParameter, p.value->size());
  nodes_[v.id].param = p;
  std::copy(p.value->data.begin(), p.value->data.end(), val(v.id));
  return v;
}

Tape::Var Tape::matvec(ParamRef w, Var x) {
  expect_size(length(x), w.value->cols, "tape matvec input");
  Var v = push(Op::kMatvec, w.value->rows);
  Node& n = nodes_[v.id];
  n.a = x.id;
  n.param = w;
  nn::matvec(*w.value, {val(x.id), length(x)}, {val(v.id), n.length});
  return v;
}

Tape::Var Tape::add(Var a, Var b) {
  require_same(a, b, "tape add");
  const std::size_t len = length(a);
  Var v = push(Op::kAdd, len);
  nodes_[v.id].a = a.id;
  nodes_[v.id].b = b.id;
  const double* pa = val(a.id);
  const double* pb = val(b.id);
  double* out = val(v.id);
  for (std::size_t i = 0; i < len; ++i) out[i] = pa[i] + pb[i];
  return v;
}

Tape::Var Tape::mul(Var a, Var b) {
  require_same(a, b, "tape mul");
  const std::size_t len = length(a);
  Var v = push(Op::kMul, len);
  nodes_[v.id].a = a.id;
  nodes_[v.id].b = b.id;
  const double* pa = val(a.id);
  const double* pb = val(b.id);
  double* out = val(v.id);
  for (std::size_t i = 0; i < len; ++i) out[i] = pa[i] * pb[i];
  return v;
}

Tape::Var Tape::mul_scalar(Var a, double c) {
  const std::size_t len = length(a);
  Var v = push(Op::kMulScalar, len);
  nodes_[v.id].a = a.id;
  nodes_[v.id].scalar = c;
  const double* pa = val(a.id);
  double* out = val(v.id);
  for (std::size_t i = 0; i < len; ++i) out[i] = pa[i] * c;
  return v;
}

Tape::Var Tape::one_minus(Var a) {
  const std::size_t len = length(a);
  Var v = push(Op::kOneMinus, len);
  nodes_[v.id].a = a.id;
  const double* pa = val(a.id);
  double* out = val(v.id);
  for (std::size_t i = 0; i < len; ++i) out[i] = 1.0 - pa[i];
  return v;
}

Tape::Var Tape::sigmoid(Var a) {
  const std::size_t len = length(a);
  Var v = push(Op::kSigmoid, len);
  nodes_[v.id].a = a.id;
  const double* pa = val(a.id);
  double* out = val(v.id);
  for (std::size_t i = 0; i < len; ++i) out[i] = nn::sigmoid(pa[i]);
  return v;
}

Tape::Var Tape::tanh(Var a) {
  const std::size_t len = length(a);
  Var v = push(Op::kTanh, len);
  nodes_[v.id].a = a.id;
  const double* pa = val(a.id);
  double* out = val(v.id);
  for (std::size_t i = 0; i < len; ++i) out[i] = std::tanh(pa[i]);
  return v;
}

Tape::Var Tape::softplus(Var a, double offset) {
  const std::size_t len = length(a);
  Var v = push(Op::kSoftplus, len);
  nodes_[v.id].a = a.id;
  const double* pa = val(a.id);
  double* out = val(v.id);
  for (std::size_t i = 0; i < len; ++i) out[i] = prob::softplus(pa[i]) + offset;
  return v;
}

Tape::Var Tape::scale(Var a, std::span<const double> factors) {
  expect_size(factors.size(), length(a), "tape scale factors");
  const std::size_t len = length(a);
  const std::uint32_t aux = push_aux(factors);
  Var v = push(Op::kScale, len);
  nodes_[v.id].a = a.id;
  nodes_[v.id].aux = aux;
  const double* pa = val(a.id);
  double* out = val(v.id);
  for (std::size_t i = 0; i < len; ++i) out[i] = pa[i] * aux_[aux + i];
  return v;
}

Tape::Var Tape::concat(Var a, Var b) {
  const std::size_t la = length(a);
  const std::size_t lb = length(b);
  Var v = push(Op::kConcat, la + lb);
  nodes_[v.id].a = a.id;
  nodes_[v.id].b = b.id;
  std::copy_n(val(a.id), la, val(v.id));
  std::copy_n(val(b.id), lb, val(v.id) + la);
  return v;
}

Tape::Var Tape::blend(Var a, std::span<const double> replacement,
                       std::span<const std::uint8_t> replace) {
  const std::size_t len = length(a);
  expect_size(replacement.size(), len, "tape blend replacement");
  expect_size(replace.size(), len, "tape blend mask");
  std::vector<double> keep(len);
  for (std::size_t i = 0; i < len; ++i) keep[i] = replace[i] ? 0.0 : 1.0;
  const std::uint32_t aux = push_aux(keep);
  Var v = push(Op::kBlend, len);
  nodes_[v.id].a = a.id;
  nodes_[v.id].aux = aux;
  const double* pa = val(a.id);
  double* out = val(v.id);
  for (std::size_t i = 0; i < len; ++i) out[i] = replace[i] ? replacement[i] : pa[i];
  return v;
}

Tape::Var Tape::slice(Var a, std::size_t offset, std::size_t length_) {
  if (offset + length_ > length(a)) throw ShapeError("tape slice out of bounds");
  Var v = push(Op::kSlice, length_);
  nodes_[v.id].a = a.id;
  nodes_[v.id].aux = static_cast<std::uint32_t>(offset);
  std::copy_n(val(a.id) + offset, length_, val(v.id));
  return v;
}

Tape::Var Tape::sum(Var a) {
  const std::size_t len = length(a);
  Var v = push(Op::kSum, 1);
  nodes_[v.id].a = a.id;
  const double* pa = val(a.id);
  double acc = 0.0;
  for (std::size_t i = 0; i < len; ++i) acc += pa[i];
  *val(v.id) = acc;
  return v;
}

Tape::Var Tape::gaussian_nll(Var mu, Var sigma, std::span<const double> target) {
  require_same(mu, sigma, "tape gaussian_nll");
  expect_size(target.size(), length(mu), "tape gaussian_nll target");
  const std::size_t len = length(mu);
  const std::uint32_t aux = push_aux(target);
  Var v = push(Op::kGaussianNll, 1);
  nodes_[v.id].a = mu.id;
  nodes_[v.id].b = sigma.id;
  nodes_[v.id].aux = aux;
  const double* m = val(mu.id);
  const double* s = val(sigma.id);
  double acc = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    if (!(s[i] > 0.0)) throw DomainError("gaussian_nll: scale must be positive");
    const double d = aux_[aux + i] - m[i];
    acc += kHalfLog2Pi + std::log(s[i]) + d * d / (2.0 * s[i] * s[i]);
  }
  *val(v.id) = acc;
  return v;
}

std::span<const double> Tape::value(Var v) const {
  return {val(v.id), nodes_[v.id].length};
}

std::span<const double> Tape::grad(Var v) const {
  if (grads_.size() != values_.size()) return {};
  return {grads_.data() + nodes_[v.id].offset, nodes_[v.id].length};
}

void Tape::backward(Var output) {
  expect_size(length(output), 1, "tape backward output");
  grads_.assign(values_.size(), 0.0);
  grd(output.id)[0] = 1.0;

  for (std::size_t idx = output.id + 1; idx-- > 0;) {
    const Node& n = nodes_[idx];
    const auto id = static_cast<std::uint32_t>(idx);
    const double* g = grd(id);
    const std::size_t len = n.length;
    switch (n.op) {
      case Op::kConstant:
        break;
      case Op::kParameter:
        if (n.param.grad != nullptr) {
          double* pg = n.param.grad->data.data();
          for (std::size_t i = 0; i < len; ++i) pg[i] += g[i];
        }
        break;
      case Op::kMatvec: {
        const std::span<const double> gy{g, len};
        const std::span<const double> x{val(n.a), nodes_[n.a].length};
        matvec_transpose_accumulate(*n.param.value, gy, {grd(n.a), nodes_[n.a].length});
        if (n.param.grad != nullptr) outer_accumulate(gy, x, *n.param.grad);
        break;
      }
      case Op::kAdd: {
        double* ga = grd(n.a);
        double* gb = grd(n.b);
        for (std::size_t i = 0; i < len; ++i) {
          ga[i] += g[i];
          gb[i] += g[i];
        }
        break;
      }
      case Op::kMul: {
        double* ga = grd(n.a);
        double* gb = grd(n.b);
        const double* va = val(n.a);
        const double* vb = val(n.b);
        for (std::size_t i = 0; i < len; ++i) {
          ga[i] += g[i] * vb[i];
          gb[i] += g[i] * va[i];
        }
        break;
      }
      case Op::kMulScalar: {
        double* ga = grd(n.a);
        for (std::size_t i = 0; i < len; ++i) ga[i] += g[i] * n.scalar;
        break;
      }
      case Op::kOneMinus: {
        double* ga = grd(n.a);
        for (std::size_t i = 0; i < len; ++i) ga[i] -= g[i];
        break;
      }
      case Op::kSigmoid: {
        double* ga = grd(n.a);
        const double* y = val(id);
        for (std::size_t i = 0; i < len; ++i) ga[i] += g[i] * y[i] * (1.0 - y[i]);
        break;
      }
      case Op::kTanh: {
        double* ga = grd(n.a);
        const double* y = val(id);
        for (std::size_t i = 0; i < len; ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
        break;
      }
      case Op::kSoftplus: {
        double* ga = grd(n.a);
        const double* x = val(n.a);
        for (std::size_t i = 0; i < len; ++i) ga[i] += g[i] * nn::sigmoid(x[i]);
        break;
      }
      case Op::kScale: {
        double* ga = grd(n.a);
        for (std::size_t i = 0; i < len; ++i) ga[i] += g[i] * aux_[n.aux + i];
        break;
      }
      case Op::kConcat: {
        const std::size_t la = nodes_[n.a].length;
        double* ga = grd(n.a);
        double* gb = grd(n.b);
        for (std::size_t i = 0; i < la; ++i) ga[i] += g[i];
        for (std::size_t i = la; i < len; ++i) gb[i - la] += g[i];
        break;
      }
      case Op::kBlend: {
        double* ga = grd(n.a);
        for (std::size_t i = 0; i < len; ++i) ga[i] += g[i] * aux_[n.aux + i];
        break;
      }
      case Op::kSlice: {
        double* ga = grd(n.a) + n.aux;
        for (std::size_t i = 0; i < len; ++i) ga[i] += g[i];
        break;
      }
      case Op::kSum: {
        double* ga = grd(n.a);
        const std::size_t la = nodes_[n.a].length;
        for (std::size_t i = 0; i < la; ++i) ga[i] += g[0];
        break;
      }
      case Op::kGaussianNll: {
        double* gm = grd(n.a);
        double* gs = grd(n.b);
        const double* m = val(n.a);
        const double* s = val(n.b);
        const std::size_t la = nodes_[n.a].length;
        for (std::size_t i = 0; i < la; ++i) {
          const double d = aux_[n.aux + i] - m[i];
          const double inv_var = 1.0 / (s[i] * s[i]);
          gm[i] += g[0] * (-d * inv_var);
          gs[i] += g[0] * (1.0 / s[i] - d * d * inv_var / s[i]);
        }
        break;
      }
    }
  }
}

}  // namespace uprop::nn
