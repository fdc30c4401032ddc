#include "uprop/gru.hpp"

#include <cmath>

#include "uprop/errors.hpp"

namespace uprop::nn {

GruCellParams::GruCellParams(std::size_t input, std::size_t hidden)
    : input_size(input),
      hidden_size(hidden),
      w_r(hidden, input),
      w_z(hidden, input),
      w_n(hidden, input),
      u_r(hidden, hidden),
      u_z(hidden, hidden),
      u_n(hidden, hidden),
      b_r(hidden, 1),
      b_z(hidden, 1),
      b_in(hidden, 1),
      b_hn(hidden, 1) {}

std::array<Tensor2*, GruCellParams::kTensorCount> GruCellParams::tensors() {
  return {&w_r, &w_z, &w_n, &u_r, &u_z, &u_n, &b_r, &b_z, &b_in, &b_hn};
}

std::array<const Tensor2*, GruCellParams::kTensorCount> GruCellParams::tensors() const {
  return {&w_r, &w_z, &w_n, &u_r, &u_z, &u_n, &b_r, &b_z, &b_in, &b_hn};
}

GruStackParams::GruStackParams(std::size_t input_size, std::size_t hidden_size,
                               std::size_t num_layers, double dropout)
    : dropout_rate(dropout) {
  if (num_layers == 0) throw ShapeError("GRU stack needs at least one layer");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ShapeError("dropout rate must be in [0, 1)");
  layers.reserve(num_layers);
  for (std::size_t i = 0; i < num_layers; ++i) {
    layers.emplace_back(i == 0 ? input_size : hidden_size, hidden_size);
  }
}

std::size_t GruStackParams::input_size() const {
  return layers.empty() ? 0 : layers.front().input_size;
}

std::size_t GruStackParams::hidden_size() const {
  return layers.empty() ? 0 : layers.back().hidden_size;
}

HiddenState zero_state(const GruStackParams& stack) {
  HiddenState h;
  h.reserve(stack.layers.size());
  for (const auto& layer : stack.layers) h.emplace_back(layer.hidden_size, 0.0);
  return h;
}

namespace {

void fill_uniform(Tensor2& t, double bound, Rng& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (double& v : t.data) v = dist(rng);
}

}  // namespace

void init_uniform(GruStackParams& stack, Rng& rng) {
  for (auto& layer : stack.layers) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.hidden_size));
    for (Tensor2* t : {&layer.w_r, &layer.w_z, &layer.w_n, &layer.u_r, &layer.u_z, &layer.u_n}) {
      fill_uniform(*t, bound, rng);
    }
    for (Tensor2* t : {&layer.b_r, &layer.b_z, &layer.b_in, &layer.b_hn}) t->fill(0.0);
  }
}

void init_uniform(LinearParams& linear, std::size_t fan_hidden, Rng& rng) {
  fill_uniform(linear.weight, 1.0 / std::sqrt(static_cast<double>(fan_hidden)), rng);
  linear.bias.fill(0.0);
}

std::vector<double> gru_cell_forward(const GruCellParams& p, std::span<const double> x,
                                     std::span<const double> h_prev) {
  expect_size(x.size(), p.input_size, "gru_cell_forward input");
  expect_size(h_prev.size(), p.hidden_size, "gru_cell_forward hidden state");
  const std::size_t n = p.hidden_size;
  std::vector<double> wx(n), uh(n), r(n), z(n), h_next(n);

  matvec(p.w_r, x, wx);
  matvec(p.u_r, h_prev, uh);
  for (std::size_t i = 0; i < n; ++i) r[i] = sigmoid((wx[i] + uh[i]) + p.b_r.data[i]);

  matvec(p.w_z, x, wx);
  matvec(p.u_z, h_prev, uh);
  for (std::size_t i = 0; i < n; ++i) z[i] = sigmoid((wx[i] + uh[i]) + p.b_z.data[i]);

  matvec(p.w_n, x, wx);
  matvec(p.u_n, h_prev, uh);
  for (std::size_t i = 0; i < n; ++i) {
    const double cand = std::tanh((wx[i] + p.b_in.data[i]) + r[i] * (uh[i] + p.b_hn.data[i]));
    h_next[i] = (1.0 - z[i]) * cand + z[i] * h_prev[i];
  }
  return h_next;
}

std::vector<double> linear_forward(const LinearParams& p, std::span<const double> x) {
  std::vector<double> y(p.weight.rows);
  matvec(p.weight, x, y);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += p.bias.data[i];
  return y;
}

std::vector<double> dropout_mask(std::size_t length, double rate, Rng& rng) {
  std::vector<double> mask(length, 1.0);
  if (rate <= 0.0) return mask;
  std::bernoulli_distribution keep(1.0 - rate);
  const double scale = 1.0 / (1.0 - rate);
  for (double& m : mask) m = keep(rng) ? scale : 0.0;
  return mask;
}

void apply_dropout(std::span<double> values, double rate, Rng& rng) {
  if (rate <= 0.0) return;
  const auto mask = dropout_mask(values.size(), rate, rng);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] *= mask[i];
}

std::span<const double> gru_stack_step(const GruStackParams& stack, std::span<const double> x,
                                       HiddenState& h, bool dropout_on, Rng* rng) {
  expect_size(h.size(), stack.layers.size(), "gru stack hidden state layers");
  std::vector<double> carry;
  std::span<const double> in = x;
  for (std::size_t l = 0; l < stack.layers.size(); ++l) {
    if (l > 0 && dropout_on && stack.dropout_rate > 0.0) {
      carry.assign(in.begin(), in.end());
      apply_dropout(carry, stack.dropout_rate, *rng);
      in = carry;
    }
    h[l] = gru_cell_forward(stack.layers[l], in, h[l]);
    in = h[l];
  }
  return h.back();
}

StackOutput gru_stack_forward(const GruStackParams& stack, const Tensor2& x_seq,
                              const HiddenState& h0, bool dropout_on, Rng& rng) {
  expect_size(x_seq.cols, stack.input_size(), "gru_stack_forward input width");
  StackOutput out;
  out.h_final = h0.empty() ? zero_state(stack) : h0;
  out.z_seq = Tensor2(x_seq.rows, stack.hidden_size());
  for (std::size_t t = 0; t < x_seq.rows; ++t) {
    const std::span<const double> x{x_seq.data.data() + t * x_seq.cols, x_seq.cols};
    const auto top = gru_stack_step(stack, x, out.h_final, dropout_on, &rng);
    std::copy(top.begin(), top.end(), out.z_seq.data.begin() + t * out.z_seq.cols);
  }
  return out;
}

Tape::Var record_gru_cell(Tape& tape, const GruCellParams& p, GruCellParams* grad,
                          Tape::Var x, Tape::Var h) {
  auto ref = [grad](const Tensor2& value, Tensor2 GruCellParams::*member) {
    return Tape::ParamRef{&value, grad != nullptr ? &(grad->*member) : nullptr};
  };
  using P = GruCellParams;

  const auto r = tape.sigmoid(tape.add(
      tape.add(tape.matvec(ref(p.w_r, &P::w_r), x), tape.matvec(ref(p.u_r, &P::u_r), h)),
      tape.parameter(ref(p.b_r, &P::b_r))));
  const auto z = tape.sigmoid(tape.add(
      tape.add(tape.matvec(ref(p.w_z, &P::w_z), x), tape.matvec(ref(p.u_z, &P::u_z), h)),
      tape.parameter(ref(p.b_z, &P::b_z))));
  const auto hidden_part =
      tape.add(tape.matvec(ref(p.u_n, &P::u_n), h), tape.parameter(ref(p.b_hn, &P::b_hn)));
  const auto input_part =
      tape.add(tape.matvec(ref(p.w_n, &P::w_n), x), tape.parameter(ref(p.b_in, &P::b_in)));
  const auto cand = tape.tanh(tape.add(input_part, tape.mul(r, hidden_part)));
  return tape.add(tape.mul(tape.one_minus(z), cand), tape.mul(z, h));
}

Tape::Var record_linear(Tape& tape, const LinearParams& p, LinearParams* grad, Tape::Var x) {
  const Tape::ParamRef w{&p.weight, grad != nullptr ? &grad->weight : nullptr};
  const Tape::ParamRef b{&p.bias, grad != nullptr ? &grad->bias : nullptr};
  return tape.add(tape.matvec(w, x), tape.parameter(b));
}

}  // namespace uprop::nn
