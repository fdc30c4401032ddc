#pragma once

#include <array>
#include <cstddef>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "uprop/tape.hpp"
#include "uprop/tensor.hpp"

namespace uprop::nn {

using Rng = std::mt19937_64;

/// Reset-before-candidate GRU cell (two candidate biases):
///   r  = σ(W_r x + U_r h + b_r)
///   z  = σ(W_z x + U_z h + b_z)
///   n  = tanh(W_n x + b_in + r ⊙ (U_n h + b_hn))
///   h' = (1 − z) ⊙ n + z ⊙ h
struct GruCellParams {
  std::size_t input_size = 0;
  std::size_t hidden_size = 0;
  Tensor2 w_r, w_z, w_n;      // hidden × input
  Tensor2 u_r, u_z, u_n;      // hidden × hidden
  Tensor2 b_r, b_z, b_in, b_hn;  // hidden × 1

  static constexpr std::size_t kTensorCount = 10;
  static constexpr std::array<std::string_view, kTensorCount> kNames = {
      "w_r", "w_z", "w_n", "u_r", "u_z", "u_n", "b_r", "b_z", "b_in", "b_hn"};

  GruCellParams() = default;
  GruCellParams(std::size_t input, std::size_t hidden);

  std::array<Tensor2*, kTensorCount> tensors();
  std::array<const Tensor2*, kTensorCount> tensors() const;

  friend bool operator==(const GruCellParams&, const GruCellParams&) = default;
};

struct GruStackParams {
  std::vector<GruCellParams> layers;
  double dropout_rate = 0.0;

  GruStackParams() = default;
  GruStackParams(std::size_t input_size, std::size_t hidden_size, std::size_t num_layers,
                 double dropout_rate);

  std::size_t input_size() const;
  std::size_t hidden_size() const;

  friend bool operator==(const GruStackParams&, const GruStackParams&) = default;
};

/// y = W x + b
struct LinearParams {
  Tensor2 weight;  // out × in
  Tensor2 bias;    // out × 1

  LinearParams() = default;
  LinearParams(std::size_t in, std::size_t out) : weight(out, in), bias(out, 1) {}

  friend bool operator==(const LinearParams&, const LinearParams&) = default;
};

/// One hidden vector per stacked layer.
using HiddenState = std::vector<std::vector<double>>;

HiddenState zero_state(const GruStackParams& stack);

/// Uniform(−1/√hidden, 1/√hidden) weights, zero biases.
void init_uniform(GruStackParams& stack, Rng& rng);
void init_uniform(LinearParams& linear, std::size_t fan_hidden, Rng& rng);

std::vector<double> gru_cell_forward(const GruCellParams& params, std::span<const double> x,
                                     std::span<const double> h_prev);

std::vector<double> linear_forward(const LinearParams& params, std::span<const double> x);

/// Inverted dropout in place: each entry is zeroed with probability `rate`
/// and survivors are scaled by 1/(1−rate).
void apply_dropout(std::span<double> values, double rate, Rng& rng);
/// Draws an inverted-dropout mask of the given length.
std::vector<double> dropout_mask(std::size_t length, double rate, Rng& rng);

struct StackOutput {
  Tensor2 z_seq;       // T × hidden (top layer)
  HiddenState h_final;
};

/// Runs the stack over a T × input sequence. `h0` may be empty (zeros).
/// Dropout is applied to activations passed between layers only.
StackOutput gru_stack_forward(const GruStackParams& stack, const Tensor2& x_seq,
                              const HiddenState& h0, bool dropout_on, Rng& rng);

/// Advances `h` by one time step in place and returns the top-layer output.
std::span<const double> gru_stack_step(const GruStackParams& stack, std::span<const double> x,
                                       HiddenState& h, bool dropout_on, Rng* rng);

/// Tape-recording counterparts. `grad` (same shapes as the params) receives
/// parameter gradients on Tape::backward; pass null to treat params as constant.
Tape::Var record_gru_cell(Tape& tape, const GruCellParams& params, GruCellParams* grad,
                          Tape::Var x, Tape::Var h);
Tape::Var record_linear(Tape& tape, const LinearParams& params, LinearParams* grad,
                        Tape::Var x);

}  // namespace uprop::nn
