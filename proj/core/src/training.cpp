#include "uprop/training.hpp"

#include <algorithm>
#include <numeric>

#include "uprop/adam.hpp"
#include "uprop/errors.hpp"
#include "uprop/rng.hpp"

namespace uprop::forecaster {

namespace {

enum SeedStream : std::uint64_t { kInit = 1, kOrder = 2, kAnchor = 3, kDropout = 4 };

}  // namespace

double window_loss(const UPropModel& model, const data::TimeSeries& window,
                   const RolloutSample& sample, Network* grad, nn::Tape* tape_in) {
  const std::size_t n = model.dims;
  const std::size_t context = sample.context;
  const std::size_t lookahead = sample.lookahead;
  nn::expect_size(window.dims, n, "window_loss dims");
  if (context < 1 || lookahead < 1 || context + lookahead > window.steps) {
    throw RangeError("window_loss: context + lookahead exceeds window");
  }
  if (!sample.reveal.empty()) {
    nn::expect_size(sample.reveal.size(), (lookahead - 1) * n, "window_loss reveal mask");
  }
  if (!sample.hide.empty()) {
    nn::expect_size(sample.hide.size(), context * n, "window_loss hide mask");
  }

  nn::Tape local;
  nn::Tape& tape = tape_in != nullptr ? *tape_in : local;
  tape.clear();

  const auto& stack = model.net.stack;
  const std::size_t layers = stack.layers.size();
  const double rate = stack.dropout_rate;
  Rng rng(sample.dropout_seed);

  std::vector<nn::Tape::Var> h(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    h[l] = tape.constant(std::vector<double>(stack.layers[l].hidden_size, 0.0));
  }

  auto advance = [&](nn::Tape::Var input, bool dropout_on) {
    nn::Tape::Var in = input;
    for (std::size_t l = 0; l < layers; ++l) {
      if (l > 0 && dropout_on && rate > 0.0) {
        in = tape.scale(in, nn::dropout_mask(tape.length(in), rate, rng));
      }
      h[l] = nn::record_gru_cell(tape, stack.layers[l], grad ? &grad->stack.layers[l] : nullptr,
                                 in, h[l]);
      in = h[l];
    }
    return in;
  };
  auto readout = [&](nn::Tape::Var top) {
    return nn::record_linear(tape, model.net.readout, grad ? &grad->readout : nullptr, top);
  };

  std::vector<double> flat(2 * n, 0.0);
  std::vector<std::uint8_t> replace(2 * n, 0);
  auto belief = [&](nn::Tape::Var raw_out) {
    return tape.concat(tape.slice(raw_out, 0, n),
                       tape.softplus(tape.slice(raw_out, n, n), model.squash.floor));
  };
  nn::Tape::Var top{};
  for (std::size_t t = 0; t < context; ++t) {
    const auto row = window.row(t);
    std::copy(row.begin(), row.end(), flat.begin());
    std::fill(flat.begin() + n, flat.end(), 0.0);
    bool any_hidden = false;
    for (std::size_t d = 0; d < n && !sample.hide.empty(); ++d) {
      const bool hidden = sample.hide[t * n + d] != 0;
      replace[d] = replace[n + d] = hidden ? 0 : 1;
      any_hidden = any_hidden || hidden;
    }
    if (!any_hidden) {
      top = advance(tape.constant(flat), true);
    } else if (t == 0) {
      for (std::size_t d = 0; d < n; ++d) {
        if (replace[d] == 0) {
          flat[d] = 0.0;
          flat[n + d] = 1.0;
        }
      }
      top = advance(tape.constant(flat), true);
    } else {
      top = advance(tape.blend(belief(readout(top)), flat, replace), true);
    }
  }
  nn::Tape::Var raw = readout(top);

  nn::Tape::Var total{};
  for (std::size_t j = 0; j < lookahead; ++j) {
    const auto mu = tape.slice(raw, 0, n);
    const auto sigma = tape.softplus(tape.slice(raw, n, n), model.squash.floor);
    const auto term = tape.gaussian_nll(mu, sigma, window.row(context + j));
    total = j == 0 ? term : tape.add(total, term);
    if (j + 1 == lookahead) break;
    auto input = tape.concat(mu, sigma);
    if (!sample.reveal.empty()) {
      const auto row = window.row(context + j);
      std::copy(row.begin(), row.end(), flat.begin());
      for (std::size_t d = 0; d < n; ++d) {
        replace[d] = replace[n + d] = sample.reveal[j * n + d];
      }
      input = tape.blend(input, flat, replace);
    }
    raw = readout(advance(input, false));
  }
  const auto loss = tape.mul_scalar(total, 1.0 / static_cast<double>(lookahead * n));
  if (grad != nullptr) tape.backward(loss);
  return tape.value(loss)[0];
}

RolloutSample draw_sample(const TrainConfig& config, std::size_t dims, Rng& rng,
                          std::uint64_t dropout_seed) {
  const std::size_t L = config.window_length;
  const std::size_t k = config.lookahead;
  const std::size_t hi = L - k;
  const std::size_t lo = std::max<std::size_t>(1, std::min(config.min_context(), hi));
  RolloutSample s;
  s.context = std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  s.lookahead = k;
  s.dropout_seed = dropout_seed;
  if (config.rollout_reveal > 0.0 && k > 1) {
    const double p = std::uniform_real_distribution<double>(0.0, config.rollout_reveal)(rng);
    std::bernoulli_distribution reveal(p);
    s.reveal.resize((k - 1) * dims);
    for (auto& r : s.reveal) r = reveal(rng) ? 1 : 0;
  }
  if (config.context_hide > 0.0) {
    const double p = std::uniform_real_distribution<double>(0.0, config.context_hide)(rng);
    std::bernoulli_distribution hide(p);
    s.hide.resize(s.context * dims);
    for (auto& h : s.hide) h = hide(rng) ? 1 : 0;
  }
  return s;
}

TrainResult train(std::span<const data::TimeSeries> windows, const ModelSpec& spec,
                  const TrainConfig& config, const EpochCallback& on_epoch) {
  spec.validate();
  config.validate();
  if (windows.empty()) throw DataError("no training windows");
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const auto& w = windows[i];
    if (w.dims != spec.dims) {
      throw DataError("training window " + std::to_string(i) + " has " + std::to_string(w.dims) +
                      " dims, model expects " + std::to_string(spec.dims));
    }
    if (w.steps != config.window_length) {
      throw DataError("training window " + std::to_string(i) + " has length " +
                      std::to_string(w.steps) + ", expected " +
                      std::to_string(config.window_length));
    }
    if (!w.fully_observed()) {
      throw DataError("training data contains missing values (window " + std::to_string(i) + ")");
    }
  }

  auto norm = data::compute_norm_stats(windows);
  std::vector<data::TimeSeries> normalized;
  normalized.reserve(windows.size());
  for (const auto& w : windows) normalized.push_back(data::normalize(w, norm));

  TrainResult result;
  result.model = UPropModel::create(spec, config, std::move(norm),
                                    derive_seed({config.seed, kInit}));
  UPropModel& model = result.model;

  auto params = model.net.tensors();
  Network grad = model.net.zeros_like();
  const auto grad_tensors = std::as_const(grad).tensors();
  const std::vector<const nn::Tensor2*> const_params(params.begin(), params.end());
  nn::AdamState adam(nn::AdamConfig{.learning_rate = config.learning_rate}, const_params);

  Rng order_rng(derive_seed({config.seed, kOrder}));
  Rng anchor_rng(derive_seed({config.seed, kAnchor}));
  std::vector<std::size_t> order(normalized.size());
  std::iota(order.begin(), order.end(), 0);
  nn::Tape tape;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), order_rng);
    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      grad.set_zero();
      for (std::size_t b = begin; b < end; ++b) {
        const std::size_t idx = order[b];
        const auto sample = draw_sample(config, spec.dims, anchor_rng,
                                        derive_seed({config.seed, kDropout, epoch, idx}));
        epoch_loss += window_loss(model, normalized[idx], sample, &grad, &tape);
      }
      const double inv = 1.0 / static_cast<double>(end - begin);
      for (auto* t : grad.tensors()) {
        for (double& g : t->data) g *= inv;
      }
      nn::adam_step(adam, params, grad_tensors);
    }
    const double mean = epoch_loss / static_cast<double>(order.size());
    result.loss_history.push_back(mean);
    if (on_epoch) on_epoch(epoch, mean);
  }
  return result;
}

}  // namespace uprop::forecaster
