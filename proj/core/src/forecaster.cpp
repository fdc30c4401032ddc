#include "uprop/forecaster.hpp"

#include <cmath>

#include "uprop/errors.hpp"
#include "uprop/rng.hpp"

namespace uprop::forecaster {

void ModelSpec::validate() const {
  if (dims == 0) throw ConfigError("dims must be at least 1");
  if (layers == 0) throw ConfigError("layers must be at least 1");
  if (hidden == 0) throw ConfigError("hidden must be at least 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must be in [0, 1)");
  if (!(sigma_floor > 0.0)) throw ConfigError("sigma_floor must be positive");
}

void TrainConfig::validate() const {
  if (window_length < 2) throw ConfigError("window must be at least 2");
  if (lookahead < 1 || lookahead >= window_length) {
    throw ConfigError("lookahead must satisfy 1 <= k < window (k=" + std::to_string(lookahead) +
                      ", window=" + std::to_string(window_length) + ")");
  }
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (!(rollout_reveal >= 0.0 && rollout_reveal <= 1.0)) {
    throw ConfigError("rollout_reveal must be in [0, 1]");
  }
  if (!(context_hide >= 0.0 && context_hide < 1.0)) {
    throw ConfigError("context_hide must be in [0, 1)");
  }
}

std::size_t TrainConfig::min_context() const { return (window_length + 3) / 4; }

std::vector<std::pair<std::string, nn::Tensor2*>> Network::named_tensors() {
  std::vector<std::pair<std::string, nn::Tensor2*>> out;
  for (std::size_t l = 0; l < stack.layers.size(); ++l) {
    const auto tensors = stack.layers[l].tensors();
    for (std::size_t i = 0; i < tensors.size(); ++i) {
      out.emplace_back("gru." + std::to_string(l) + "." + std::string(nn::GruCellParams::kNames[i]),
                       tensors[i]);
    }
  }
  out.emplace_back("readout.weight", &readout.weight);
  out.emplace_back("readout.bias", &readout.bias);
  return out;
}

std::vector<std::pair<std::string, const nn::Tensor2*>> Network::named_tensors() const {
  std::vector<std::pair<std::string, const nn::Tensor2*>> out;
  for (auto& [name, t] : const_cast<Network*>(this)->named_tensors()) out.emplace_back(name, t);
  return out;
}

std::vector<nn::Tensor2*> Network::tensors() {
  std::vector<nn::Tensor2*> out;
  for (auto& layer : stack.layers) {
    for (auto* t : layer.tensors()) out.push_back(t);
  }
  out.push_back(&readout.weight);
  out.push_back(&readout.bias);
  return out;
}

std::vector<const nn::Tensor2*> Network::tensors() const {
  std::vector<const nn::Tensor2*> out;
  for (auto* t : const_cast<Network*>(this)->tensors()) out.push_back(t);
  return out;
}

Network Network::zeros_like() const {
  Network z = *this;
  z.set_zero();
  return z;
}

void Network::set_zero() {
  for (auto* t : tensors()) t->fill(0.0);
}

UPropModel UPropModel::create(const ModelSpec& spec, const TrainConfig& train,
                              data::NormStats norm, std::uint64_t init_seed) {
  spec.validate();
  train.validate();
  if (norm.dims() != spec.dims) throw ShapeError("normalization stats dims != model dims");
  UPropModel m;
  m.dims = spec.dims;
  m.net.stack = nn::GruStackParams(2 * spec.dims, spec.hidden, spec.layers, spec.dropout);
  m.net.readout = nn::LinearParams(spec.hidden, 2 * spec.dims);
  m.squash.floor = spec.sigma_floor;
  m.norm = std::move(norm);
  m.train_config = train;
  Rng rng(init_seed);
  nn::init_uniform(m.net.stack, rng);
  nn::init_uniform(m.net.readout, spec.hidden, rng);
  return m;
}

ModelSpec UPropModel::spec() const {
  return ModelSpec{dims, net.stack.layers.size(), net.stack.hidden_size(), net.stack.dropout_rate,
                   squash.floor};
}

void UPropModel::validate() const {
  spec().validate();
  if (net.stack.input_size() != 2 * dims) throw ShapeError("GRU stack input width must be 2N");
  if (net.readout.weight.rows != 2 * dims || net.readout.bias.rows != 2 * dims) {
    throw ShapeError("readout output width must be 2N");
  }
  if (net.readout.weight.cols != net.stack.hidden_size()) {
    throw ShapeError("readout input width must equal hidden size");
  }
  for (std::size_t l = 1; l < net.stack.layers.size(); ++l) {
    if (net.stack.layers[l].input_size != net.stack.layers[l - 1].hidden_size) {
      throw ShapeError("GRU layer input width must equal previous hidden size");
    }
  }
  if (norm.dims() != dims || norm.std.size() != dims) {
    throw ShapeError("normalization stats must have exactly N pairs");
  }
}

Forecast Forecast::denormalized(const data::NormStats& norm) const {
  Forecast out = *this;
  for (auto& s : out.steps) {
    nn::expect_size(s.dims(), norm.dims(), "forecast denormalization");
    for (std::size_t d = 0; d < s.dims(); ++d) {
      s.mu[d] = s.mu[d] * norm.std[d] + norm.mean[d];
      s.sigma[d] = s.sigma[d] * norm.std[d];
    }
  }
  return out;
}

prob::DistVector default_prior(std::size_t dims) { return prob::DistVector::standard(dims); }

prob::DistVector encode_input(std::span<const std::optional<double>> obs,
                              const prob::DistVector* pending, const prob::DistVector& prior) {
  const std::size_t n = obs.size();
  nn::expect_size(prior.dims(), n, "encode_input prior");
  if (pending != nullptr) nn::expect_size(pending->dims(), n, "encode_input pending forecast");
  prob::DistVector in(n);
  for (std::size_t d = 0; d < n; ++d) {
    if (obs[d].has_value()) {
      in.mu[d] = *obs[d];
      in.sigma[d] = 0.0;
    } else if (pending != nullptr) {
      in.mu[d] = pending->mu[d];
      in.sigma[d] = pending->sigma[d];
    } else {
      in.mu[d] = prior.mu[d];
      in.sigma[d] = prior.sigma[d];
    }
  }
  return in;
}

prob::DistVector step(const UPropModel& model, const prob::DistVector& input, nn::HiddenState& h) {
  nn::expect_size(input.dims(), model.dims, "step input");
  const auto flat = input.flatten();
  const auto top = nn::gru_stack_step(model.net.stack, flat, h, false, nullptr);
  const auto raw = nn::linear_forward(model.net.readout, top);
  prob::DistVector out(model.dims);
  for (std::size_t d = 0; d < model.dims; ++d) {
    out.mu[d] = raw[d];
    out.sigma[d] = model.squash(raw[model.dims + d]);
  }
  return out;
}

Forecast rollout_from(const UPropModel& model, nn::HiddenState h, prob::DistVector first,
                      std::size_t origin_t, std::size_t k) {
  if (k == 0) throw RangeError("rollout horizon must be at least 1");
  Forecast f;
  f.origin_t = origin_t;
  f.steps.reserve(k);
  f.steps.push_back(std::move(first));
  while (f.steps.size() < k) f.steps.push_back(step(model, f.steps.back(), h));
  return f;
}

Forecast rollout(const UPropModel& model, std::span<const prob::DistVector> context, std::size_t k) {
  if (context.empty()) throw RangeError("rollout needs a non-empty context");
  auto h = nn::zero_state(model.net.stack);
  prob::DistVector pred;
  for (const auto& in : context) pred = step(model, in, h);
  return rollout_from(model, std::move(h), std::move(pred), context.size() - 1, k);
}

std::vector<FilterStep> filter_series(const UPropModel& model, const data::TimeSeries& series) {
  nn::expect_size(series.dims, model.dims, "filter_series dims");
  const auto prior = default_prior(model.dims);
  auto h = nn::zero_state(model.net.stack);
  std::vector<FilterStep> out;
  out.reserve(series.steps);
  for (std::size_t t = 0; t < series.steps; ++t) {
    const auto obs = series.observation(t);
    const prob::DistVector* pending = out.empty() ? nullptr : &out.back().forecast;
    auto input = encode_input(obs, pending, prior);
    auto pred = step(model, input, h);
    out.push_back({std::move(input), std::move(pred)});
  }
  return out;
}

}  // namespace uprop::forecaster
