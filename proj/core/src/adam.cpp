#include "uprop/adam.hpp"

#include <cmath>

#include "uprop/errors.hpp"

namespace uprop::nn {

AdamState::AdamState(AdamConfig cfg, std::span<const Tensor2* const> params) : config(cfg) {
  first_moment.reserve(params.size());
  second_moment.reserve(params.size());
  for (const Tensor2* p : params) {
    first_moment.emplace_back(p->rows, p->cols);
    second_moment.emplace_back(p->rows, p->cols);
  }
}

void adam_step(AdamState& state, std::span<Tensor2* const> params,
               std::span<const Tensor2* const> grads) {
  expect_size(grads.size(), params.size(), "adam_step gradient count");
  expect_size(state.first_moment.size(), params.size(), "adam_step accumulator count");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i]->same_shape(*grads[i]) || !params[i]->same_shape(state.first_moment[i])) {
      throw ShapeError("adam_step: parameter/gradient/accumulator shape mismatch at index " +
                       std::to_string(i));
    }
  }

  ++state.step_count;
  const auto& c = state.config;
  const double t = static_cast<double>(state.step_count);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);

  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i]->data;
    const auto& g = grads[i]->data;
    auto& m = state.first_moment[i].data;
    auto& v = state.second_moment[i].data;
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = c.beta1 * m[j] + (1.0 - c.beta1) * g[j];
      v[j] = c.beta2 * v[j] + (1.0 - c.beta2) * g[j] * g[j];
      const double m_hat = m[j] / correction1;
      const double v_hat = v[j] / correction2;
      p[j] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
    }
  }
}

}  // namespace uprop::nn
