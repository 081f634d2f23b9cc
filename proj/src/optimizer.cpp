#include "otl/optimizer.hpp"

#include <cmath>

#include "otl/error.hpp"

namespace otl {

NadamCoefficients advance(MomentSchedule& schedule, const NadamConfig& config) {
  ++schedule.step;
  const auto t = static_cast<double>(schedule.step);
  NadamCoefficients c{};
  c.mu = config.beta1 * (1.0 - 0.5 * std::pow(0.96, t * config.schedule_decay));
  c.mu_next = config.beta1 * (1.0 - 0.5 * std::pow(0.96, (t + 1.0) * config.schedule_decay));
  c.schedule = schedule.product * c.mu;
  c.schedule_next = c.schedule * c.mu_next;
  c.v_correction = 1.0 - std::pow(config.beta2, t);
  schedule.product = c.schedule;
  return c;
}

void nadam_update(std::span<double> param, std::span<const double> grad, std::span<double> m,
                  std::span<double> v, const NadamCoefficients& c, const NadamConfig& config) {
  const double b1 = config.beta1;
  const double b2 = config.beta2;
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double g = grad[i];
    const double g_hat = g / (1.0 - c.schedule);
    m[i] = b1 * m[i] + (1.0 - b1) * g;
    v[i] = b2 * v[i] + (1.0 - b2) * g * g;
    const double m_hat = m[i] / (1.0 - c.schedule_next);
    const double v_hat = v[i] / c.v_correction;
    const double m_bar = (1.0 - c.mu) * g_hat + c.mu_next * m_hat;
    param[i] -= config.lr * m_bar / (std::sqrt(v_hat) + config.epsilon);
  }
}

OptimizerState OptimizerState::fresh(const NetConfig& net, const NadamConfig& config) {
  return {config, NetworkParams::zeros(net), NetworkParams::zeros(net), {}};
}

void step(NetworkParams& params, const NetworkParams& grads, OptimizerState& state, const FreezeMask& mask) {
  if (!(params.config == grads.config) || !(params.config == state.m.config))
    throw DataError("optimizer step: parameter, gradient and state shapes differ");

  auto p = tensors(params);
  auto g = tensors(grads);
  auto m = tensors(state.m);
  auto v = tensors(state.v);

  for (const auto& t : g) {
    if (!mask.trainable(t.layer)) continue;
    for (double x : t.data)
      if (!std::isfinite(x))
        throw DataError("non-finite gradient in layer " + std::to_string(t.layer) + " (" + t.name + ")");
  }

  std::array<NadamCoefficients, 4> coef{};
  for (int layer = 1; layer <= 4; ++layer)
    if (mask.trainable(layer))
      coef[static_cast<std::size_t>(layer - 1)] = advance(state.schedules[static_cast<std::size_t>(layer - 1)], state.config);

  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!mask.trainable(p[i].layer)) continue;
    nadam_update(p[i].data, g[i].data, m[i].data, v[i].data, coef[static_cast<std::size_t>(p[i].layer - 1)],
                 state.config);
  }
}

}  // namespace otl
