#pragma once

#include <array>
#include <span>

#include "otl/net.hpp"

namespace otl {

// Adam with Nesterov momentum and the warming momentum schedule
// mu_t = beta1 * (1 - 0.5 * 0.96^(t * schedule_decay)).
struct NadamConfig {
  double lr = 0.002;
  double beta1 = 0.99;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double schedule_decay = 0.004;
};

struct MomentSchedule {
  long step = 0;
  double product = 1.0;  // prod_{i<=step} mu_i
};

struct NadamCoefficients {
  double mu;               // mu_t
  double mu_next;          // mu_{t+1}
  double schedule;         // prod_{i<=t} mu_i
  double schedule_next;    // prod_{i<=t+1} mu_i
  double v_correction;     // 1 - beta2^t
};

// Advances the schedule by one step and returns this step's coefficients.
NadamCoefficients advance(MomentSchedule& schedule, const NadamConfig& config);

void nadam_update(std::span<double> param, std::span<const double> grad, std::span<double> m,
                  std::span<double> v, const NadamCoefficients& coef, const NadamConfig& config);

// Moments are shaped like the parameters; the schedule is kept per layer so
// frozen layers' state is never advanced.
struct OptimizerState {
  NadamConfig config;
  NetworkParams m;
  NetworkParams v;
  std::array<MomentSchedule, 4> schedules{};

  static OptimizerState fresh(const NetConfig& net, const NadamConfig& config);
};

// Applies one update to the layers in `mask`. Throws before touching
// anything if a trainable gradient is non-finite.
void step(NetworkParams& params, const NetworkParams& grads, OptimizerState& state, const FreezeMask& mask);

}  // namespace otl
