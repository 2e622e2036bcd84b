#pragma once

#include <algorithm>
#include <cstdint>

namespace coexsim::agent {

// Parameters of the projected dual ascent on the latency constraint price.
struct DualConfig {
  double eta = 0.1;        // dual step size
  double lambda_max = 10.0;
  int t0_steps = 5;        // environment steps per dual epoch
};

struct DualState {
  double lambda = 0.0;
  std::uint64_t epoch = 0;
};

// One projected subgradient step. `epoch_slack` is the mean constraint value
// g over the epoch just finished (positive when the latency budget held).
inline DualState dual_update(const DualState& s, double epoch_slack, const DualConfig& cfg) {
  DualState out;
  out.lambda = std::clamp(s.lambda - cfg.eta * epoch_slack, 0.0, cfg.lambda_max);
  out.epoch = s.epoch + 1;
  return out;
}

}  // namespace coexsim::agent
