#pragma once

#include <array>
#include <cstdint>
#include <memory>

#include "coexsim/mac/profile.hpp"
#include "coexsim/mac/system.hpp"
#include "coexsim/metrics/aggregator.hpp"
#include "coexsim/sim/channel.hpp"
#include "coexsim/sim/engine.hpp"

namespace coexsim::env {

inline constexpr int kObservationDim = 8;
inline constexpr int kAugmentedDim = kObservationDim + 1;  // one constraint
inline constexpr int kJointActionCount = mac::kCwActionCount * mac::kCwActionCount;  // 49

/// Both classes' window decisions; flattened as 7*a_pc1 + a_pc3.
struct ActionPair {
  int a_pc1 = 0;
  int a_pc3 = 0;

  int flat() const { return mac::kCwActionCount * a_pc1 + a_pc3; }
  static ActionPair from_flat(int flat);
};

/// Feature order: [avg_delay/D_th, step_delay/D_th, delay_trend/D_th,
/// collision_frac_window, airtime_frac_nru, airtime_frac_wifi, jfi,
/// n_pc3/n_pc3_max]. The three delay features are clipped to [0,5], the rest
/// lie in [0,1].
struct Observation {
  std::array<double, kObservationDim> features{};
};

/// Observation plus the normalized dual variable lambda/lambda_max.
struct AugmentedState {
  std::array<double, kAugmentedDim> features{};

  double lambda_norm() const { return features[kObservationDim]; }
};

struct StepOutcome {
  AugmentedState next_state;
  double f = 0.0;  // per-step performance: the fairness index
  double g = 0.0;  // constraint slack (D_th - avg_delay)/D_th, >0 when satisfied
  metrics::StepMetrics metrics;
  bool done = false;
};

/// Per-step integrand of the constrained objective.
inline double lagrangian_reward(double f, double g, double lambda) { return f + lambda * g; }

/// Environment parameters; the harness populates this from its config file.
struct EnvProfile {
  int n_pc3 = 5;
  int n_pc3_max = 50;
  double d_th_us = 2000.0;
  sim::Tick step_ticks = 2500;
  std::uint64_t steps_per_episode = 8000;

  mac::MacTimingProfile pc1_timing = mac::default_profile_pc1();
  mac::MacTimingProfile pc3_timing = mac::default_profile_pc3();
  bool beb_enabled = true;    // false: windows stay pinned at the selected cap
  bool joint_action = true;   // false: 7 actions controlling PC3 only
  std::uint32_t single_class_pc1_cw = 7;  // PC1 pin when joint_action is off

  // Windows in force until the first action arrives (standard maxima).
  std::uint32_t initial_cw_pc1 = 7;
  std::uint32_t initial_cw_pc3 = 63;

  int metrics_window_steps = 10;
  bool per_step_jfi = false;
  double lambda_max = 10.0;
};

/// Episodic decision-step wrapper around the coexistence simulator: applies
/// window actions, advances 2.5 ms at a time, and derives the augmented
/// constrained-RL state.
class CoexEnv {
 public:
  CoexEnv(const EnvProfile& profile, std::uint64_t seed);
  ~CoexEnv();

  /// Fresh saturated simulator, same stored seed and population.
  AugmentedState reset(double lambda0);
  /// Fresh simulator with a new seed and PC3 population.
  AugmentedState reset(std::uint64_t seed, int n_pc3, double lambda0);

  /// Apply a flat action index, advance one decision step.
  StepOutcome step(int flat_action);
  /// Advance one decision step leaving all windows untouched (static mode).
  StepOutcome step_passive();

  void set_lambda(double lambda);
  double lambda() const { return lambda_; }

  int action_count() const {
    return profile_.joint_action ? kJointActionCount : mac::kCwActionCount;
  }
  bool done() const { return step_index_ >= profile_.steps_per_episode; }
  std::uint64_t steps_taken() const { return step_index_; }
  int n_pc3() const { return n_pc3_; }

  const EnvProfile& profile() const { return profile_; }
  const metrics::StepAggregator& aggregator() const { return *aggregator_; }
  const sim::Channel& channel() const { return *channel_; }

  void set_trace_recording(bool on) { trace_on_ = on; }
  std::uint64_t trace_hash() const { return engine_->trace_hash(); }

 private:
  struct SinkAdapter;

  void apply_action(int flat_action);
  StepOutcome advance();
  AugmentedState make_state(const metrics::StepMetrics& m) const;

  EnvProfile profile_;
  std::uint64_t seed_;
  int n_pc3_;
  double lambda_ = 0.0;
  std::uint64_t step_index_ = 0;
  bool trace_on_ = false;

  std::unique_ptr<sim::SimEngine> engine_;
  std::unique_ptr<sim::Channel> channel_;
  std::unique_ptr<SinkAdapter> sink_;
  std::unique_ptr<mac::MacSystem> mac_;
  std::unique_ptr<metrics::StepAggregator> aggregator_;
};

}  // namespace coexsim::env
