#pragma once

#include <cstdint>
#include <vector>

#include "coexsim/agent/dual.hpp"
#include "coexsim/agent/qnetwork.hpp"
#include "coexsim/env/coex_env.hpp"

namespace coexsim::agent {

/// One row of the per-step execution CSV.
struct StepRow {
  int episode = 0;
  std::uint64_t step = 0;
  double jfi = 0.0;
  double step_delay_us = 0.0;
  double avg_delay_us = 0.0;
  double collision_frac = 0.0;
  double airtime_nru = 0.0;
  double airtime_wifi = 0.0;
  double lambda = 0.0;
  int action_pc1 = -1;  // -1 where the mode leaves that class untouched
  int action_pc3 = -1;
  double reward = 0.0;
};

struct ExecutionResult {
  std::vector<StepRow> rows;
  std::vector<double> lambda_trace;      // price after each dual epoch (dynamics mode)
  double violation_fraction = 0.0;       // share of complete epochs with mean slack < 0
  double mean_delay_last_half_us = 0.0;  // PC1 packets completing in the second half
  double final_avg_delay_us = 0.0;
  double mean_jfi = 0.0;
  std::uint64_t trace_hash = 0;
};

/// Greedy rollout with online dual dynamics: every dual.t0_steps steps the
/// price moves by projected ascent on that epoch's mean slack and is embedded
/// in subsequent states. Starts from price 0.
ExecutionResult execute_qasal(const QNetwork& net, env::CoexEnv& env, const DualConfig& dual,
                              std::uint64_t steps);

/// Greedy rollout of the 8-input baseline under a frozen price.
ExecutionResult execute_primal_dual(const QNetwork& net, env::CoexEnv& env, double lambda_fixed,
                                    const DualConfig& dual, std::uint64_t steps);

/// No learner: contention windows stay at their configured values.
ExecutionResult execute_static(env::CoexEnv& env, const DualConfig& dual, std::uint64_t steps);

}  // namespace coexsim::agent
