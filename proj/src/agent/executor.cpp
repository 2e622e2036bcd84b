#include "coexsim/agent/executor.hpp"

#include <limits>
#include <span>
#include <stdexcept>

#include "coexsim/agent/trainer.hpp"

namespace coexsim::agent {
namespace {

enum class Mode { kQasal, kPrimalDual, kStatic };

void check_net(const QNetwork& net, const env::CoexEnv& env, int expected_input) {
  if (net.input_dim() != expected_input) {
    throw std::invalid_argument("network input width does not match the execution mode");
  }
  if (net.output_dim() != env.action_count()) {
    throw std::invalid_argument("network action count does not match the environment");
  }
}

ExecutionResult run(env::CoexEnv& env, const DualConfig& dual, std::uint64_t steps,
                    const QNetwork* net, Mode mode, double lambda0) {
  ExecutionResult result;
  auto state = env.reset(lambda0);
  DualState dual_state{lambda0, 0};
  if (mode == Mode::kQasal) result.lambda_trace.push_back(dual_state.lambda);

  const bool joint = env.profile().joint_action;
  double epoch_slack = 0.0, sum_jfi = 0.0;
  int epoch_len = 0;
  std::uint64_t epochs = 0, violating = 0;

  for (std::uint64_t t = 0; t < steps && !env.done(); ++t) {
    int flat = -1;
    env::StepOutcome out;
    if (mode == Mode::kStatic) {
      out = env.step_passive();
    } else {
      const std::span<const double> in(state.features.data(),
                                       static_cast<std::size_t>(net->input_dim()));
      flat = greedy_action(net->forward(in));
      out = env.step(flat);
    }
    const double lambda_now = mode == Mode::kStatic ? 0.0 : dual_state.lambda;

    StepRow row;
    row.step = t;
    row.jfi = out.metrics.jfi;
    row.step_delay_us = out.metrics.step_delay_us;
    row.avg_delay_us = out.metrics.avg_delay_us;
    row.collision_frac = out.metrics.collision_frac_window;
    row.airtime_nru = out.metrics.airtime_frac_nru;
    row.airtime_wifi = out.metrics.airtime_frac_wifi;
    row.lambda = lambda_now;
    if (flat >= 0) {
      if (joint) {
        const auto pair = env::ActionPair::from_flat(flat);
        row.action_pc1 = pair.a_pc1;
        row.action_pc3 = pair.a_pc3;
      } else {
        row.action_pc3 = flat;
      }
    }
    row.reward = env::lagrangian_reward(out.f, out.g, lambda_now);
    result.rows.push_back(row);

    sum_jfi += out.metrics.jfi;
    result.final_avg_delay_us = out.metrics.avg_delay_us;
    state = out.next_state;

    epoch_slack += out.g;
    if (++epoch_len == dual.t0_steps) {
      const double mean_slack = epoch_slack / static_cast<double>(dual.t0_steps);
      ++epochs;
      if (mean_slack < 0.0) ++violating;
      if (mode == Mode::kQasal) {
        dual_state = dual_update(dual_state, mean_slack, dual);
        env.set_lambda(dual_state.lambda);
        state.features[env::kObservationDim] =
            dual.lambda_max > 0.0 ? dual_state.lambda / dual.lambda_max : 0.0;
        result.lambda_trace.push_back(dual_state.lambda);
      }
      epoch_slack = 0.0;
      epoch_len = 0;
    }
  }

  if (epochs > 0) {
    result.violation_fraction = static_cast<double>(violating) / static_cast<double>(epochs);
  }
  if (!result.rows.empty()) {
    result.mean_jfi = sum_jfi / static_cast<double>(result.rows.size());

    const sim::Tick horizon =
        static_cast<sim::Tick>(result.rows.size()) * env.profile().step_ticks;
    const sim::Tick half = horizon / 2;
    double sum = 0.0;
    std::uint64_t count = 0;
    for (const auto& rec : env.aggregator().pc1_delays()) {
      if (rec.completion >= half) {
        sum += static_cast<double>(rec.delay());
        ++count;
      }
    }
    result.mean_delay_last_half_us =
        count > 0 ? sum / static_cast<double>(count) : std::numeric_limits<double>::infinity();
  }
  result.trace_hash = env.trace_hash();
  return result;
}

}  // namespace

ExecutionResult execute_qasal(const QNetwork& net, env::CoexEnv& env, const DualConfig& dual,
                              std::uint64_t steps) {
  check_net(net, env, env::kAugmentedDim);
  return run(env, dual, steps, &net, Mode::kQasal, 0.0);
}

ExecutionResult execute_primal_dual(const QNetwork& net, env::CoexEnv& env, double lambda_fixed,
                                    const DualConfig& dual, std::uint64_t steps) {
  check_net(net, env, env::kObservationDim);
  return run(env, dual, steps, &net, Mode::kPrimalDual, lambda_fixed);
}

ExecutionResult execute_static(env::CoexEnv& env, const DualConfig& dual, std::uint64_t steps) {
  return run(env, dual, steps, nullptr, Mode::kStatic, 0.0);
}

}  // namespace coexsim::agent
