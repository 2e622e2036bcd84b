#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "coexsim/agent/dual.hpp"
#include "coexsim/agent/qnetwork.hpp"
#include "coexsim/agent/replay.hpp"
#include "coexsim/env/coex_env.hpp"
#include "coexsim/sim/rng.hpp"

namespace coexsim::agent {

/// Lowest-index argmax.
int greedy_action(std::span<const double> q);

/// Epsilon-greedy: with probability epsilon a uniform action, else the
/// greedy one. Consumes exactly one draw on exploit, two on explore.
int select_action(std::span<const double> q, double epsilon, sim::RngStream& rng);

/// Momentum-free adaptive step: second-moment scaling with bias correction
/// only (first-moment smoothing off, so each step uses the raw gradient).
class AdamOpt {
 public:
  AdamOpt(std::size_t param_count, double learning_rate)
      : lr_(learning_rate), v_(param_count, 0.0) {}

  void apply(std::span<double> params, std::span<const double> grad);

 private:
  double lr_;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  std::uint64_t t_ = 0;
  std::vector<double> v_;
};

/// Mean Huber TD loss over the batch and its gradient (same layout as
/// net.parameters(), zeroed first). Target: r + gamma * max_a' Q_target(s',a')
/// (r alone on terminal transitions).
double loss_and_grad(const QNetwork& net, const QNetwork& target,
                     std::span<const Transition> batch, double gamma,
                     std::span<double> grad_out);

/// One optimizer step on the batch; returns the loss before the step.
double train_step(QNetwork& net, const QNetwork& target,
                  std::span<const Transition> batch, double gamma, AdamOpt& opt);

struct TrainSchedule {
  int episodes = 300;
  double epsilon_start = 1.0;
  double epsilon_end = 0.1;
  double epsilon_decay_fraction = 0.8;  // share of episodes spanned by the decay
  double gamma = 0.99;
  double learning_rate = 1e-4;
  int target_update_steps = 500;
  int batch_size = 16;
  std::size_t buffer_capacity = 100000;
  std::vector<int> populations = {5, 15, 25};  // cycled episode round-robin
};

double epsilon_for_episode(const TrainSchedule& s, int episode);

/// One row of the training-curve CSV (population is bookkeeping, not a column).
struct CurveRow {
  int episode = 0;
  double lambda = 0.0;
  double mean_reward = 0.0;
  double mean_jfi = 0.0;
  double mean_delay_us = 0.0;
  double violation_frac = 0.0;  // share of steps with negative slack
  double epsilon = 0.0;
  double loss = 0.0;  // mean over the episode's gradient steps
  int population = 0;
};

struct TrainResult {
  QNetwork net;
  std::vector<CurveRow> curve;
  std::vector<double> lambda_trace;  // dual iterates (baseline trainer only)
  bool lambda_changes_policy = false;
};

/// State-augmented training: one constraint price drawn uniformly from
/// [0, lambda_max] per episode, fixed for that episode and embedded in the
/// state; the PC3 population cycles through schedule.populations.
TrainResult train_qasal(const env::EnvProfile& profile, const TrainSchedule& schedule,
                        const DualConfig& dual, std::uint64_t seed);

/// Primal-dual baseline: the price is not part of the state (8 inputs); it
/// persists across episodes and moves by projected dual ascent every
/// dual.t0_steps environment steps.
TrainResult train_primal_dual(const env::EnvProfile& profile, const TrainSchedule& schedule,
                              const DualConfig& dual, std::uint64_t seed);

/// Probe a fixed grid of states: does the greedy action ever differ between
/// price 0 and price lambda_max? A trained augmented net should say yes;
/// callers treat false as a training-quality warning, not an error.
bool probe_lambda_sensitivity(const QNetwork& net);

}  // namespace coexsim::agent
