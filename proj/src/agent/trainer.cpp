#include "coexsim/agent/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>

namespace coexsim::agent {
namespace {

// Agent-side RNG streams; environment node streams sit at small indices, so
// these stay disjoint even under the same base seed.
constexpr std::uint64_t kInitStream = 1001;
constexpr std::uint64_t kActionStream = 1002;
constexpr std::uint64_t kSampleStream = 1003;
constexpr std::uint64_t kLambdaStream = 1004;

std::uint64_t episode_seed(std::uint64_t seed, int episode) {
  return sim::splitmix64(sim::splitmix64(seed) + static_cast<std::uint64_t>(episode) + 1);
}

void validate_schedule(const TrainSchedule& s) {
  if (s.episodes <= 0) throw std::invalid_argument("episodes must be positive");
  if (s.batch_size <= 0) throw std::invalid_argument("batch size must be positive");
  if (s.target_update_steps <= 0) throw std::invalid_argument("target update period must be positive");
  if (s.populations.empty()) throw std::invalid_argument("population list must be nonempty");
  if (s.buffer_capacity < static_cast<std::size_t>(s.batch_size)) {
    throw std::invalid_argument("replay capacity smaller than batch size");
  }
}

Transition make_transition(const env::AugmentedState& s, const env::AugmentedState& s2,
                           int dim, int action, double reward, bool terminal) {
  Transition t;
  t.state = s.features;
  t.next_state = s2.features;
  t.dim = dim;
  t.action = action;
  t.reward = reward;
  t.terminal = terminal;
  return t;
}

}  // namespace

int greedy_action(std::span<const double> q) {
  if (q.empty()) throw std::invalid_argument("empty action-value vector");
  return static_cast<int>(std::max_element(q.begin(), q.end()) - q.begin());
}

int select_action(std::span<const double> q, double epsilon, sim::RngStream& rng) {
  if (epsilon < 0.0 || epsilon > 1.0) throw std::invalid_argument("epsilon out of [0,1]");
  if (rng.next_unit() < epsilon) {
    return static_cast<int>(rng.next_below_inclusive(q.size() - 1));
  }
  return greedy_action(q);
}

void AdamOpt::apply(std::span<double> params, std::span<const double> grad) {
  if (params.size() != v_.size() || grad.size() != v_.size()) {
    throw std::invalid_argument("optimizer size mismatch");
  }
  ++t_;
  const double correction = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < v_.size(); ++i) {
    const double g = grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g * g;
    const double vhat = v_[i] / correction;
    params[i] -= lr_ * g / (std::sqrt(vhat) + eps_);
  }
}

double loss_and_grad(const QNetwork& net, const QNetwork& target,
                     std::span<const Transition> batch, double gamma,
                     std::span<double> grad_out) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  if (grad_out.size() != net.parameters().size()) {
    throw std::invalid_argument("gradient buffer size mismatch");
  }
  std::fill(grad_out.begin(), grad_out.end(), 0.0);

  const double inv_b = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  QNetwork::Workspace ws;
  std::vector<double> d_output(static_cast<std::size_t>(net.output_dim()));
  for (const Transition& t : batch) {
    if (t.dim != net.input_dim()) throw std::invalid_argument("transition width mismatch");
    if (t.action < 0 || t.action >= net.output_dim()) {
      throw std::invalid_argument("transition action out of range");
    }
    double y = t.reward;
    if (!t.terminal) {
      const auto q_next = target.forward(std::span<const double>(t.next_state.data(),
                                                                 static_cast<std::size_t>(t.dim)));
      y += gamma * *std::max_element(q_next.begin(), q_next.end());
    }
    net.forward_cached(std::span<const double>(t.state.data(), static_cast<std::size_t>(t.dim)), ws);
    const double e = ws.activations.back()[static_cast<std::size_t>(t.action)] - y;
    // Huber, delta = 1.
    loss += (std::abs(e) <= 1.0 ? 0.5 * e * e : std::abs(e) - 0.5) * inv_b;
    std::fill(d_output.begin(), d_output.end(), 0.0);
    d_output[static_cast<std::size_t>(t.action)] = std::clamp(e, -1.0, 1.0) * inv_b;
    net.backward(ws, d_output, grad_out);
  }
  return loss;
}

double train_step(QNetwork& net, const QNetwork& target,
                  std::span<const Transition> batch, double gamma, AdamOpt& opt) {
  std::vector<double> grad(net.parameters().size());
  const double loss = loss_and_grad(net, target, batch, gamma, grad);
  if (!std::isfinite(loss)) {
    std::ostringstream msg;
    msg << "non-finite training loss " << loss << " on batch of " << batch.size();
    throw std::runtime_error(msg.str());
  }
  opt.apply(net.parameters(), grad);
  return loss;
}

double epsilon_for_episode(const TrainSchedule& s, int episode) {
  const double horizon = s.epsilon_decay_fraction * static_cast<double>(s.episodes);
  if (horizon <= 0.0 || static_cast<double>(episode) >= horizon) return s.epsilon_end;
  const double frac = static_cast<double>(episode) / horizon;
  return s.epsilon_start + (s.epsilon_end - s.epsilon_start) * frac;
}

TrainResult train_qasal(const env::EnvProfile& profile, const TrainSchedule& schedule,
                        const DualConfig& dual, std::uint64_t seed) {
  validate_schedule(schedule);
  env::CoexEnv env(profile, seed);

  QNetwork net(env::kAugmentedDim, {32, 32, 32}, env.action_count());
  sim::RngStream init_rng(seed, kInitStream);
  net.init(init_rng);
  QNetwork target = net;

  ReplayBuffer buffer(schedule.buffer_capacity);
  AdamOpt opt(net.parameters().size(), schedule.learning_rate);
  sim::RngStream action_rng(seed, kActionStream);
  sim::RngStream sample_rng(seed, kSampleStream);
  sim::RngStream lambda_rng(seed, kLambdaStream);

  TrainResult result{std::move(net), {}, {}, false};
  std::uint64_t gradient_steps = 0;

  for (int e = 0; e < schedule.episodes; ++e) {
    const double epsilon = epsilon_for_episode(schedule, e);
    const double lambda = lambda_rng.next_unit() * dual.lambda_max;
    const int population =
        schedule.populations[static_cast<std::size_t>(e) % schedule.populations.size()];
    auto state = env.reset(episode_seed(seed, e), population, lambda);

    double sum_reward = 0.0, sum_jfi = 0.0, sum_loss = 0.0, last_avg_delay = 0.0;
    std::uint64_t steps = 0, violations = 0, losses = 0;
    while (!env.done()) {
      const auto q = result.net.forward(state.features);
      const int action = select_action(q, epsilon, action_rng);
      const auto out = env.step(action);
      const double reward = env::lagrangian_reward(out.f, out.g, lambda);
      buffer.push(make_transition(state, out.next_state, env::kAugmentedDim, action, reward,
                                  out.done));
      state = out.next_state;

      sum_reward += reward;
      sum_jfi += out.f;
      last_avg_delay = out.metrics.avg_delay_us;
      if (out.g < 0.0) ++violations;
      ++steps;

      if (buffer.size() >= static_cast<std::size_t>(schedule.batch_size)) {
        const auto batch = buffer.sample(static_cast<std::size_t>(schedule.batch_size), sample_rng);
        sum_loss += train_step(result.net, target, batch, schedule.gamma, opt);
        ++losses;
        if (++gradient_steps % static_cast<std::uint64_t>(schedule.target_update_steps) == 0) {
          target.copy_parameters_from(result.net);
        }
      }
    }

    const double n = static_cast<double>(steps);
    result.curve.push_back({e, lambda, sum_reward / n, sum_jfi / n, last_avg_delay,
                            static_cast<double>(violations) / n, epsilon,
                            losses > 0 ? sum_loss / static_cast<double>(losses) : 0.0,
                            population});
  }

  result.lambda_changes_policy = probe_lambda_sensitivity(result.net);
  return result;
}

TrainResult train_primal_dual(const env::EnvProfile& profile, const TrainSchedule& schedule,
                              const DualConfig& dual, std::uint64_t seed) {
  validate_schedule(schedule);
  env::CoexEnv env(profile, seed);

  QNetwork net(env::kObservationDim, {32, 32, 32}, env.action_count());
  sim::RngStream init_rng(seed, kInitStream);
  net.init(init_rng);
  QNetwork target = net;

  ReplayBuffer buffer(schedule.buffer_capacity);
  AdamOpt opt(net.parameters().size(), schedule.learning_rate);
  sim::RngStream action_rng(seed, kActionStream);
  sim::RngStream sample_rng(seed, kSampleStream);

  TrainResult result{std::move(net), {}, {}, false};
  DualState dual_state;  // persists across episodes; lambda starts at 0
  result.lambda_trace.push_back(dual_state.lambda);
  std::uint64_t gradient_steps = 0;

  for (int e = 0; e < schedule.episodes; ++e) {
    const double epsilon = epsilon_for_episode(schedule, e);
    const int population =
        schedule.populations[static_cast<std::size_t>(e) % schedule.populations.size()];
    auto state = env.reset(episode_seed(seed, e), population, dual_state.lambda);

    double sum_reward = 0.0, sum_jfi = 0.0, sum_loss = 0.0, last_avg_delay = 0.0;
    double epoch_slack = 0.0;
    int epoch_len = 0;
    std::uint64_t steps = 0, violations = 0, losses = 0;
    while (!env.done()) {
      const auto q = result.net.forward(
          std::span<const double>(state.features.data(), env::kObservationDim));
      const int action = select_action(q, epsilon, action_rng);
      const auto out = env.step(action);
      const double reward = env::lagrangian_reward(out.f, out.g, dual_state.lambda);
      buffer.push(make_transition(state, out.next_state, env::kObservationDim, action, reward,
                                  out.done));
      state = out.next_state;

      sum_reward += reward;
      sum_jfi += out.f;
      last_avg_delay = out.metrics.avg_delay_us;
      if (out.g < 0.0) ++violations;
      ++steps;

      epoch_slack += out.g;
      if (++epoch_len == dual.t0_steps) {
        dual_state = dual_update(dual_state, epoch_slack / dual.t0_steps, dual);
        result.lambda_trace.push_back(dual_state.lambda);
        env.set_lambda(dual_state.lambda);
        epoch_slack = 0.0;
        epoch_len = 0;
      }

      if (buffer.size() >= static_cast<std::size_t>(schedule.batch_size)) {
        const auto batch = buffer.sample(static_cast<std::size_t>(schedule.batch_size), sample_rng);
        sum_loss += train_step(result.net, target, batch, schedule.gamma, opt);
        ++losses;
        if (++gradient_steps % static_cast<std::uint64_t>(schedule.target_update_steps) == 0) {
          target.copy_parameters_from(result.net);
        }
      }
    }

    const double n = static_cast<double>(steps);
    result.curve.push_back({e, dual_state.lambda, sum_reward / n, sum_jfi / n, last_avg_delay,
                            static_cast<double>(violations) / n, epsilon,
                            losses > 0 ? sum_loss / static_cast<double>(losses) : 0.0,
                            population});
  }

  return result;
}

bool probe_lambda_sensitivity(const QNetwork& net) {
  if (net.input_dim() != env::kAugmentedDim) return false;
  static constexpr double kDelay[] = {0.0, 0.5, 1.0, 1.5, 2.0, 3.0};
  static constexpr double kColl[] = {0.0, 0.3, 0.7};
  static constexpr double kPop[] = {0.1, 0.3, 0.5, 1.0};
  std::array<double, env::kAugmentedDim> s{};
  for (double d : kDelay) {
    for (double c : kColl) {
      for (double p : kPop) {
        s = {d, d, 0.0, c, 0.3, 0.5, 0.8, p, 0.0};
        const int a0 = greedy_action(net.forward(s));
        s[env::kObservationDim] = 1.0;
        const int a1 = greedy_action(net.forward(s));
        if (a0 != a1) return true;
      }
    }
  }
  return false;
}

}  // namespace coexsim::agent
