#include "coexsim/env/coex_env.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "coexsim/sim/rng.hpp"

namespace coexsim::env {

namespace {
double clip(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }
}  // namespace

ActionPair ActionPair::from_flat(int flat) {
  if (flat < 0 || flat >= kJointActionCount) {
    throw std::invalid_argument("action index " + std::to_string(flat) + " outside [0,48]");
  }
  return {flat / mac::kCwActionCount, flat % mac::kCwActionCount};
}

struct CoexEnv::SinkAdapter : mac::OutcomeSink {
  metrics::StepAggregator* aggregator = nullptr;

  void on_attempt_resolved(const mac::TransmitterNode& node, const sim::Transmission& tx,
                           sim::TxOutcome outcome) override {
    aggregator->on_attempt(node.priority_class().tag, node.priority_class().technology, tx,
                           outcome, node.hol_timestamp(), node.id());
  }
  void on_reservation_finished(const mac::TransmitterNode&, const sim::Transmission& rs) override {
    aggregator->on_reservation(rs);
  }
};

CoexEnv::CoexEnv(const EnvProfile& profile, std::uint64_t seed)
    : profile_(profile), seed_(seed), n_pc3_(profile.n_pc3) {
  if (profile_.n_pc3 < 1) throw std::invalid_argument("n_pc3 must be >= 1");
  if (profile_.n_pc3_max < profile_.n_pc3) {
    throw std::invalid_argument("n_pc3_max must be >= n_pc3");
  }
  if (profile_.d_th_us <= 0) throw std::invalid_argument("d_th_us must be > 0");
  if (profile_.step_ticks == 0 || profile_.steps_per_episode == 0) {
    throw std::invalid_argument("step size and episode length must be positive");
  }
  reset(0.0);
}

CoexEnv::~CoexEnv() = default;

AugmentedState CoexEnv::reset(double lambda0) { return reset(seed_, n_pc3_, lambda0); }

AugmentedState CoexEnv::reset(std::uint64_t seed, int n_pc3, double lambda0) {
  if (n_pc3 < 1 || n_pc3 > profile_.n_pc3_max) {
    throw std::invalid_argument("n_pc3 outside [1, n_pc3_max]");
  }
  seed_ = seed;
  n_pc3_ = n_pc3;
  step_index_ = 0;
  set_lambda(lambda0);

  engine_ = std::make_unique<sim::SimEngine>();
  engine_->set_trace_recording(trace_on_);
  channel_ = std::make_unique<sim::Channel>();
  aggregator_ = std::make_unique<metrics::StepAggregator>(profile_.metrics_window_steps,
                                                          profile_.per_step_jfi);
  sink_ = std::make_unique<SinkAdapter>();
  sink_->aggregator = aggregator_.get();
  mac_ = std::make_unique<mac::MacSystem>(*engine_, *channel_, sink_.get());
  engine_->set_handler([this](const sim::SimEvent& e) { mac_->handle(e); });

  const bool fixed = !profile_.beb_enabled;
  const std::uint32_t pc1_cw =
      profile_.joint_action ? profile_.initial_cw_pc1 : profile_.single_class_pc1_cw;
  mac_->add_node({{mac::ClassTag::PC1, mac::Technology::NRU}, profile_.pc1_timing, pc1_cw, fixed},
                 sim::RngStream(seed_, 0));
  for (int i = 0; i < n_pc3_; ++i) {
    mac_->add_node({{mac::ClassTag::PC3, mac::Technology::WiFi}, profile_.pc3_timing,
                    profile_.initial_cw_pc3, fixed},
                   sim::RngStream(seed_, static_cast<std::uint64_t>(i) + 1));
  }
  mac_->start();

  // Initial state: zeroed features except population and dual entries.
  AugmentedState state;
  state.features[7] = static_cast<double>(n_pc3_) / static_cast<double>(profile_.n_pc3_max);
  state.features[kObservationDim] = lambda_ / profile_.lambda_max;
  return state;
}

void CoexEnv::set_lambda(double lambda) {
  if (lambda < 0.0 || lambda > profile_.lambda_max) {
    throw std::invalid_argument("lambda outside [0, lambda_max]");
  }
  lambda_ = lambda;
}

void CoexEnv::apply_action(int flat_action) {
  if (flat_action < 0 || flat_action >= action_count()) {
    throw std::invalid_argument("action index " + std::to_string(flat_action) +
                                " outside [0," + std::to_string(action_count() - 1) + "]");
  }
  int a_pc1 = -1, a_pc3 = 0;
  if (profile_.joint_action) {
    const ActionPair pair = ActionPair::from_flat(flat_action);
    a_pc1 = pair.a_pc1;
    a_pc3 = pair.a_pc3;
  } else {
    a_pc3 = flat_action;  // PC1 stays pinned in single-class mode
  }
  if (a_pc1 >= 0) {
    mac_->node(0).set_cw_max(mac::cw_from_action(a_pc1, mac::ClassTag::PC1));
  }
  const std::uint32_t pc3_cw = mac::cw_from_action(a_pc3, mac::ClassTag::PC3);
  for (int i = 0; i < n_pc3_; ++i) mac_->node(i + 1).set_cw_max(pc3_cw);
}

StepOutcome CoexEnv::step(int flat_action) {
  if (done()) throw std::logic_error("step called on a finished episode");
  apply_action(flat_action);
  return advance();
}

StepOutcome CoexEnv::step_passive() {
  if (done()) throw std::logic_error("step called on a finished episode");
  return advance();
}

StepOutcome CoexEnv::advance() {
  const sim::Tick horizon = (step_index_ + 1) * profile_.step_ticks;
  engine_->schedule({horizon, 0, sim::EventKind::StepBoundary, -1, 0});
  engine_->run_until(horizon);
  const metrics::StepMetrics m = aggregator_->finish_step(horizon);
  ++step_index_;

  StepOutcome out;
  out.metrics = m;
  out.f = m.jfi;
  out.g = (profile_.d_th_us - m.avg_delay_us) / profile_.d_th_us;
  out.next_state = make_state(m);
  out.done = done();
  return out;
}

AugmentedState CoexEnv::make_state(const metrics::StepMetrics& m) const {
  const double d = profile_.d_th_us;
  AugmentedState s;
  s.features[0] = clip(m.avg_delay_us / d, 0.0, 5.0);
  s.features[1] = clip(m.step_delay_us / d, 0.0, 5.0);
  s.features[2] = clip(m.delay_trend_us / d, 0.0, 5.0);
  s.features[3] = clip(m.collision_frac_window, 0.0, 1.0);
  s.features[4] = clip(m.airtime_frac_nru, 0.0, 1.0);
  s.features[5] = clip(m.airtime_frac_wifi, 0.0, 1.0);
  s.features[6] = clip(m.jfi, 0.0, 1.0);
  s.features[7] = static_cast<double>(n_pc3_) / static_cast<double>(profile_.n_pc3_max);
  s.features[kObservationDim] = lambda_ / profile_.lambda_max;
  return s;
}

}  // namespace coexsim::env
