#include "coexsim/metrics/aggregator.hpp"

#include "coexsim/metrics/jfi.hpp"

namespace coexsim::metrics {

void StepAggregator::on_attempt(mac::ClassTag tag, mac::Technology tech,
                                const sim::Transmission& tx, sim::TxOutcome outcome,
                                sim::Tick hol_before, std::int32_t node_id) {
  ledger_.record_attempt(tech, tx, outcome);
  ++step_attempts_;
  if (outcome == sim::TxOutcome::Collision) {
    ++step_collisions_;
    return;
  }
  if (tag == mac::ClassTag::PC1) {
    const DelayRecord record{node_id, hol_before, tx.end};
    pc1_delays_.push_back(record);
    const auto delay = static_cast<double>(record.delay());
    step_delay_sum_ += delay;
    ++step_delay_count_;
    episode_delay_sum_ += delay;
    ++episode_delay_count_;
  }
}

StepMetrics StepAggregator::finish_step(sim::Tick now) {
  StepMetrics m;
  m.step_index = next_step_;

  m.step_delay_us = step_delay_count_ > 0
                        ? step_delay_sum_ / static_cast<double>(step_delay_count_)
                        : prev_step_delay_;  // carry forward through empty steps
  m.avg_delay_us = episode_delay_count_ > 0
                       ? episode_delay_sum_ / static_cast<double>(episode_delay_count_)
                       : 0.0;
  m.delay_trend_us = next_step_ == 0 ? 0.0 : m.step_delay_us - prev_step_delay_;

  window_.emplace_back(step_attempts_, step_collisions_);
  window_attempts_ += step_attempts_;
  window_collisions_ += step_collisions_;
  while (window_.size() > static_cast<std::size_t>(window_steps_)) {
    window_attempts_ -= window_.front().first;
    window_collisions_ -= window_.front().second;
    window_.pop_front();
  }
  m.collision_frac_window =
      window_attempts_ > 0
          ? static_cast<double>(window_collisions_) / static_cast<double>(window_attempts_)
          : 0.0;

  const auto nru = ledger_.success_ticks(mac::Technology::NRU);
  const auto wifi = ledger_.success_ticks(mac::Technology::WiFi);
  if (now > 0) {
    m.airtime_frac_nru = static_cast<double>(nru) / static_cast<double>(now);
    m.airtime_frac_wifi = static_cast<double>(wifi) / static_cast<double>(now);
  }
  if (per_step_jfi_) {
    const std::array<double, 2> delta = {
        static_cast<double>(nru - prev_success_[0]),
        static_cast<double>(wifi - prev_success_[1])};
    m.jfi = jain_fairness_index(delta);
  } else {
    m.jfi = ledger_.jfi_network_pair();
  }
  prev_success_ = {nru, wifi};

  prev_step_delay_ = m.step_delay_us;
  step_delay_sum_ = 0.0;
  step_delay_count_ = 0;
  step_attempts_ = 0;
  step_collisions_ = 0;
  ++next_step_;
  return m;
}

}  // namespace coexsim::metrics
