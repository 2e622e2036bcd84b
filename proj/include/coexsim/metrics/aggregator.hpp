#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "coexsim/metrics/airtime.hpp"

namespace coexsim::metrics {

/// One successful high-priority delivery: head-of-line instant to successful
/// completion, spanning every defer, freeze, reservation, and retry between.
struct DelayRecord {
  std::int32_t node_id;
  sim::Tick hol_timestamp;
  sim::Tick completion;

  sim::Tick delay() const { return completion - hol_timestamp; }
};

/// Per-decision-step snapshot of every control-relevant quantity.
struct StepMetrics {
  std::uint64_t step_index = 0;
  double jfi = 1.0;                  // fairness over cumulative airtime (or per-step; see flag)
  double step_delay_us = 0.0;        // mean PC1 delay completing in this step (carried forward)
  double avg_delay_us = 0.0;         // running episode mean of PC1 delay
  double collision_frac_window = 0.0;  // collided / resolved attempts over last W steps
  double airtime_frac_nru = 0.0;     // cumulative successful airtime / elapsed time
  double airtime_frac_wifi = 0.0;
  double delay_trend_us = 0.0;       // step_delay(t) - step_delay(t-1), 0 at t=0
};

/// Folds resolved transmissions into per-step metrics. Attempts completing
/// exactly on a step boundary belong to the step that ends there.
class StepAggregator {
 public:
  StepAggregator(int window_steps, bool per_step_jfi)
      : window_steps_(window_steps), per_step_jfi_(per_step_jfi) {}

  void on_attempt(mac::ClassTag tag, mac::Technology tech, const sim::Transmission& tx,
                  sim::TxOutcome outcome, sim::Tick hol_before, std::int32_t node_id);
  void on_reservation(const sim::Transmission& rs) { ledger_.record_reservation(rs); }

  /// Close the step ending at `now` and emit its snapshot.
  StepMetrics finish_step(sim::Tick now);

  const AirtimeLedger& ledger() const { return ledger_; }
  std::span<const DelayRecord> pc1_delays() const { return pc1_delays_; }
  std::uint64_t steps_completed() const { return next_step_; }

 private:
  int window_steps_;
  bool per_step_jfi_;
  AirtimeLedger ledger_;

  std::uint64_t next_step_ = 0;
  double prev_step_delay_ = 0.0;

  // Current-step accumulators.
  double step_delay_sum_ = 0.0;
  std::uint64_t step_delay_count_ = 0;
  std::uint64_t step_attempts_ = 0;
  std::uint64_t step_collisions_ = 0;

  // Episode accumulators.
  double episode_delay_sum_ = 0.0;
  std::uint64_t episode_delay_count_ = 0;
  std::vector<DelayRecord> pc1_delays_;

  // Last-W-steps attempt/collision counts.
  std::deque<std::pair<std::uint64_t, std::uint64_t>> window_;
  std::uint64_t window_attempts_ = 0;
  std::uint64_t window_collisions_ = 0;

  // Per-step airtime deltas (only needed for the per-step fairness flag).
  std::array<std::uint64_t, 2> prev_success_{};
};

}  // namespace coexsim::metrics
