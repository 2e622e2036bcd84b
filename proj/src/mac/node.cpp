#include "coexsim/mac/node.hpp"

#include <algorithm>
#include <stdexcept>

namespace coexsim::mac {

std::string_view to_string(MacPhase phase) {
  switch (phase) {
    case MacPhase::IdleDefer: return "idle-defer";
    case MacPhase::Backoff: return "backoff";
    case MacPhase::Frozen: return "frozen";
    case MacPhase::Reserving: return "reserving";
    case MacPhase::Transmitting: return "transmitting";
  }
  return "unknown";
}

TransmitterNode::TransmitterNode(std::int32_t id, const NodeSetup& setup, sim::RngStream rng)
    : id_(id),
      class_(setup.cls),
      timing_(setup.timing),
      cw_max_selected_(setup.cw_max_selected),
      fixed_window_(setup.fixed_window),
      rng_(rng) {
  cw_current_ = fixed_window_ ? cw_max_selected_ : cw_min_effective();
  backoff_counter_ = draw_backoff(rng_, cw_current_);
}

std::uint32_t TransmitterNode::cw_min_effective() const {
  return std::min(timing_.cw_min_std, cw_max_selected_);
}

void TransmitterNode::set_cw_max(std::uint32_t cw) {
  if (cw == cw_max_selected_) return;
  cw_max_selected_ = cw;
  // The window obeys the new cap immediately; an already-drawn counter is
  // deliberately left to finish (no mid-countdown invalidation).
  cw_current_ = fixed_window_ ? cw : std::min(cw_current_, cw);
}

void TransmitterNode::schedule_expiry(sim::EventKind kind, sim::Tick at) {
  engine_->schedule(sim::SimEvent{at, 0, kind, id_, generation_});
}

void TransmitterNode::start_defer(sim::Tick now) {
  ++generation_;
  phase_ = MacPhase::IdleDefer;
  schedule_expiry(sim::EventKind::DeferExpiry, now + timing_.defer_total());
}

bool TransmitterNode::handle_defer_expiry(std::uint32_t generation, sim::Tick now) {
  if (generation != generation_ || phase_ != MacPhase::IdleDefer) return false;
  countdown_anchor_ = now;
  if (backoff_counter_ == 0) {
    commit(now);
    return true;
  }
  phase_ = MacPhase::Backoff;
  schedule_expiry(sim::EventKind::BackoffExpiry,
                  now + static_cast<sim::Tick>(backoff_counter_) * timing_.slot);
  return false;
}

bool TransmitterNode::handle_backoff_expiry(std::uint32_t generation, sim::Tick now) {
  if (generation != generation_ || phase_ != MacPhase::Backoff) return false;
  backoff_counter_ = 0;
  commit(now);
  return true;
}

void TransmitterNode::commit(sim::Tick now) {
  // Committed transmissions ignore same-tick channel activity; simultaneous
  // seizures must collide no matter the dispatch order.
  ++generation_;
  if (class_.technology == Technology::NRU &&
      now % timing_.slot_boundary_period != 0) {
    phase_ = MacPhase::Reserving;
    engine_->schedule(sim::SimEvent{now, 0, sim::EventKind::RsStart, id_, 0});
  } else {
    phase_ = MacPhase::Transmitting;
    engine_->schedule(sim::SimEvent{now, 0, sim::EventKind::TxStart, id_, 0});
  }
}

void TransmitterNode::handle_channel_busy(sim::Tick now) {
  switch (phase_) {
    case MacPhase::IdleDefer:
      ++generation_;
      phase_ = MacPhase::Frozen;
      break;
    case MacPhase::Backoff: {
      // Credit fully elapsed idle slots; the slot ending exactly at `now` was
      // idle throughout and counts.
      const sim::Tick granted = (now - countdown_anchor_) / timing_.slot;
      if (granted >= backoff_counter_) {
        throw std::logic_error("backoff counter underflow: expiry should have fired");
      }
      backoff_counter_ -= static_cast<std::uint32_t>(granted);
      ++generation_;
      phase_ = MacPhase::Frozen;
      break;
    }
    default:
      break;  // frozen already, or on the air
  }
}

void TransmitterNode::handle_channel_idle(sim::Tick now) {
  if (phase_ == MacPhase::Frozen) start_defer(now);
}

void TransmitterNode::on_outcome(sim::TxOutcome outcome, sim::Tick now) {
  if (outcome == sim::TxOutcome::Success) {
    cw_current_ = fixed_window_ ? cw_max_selected_ : cw_min_effective();
    retry_stage_ = 0;
    hol_timestamp_ = now;  // saturated: next packet is immediately head-of-line
  } else {
    ++retry_stage_;  // retries are unlimited
    cw_current_ = fixed_window_
                      ? cw_max_selected_
                      : std::min(2 * (cw_current_ + 1) - 1, cw_max_selected_);
  }
  backoff_counter_ = draw_backoff(rng_, cw_current_);
  phase_ = MacPhase::Frozen;  // waits for the channel to go idle
}

void TransmitterNode::redraw_fresh() {
  cw_current_ = fixed_window_ ? cw_max_selected_ : cw_min_effective();
  backoff_counter_ = draw_backoff(rng_, cw_current_);
}

}  // namespace coexsim::mac
