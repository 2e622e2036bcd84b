#pragma once

#include <cstdint>

#include "coexsim/mac/profile.hpp"
#include "coexsim/sim/channel.hpp"
#include "coexsim/sim/engine.hpp"
#include "coexsim/sim/rng.hpp"
#include "coexsim/sim/time.hpp"

namespace coexsim::mac {

enum class MacPhase : std::uint8_t {
  IdleDefer,     // AIFS / defer window running
  Backoff,       // counting down idle slots
  Frozen,        // channel busy; counter held
  Reserving,     // NR-U reservation signal on the air
  Transmitting,  // data on the air
};

std::string_view to_string(MacPhase phase);

/// Uniform integer in [0, cw] inclusive; consumes exactly one RNG draw.
inline std::uint32_t draw_backoff(sim::RngStream& rng, std::uint32_t cw) {
  return static_cast<std::uint32_t>(rng.next_below_inclusive(cw));
}

struct NodeSetup {
  PriorityClass cls;
  MacTimingProfile timing;
  std::uint32_t cw_max_selected = 15;
  /// false: binary exponential backoff between cw_min_effective and
  /// cw_max_selected. true: cw_current pinned to cw_max_selected.
  bool fixed_window = false;
};

/// One saturated transmitter: a Wi-Fi EDCA access class or an NR-U LBT
/// priority class. Both share the defer + slotted-countdown machinery; they
/// differ only at commit time, where NR-U off a slot boundary reserves the
/// channel until the next boundary before sending data.
///
/// The countdown is event-batched: a single expiry event is scheduled at
/// defer_end + counter * slot, and when the channel turns busy the number of
/// fully elapsed idle slots is credited to the counter. Expiry events are
/// invalidated by bumping a generation token rather than dequeued.
class TransmitterNode {
 public:
  TransmitterNode(std::int32_t id, const NodeSetup& setup, sim::RngStream rng);

  void attach(sim::SimEngine* engine) { engine_ = engine; }

  std::int32_t id() const { return id_; }
  const PriorityClass& priority_class() const { return class_; }
  const MacTimingProfile& timing() const { return timing_; }
  MacPhase phase() const { return phase_; }
  std::uint32_t backoff_counter() const { return backoff_counter_; }
  std::uint32_t cw_current() const { return cw_current_; }
  std::uint32_t cw_max_selected() const { return cw_max_selected_; }
  std::uint32_t retry_stage() const { return retry_stage_; }
  sim::Tick hol_timestamp() const { return hol_timestamp_; }

  /// Smaller of the standard minimum window and the selected maximum; when
  /// the agent selects a window below the standard minimum, the selected
  /// window is used throughout and doubling has no room.
  std::uint32_t cw_min_effective() const;

  /// Agent control. Takes effect for future draws only; an in-progress
  /// countdown finishes unchanged.
  void set_cw_max(std::uint32_t cw);

  // --- driven by MacSystem ---------------------------------------------

  /// Begin the defer window at `now` (channel known idle).
  void start_defer(sim::Tick now);

  /// Returns true if the node committed to transmit at `now`; stale events
  /// (superseded generation or wrong phase) return false.
  bool handle_defer_expiry(std::uint32_t generation, sim::Tick now);
  bool handle_backoff_expiry(std::uint32_t generation, sim::Tick now);

  void handle_channel_busy(sim::Tick now);
  void handle_channel_idle(sim::Tick now);

  /// Apply a resolved attempt: reset or double the window, restamp the
  /// head-of-line packet on success (saturated queue), redraw the counter.
  void on_outcome(sim::TxOutcome outcome, sim::Tick now);

  void note_transmitting() { phase_ = MacPhase::Transmitting; }

  /// Test support: redraw the counter from a fresh window, as if the packet
  /// were the node's first attempt. Used by the reset-each-round mode.
  void redraw_fresh();

 private:
  void commit(sim::Tick now);
  void schedule_expiry(sim::EventKind kind, sim::Tick at);

  std::int32_t id_;
  PriorityClass class_;
  MacTimingProfile timing_;
  std::uint32_t cw_max_selected_;
  bool fixed_window_;

  sim::SimEngine* engine_ = nullptr;
  sim::RngStream rng_;

  MacPhase phase_ = MacPhase::Frozen;
  std::uint32_t backoff_counter_ = 0;
  std::uint32_t cw_current_ = 0;
  std::uint32_t retry_stage_ = 0;
  std::uint32_t generation_ = 0;
  sim::Tick countdown_anchor_ = 0;  // defer end; decrements land at anchor + i*slot
  sim::Tick hol_timestamp_ = 0;
};

}  // namespace coexsim::mac
