#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "coexsim/sim/time.hpp"

namespace coexsim::sim {

enum class TxOutcome : std::uint8_t { Success, Collision };

/// One transmission (data or reservation signal) occupying [start, end).
struct Transmission {
  std::int32_t node_id = -1;
  Tick start = 0;
  Tick end = 0;
  bool is_reservation = false;
  bool collided = false;
};

enum class BusyEdge : std::uint8_t { None, BecameBusy, BecameIdle };

/// Single shared channel with perfect, instantaneous carrier sensing.
///
/// Collision rule: a data transmission is destroyed iff another node's data
/// transmission overlaps it, or another node's reservation signal overlaps
/// it. Reservation signals carry no payload and never resolve. Intervals are
/// half-open, so a transmission ending at t does not overlap one starting at
/// t. Overlap flags are maintained incrementally: every registration marks
/// the affected active transmissions, which is complete because the
/// later-starting member of any overlapping pair always registers while the
/// earlier one is still active.
class Channel {
 public:
  /// Busy at the current instant: some active transmission extends past now.
  bool busy(Tick now) const;

  /// Register a transmission over [now, end). Returns the busy edge produced.
  BusyEdge begin_transmission(std::int32_t node_id, Tick now, Tick end, bool is_reservation);

  /// Atomically replace the node's active reservation signal with a data
  /// transmission over [now, data_end); no intermediate idle edge is
  /// produced. Returns the finished reservation interval.
  Transmission convert_reservation(std::int32_t node_id, Tick now, Tick data_end);

  /// Remove the node's data transmission at its end time and resolve it.
  struct Finished {
    Transmission tx;
    TxOutcome outcome;
    BusyEdge edge;
  };
  Finished finish_transmission(std::int32_t node_id, Tick now);

  std::span<const Transmission> active_transmissions() const { return active_; }

 private:
  void mark_overlaps(Transmission& incoming, Tick now);
  BusyEdge update_busy_state(Tick now);
  std::vector<Transmission>::iterator find_active(std::int32_t node_id, bool is_reservation);

  std::vector<Transmission> active_;
  bool busy_state_ = false;
};

}  // namespace coexsim::sim
