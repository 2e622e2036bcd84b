#pragma once

#include <cstdint>
#include <string_view>

#include "coexsim/sim/time.hpp"

namespace coexsim::sim {

enum class EventKind : std::uint8_t {
  DeferExpiry,    // AIFS / LBT defer window elapsed
  SlotTick,       // NR numerology slot boundary wake-up (reservation -> data)
  BackoffExpiry,  // backoff counter reached zero
  TxStart,        // data transmission registers on the channel
  TxEnd,          // data transmission leaves the channel and resolves
  RsStart,        // reservation signal registers on the channel
  StepBoundary,   // environment decision-step marker
};

std::string_view to_string(EventKind kind);

struct SimEvent {
  Tick time = 0;
  std::uint64_t sequence = 0;  // insertion order; equal-time events dispatch FIFO
  EventKind kind = EventKind::StepBoundary;
  std::int32_t node_id = -1;   // -1 for events not tied to a node
  std::uint32_t generation = 0;  // timer-cancellation token for expiry events
};

}  // namespace coexsim::sim
