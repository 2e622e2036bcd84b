#include "coexsim/mac/system.hpp"

#include <stdexcept>
#include <utility>

namespace coexsim::mac {

std::int32_t MacSystem::add_node(const NodeSetup& setup, sim::RngStream rng) {
  auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(std::make_unique<TransmitterNode>(id, setup, std::move(rng)));
  nodes_.back()->attach(&engine_);
  return id;
}

void MacSystem::start() {
  for (auto& n : nodes_) n->start_defer(engine_.now());
}

void MacSystem::notify_busy() {
  const sim::Tick now = engine_.now();
  for (auto& n : nodes_) n->handle_channel_busy(now);
}

void MacSystem::notify_idle() {
  const sim::Tick now = engine_.now();
  if (reset_each_round_) {
    for (auto& n : nodes_) n->redraw_fresh();
  }
  for (auto& n : nodes_) n->handle_channel_idle(now);
}

void MacSystem::handle(const sim::SimEvent& event) {
  const sim::Tick now = engine_.now();
  switch (event.kind) {
    case sim::EventKind::DeferExpiry: {
      auto& n = node(event.node_id);
      n.handle_defer_expiry(event.generation, now);
      break;
    }
    case sim::EventKind::BackoffExpiry: {
      auto& n = node(event.node_id);
      n.handle_backoff_expiry(event.generation, now);
      break;
    }
    case sim::EventKind::RsStart: {
      // Reservation runs until the next slot-boundary multiple, where the
      // data transmission takes over.
      auto& n = node(event.node_id);
      const sim::Tick period = n.timing().slot_boundary_period;
      const sim::Tick boundary = (now / period + 1) * period;
      const auto edge =
          channel_.begin_transmission(event.node_id, now, boundary, /*is_reservation=*/true);
      engine_.schedule({boundary, 0, sim::EventKind::SlotTick, event.node_id,
                        event.generation});
      if (edge == sim::BusyEdge::BecameBusy) notify_busy();
      break;
    }
    case sim::EventKind::SlotTick: {
      // Boundary reached: swap the reservation for the data transmission.
      engine_.schedule({now, 0, sim::EventKind::TxStart, event.node_id, event.generation});
      break;
    }
    case sim::EventKind::TxStart: {
      auto& n = node(event.node_id);
      const sim::Tick end = now + n.timing().tx_duration;
      sim::BusyEdge edge;
      if (n.phase() == MacPhase::Reserving) {
        const sim::Transmission rs = channel_.convert_reservation(event.node_id, now, end);
        if (sink_ != nullptr) sink_->on_reservation_finished(n, rs);
        edge = sim::BusyEdge::None;
      } else {
        edge = channel_.begin_transmission(event.node_id, now, end, /*is_reservation=*/false);
      }
      n.note_transmitting();
      engine_.schedule({end, 0, sim::EventKind::TxEnd, event.node_id, event.generation});
      if (edge == sim::BusyEdge::BecameBusy) notify_busy();
      break;
    }
    case sim::EventKind::TxEnd: {
      auto& n = node(event.node_id);
      const auto finished = channel_.finish_transmission(event.node_id, now);
      if (sink_ != nullptr) sink_->on_attempt_resolved(n, finished.tx, finished.outcome);
      n.on_outcome(finished.outcome, now);
      // When several frames end at the same tick the first removal already
      // drops the busy flag, so key off the channel state rather than the
      // edge; repeated same-tick notifications are no-ops for nodes that
      // already restarted their defer.
      if (!channel_.busy(now)) notify_idle();
      break;
    }
    case sim::EventKind::StepBoundary:
      break;  // consumed by the environment layer
    default:
      throw std::logic_error("unhandled event kind");
  }
}

}  // namespace coexsim::mac
