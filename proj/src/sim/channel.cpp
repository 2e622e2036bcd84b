#include "coexsim/sim/channel.hpp"

#include <algorithm>
#include <stdexcept>

namespace coexsim::sim {

bool Channel::busy(Tick now) const {
  return std::any_of(active_.begin(), active_.end(),
                     [now](const Transmission& tx) { return tx.end > now; });
}

void Channel::mark_overlaps(Transmission& incoming, Tick now) {
  for (Transmission& other : active_) {
    if (other.node_id == incoming.node_id || other.end <= now) continue;
    if (!incoming.is_reservation && !other.is_reservation) {
      incoming.collided = true;
      other.collided = true;
    } else if (!incoming.is_reservation && other.is_reservation) {
      incoming.collided = true;
    } else if (incoming.is_reservation && !other.is_reservation) {
      other.collided = true;
    }
    // reservation over reservation: no payload on either side
  }
}

BusyEdge Channel::update_busy_state(Tick now) {
  const bool b = busy(now);
  if (b == busy_state_) return BusyEdge::None;
  busy_state_ = b;
  return b ? BusyEdge::BecameBusy : BusyEdge::BecameIdle;
}

BusyEdge Channel::begin_transmission(std::int32_t node_id, Tick now, Tick end,
                                     bool is_reservation) {
  if (end <= now) throw std::logic_error("Channel: empty transmission interval");
  Transmission tx{node_id, now, end, is_reservation, false};
  mark_overlaps(tx, now);
  active_.push_back(tx);
  return update_busy_state(now);
}

std::vector<Transmission>::iterator Channel::find_active(std::int32_t node_id,
                                                         bool is_reservation) {
  auto it = std::find_if(active_.begin(), active_.end(), [&](const Transmission& tx) {
    return tx.node_id == node_id && tx.is_reservation == is_reservation;
  });
  if (it == active_.end()) throw std::logic_error("Channel: no matching active transmission");
  return it;
}

Transmission Channel::convert_reservation(std::int32_t node_id, Tick now, Tick data_end) {
  auto it = find_active(node_id, /*is_reservation=*/true);
  const Transmission reservation = *it;
  active_.erase(it);
  Transmission tx{node_id, now, data_end, false, false};
  mark_overlaps(tx, now);
  active_.push_back(tx);
  // The channel stays occupied through the swap, so no edge can result.
  busy_state_ = true;
  return reservation;
}

Channel::Finished Channel::finish_transmission(std::int32_t node_id, Tick now) {
  auto it = find_active(node_id, /*is_reservation=*/false);
  const Transmission tx = *it;
  active_.erase(it);
  const TxOutcome outcome = tx.collided ? TxOutcome::Collision : TxOutcome::Success;
  return Finished{tx, outcome, update_busy_state(now)};
}

}  // namespace coexsim::sim
