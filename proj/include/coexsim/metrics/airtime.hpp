#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "coexsim/mac/profile.hpp"
#include "coexsim/sim/channel.hpp"
#include "coexsim/sim/time.hpp"

namespace coexsim::metrics {

/// Disjoint classification of every simulated tick. Where interval categories
/// overlap, attribution precedence is collision > success > reservation >
/// idle, so the four parts always sum exactly to the horizon.
struct AirtimePartition {
  std::uint64_t success_ticks = 0;
  std::uint64_t collision_ticks = 0;
  std::uint64_t rs_ticks = 0;
  std::uint64_t idle_ticks = 0;

  std::uint64_t total() const {
    return success_ticks + collision_ticks + rs_ticks + idle_ticks;
  }
};

/// Cumulative airtime accounting for one episode: per-network successful
/// airtime (the fairness resource), attempt/collision counts, and the full
/// interval history for the conservation audit.
class AirtimeLedger {
 public:
  void record_attempt(mac::Technology tech, const sim::Transmission& tx, sim::TxOutcome outcome);
  void record_reservation(const sim::Transmission& rs);

  std::uint64_t success_ticks(mac::Technology tech) const {
    return success_[static_cast<std::size_t>(tech)];
  }
  std::uint64_t attempts() const { return attempts_; }
  std::uint64_t collisions() const { return collisions_; }

  /// Fairness over the two cumulative successful-airtime totals (NR-U,
  /// Wi-Fi). 1 when nothing has been transmitted yet.
  double jfi_network_pair() const;

  /// Exact tick partition of [0, horizon). `in_flight` supplies transmissions
  /// still on the air at the horizon (clipped and classified by their current
  /// collision flag).
  AirtimePartition partition(sim::Tick horizon,
                             std::span<const sim::Transmission> in_flight = {}) const;

 private:
  enum class Category : std::uint8_t { Reservation = 1, Success = 2, Collision = 3 };
  struct Interval {
    sim::Tick start;
    sim::Tick end;
    Category category;
  };

  std::vector<Interval> history_;
  std::array<std::uint64_t, 2> success_{};  // indexed by Technology
  std::uint64_t attempts_ = 0;
  std::uint64_t collisions_ = 0;
};

}  // namespace coexsim::metrics
