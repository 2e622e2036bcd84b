#include "coexsim/metrics/airtime.hpp"

#include <algorithm>

#include "coexsim/metrics/jfi.hpp"

namespace coexsim::metrics {

void AirtimeLedger::record_attempt(mac::Technology tech, const sim::Transmission& tx,
                                   sim::TxOutcome outcome) {
  ++attempts_;
  if (outcome == sim::TxOutcome::Success) {
    success_[static_cast<std::size_t>(tech)] += tx.end - tx.start;
    history_.push_back({tx.start, tx.end, Category::Success});
  } else {
    ++collisions_;
    history_.push_back({tx.start, tx.end, Category::Collision});
  }
}

void AirtimeLedger::record_reservation(const sim::Transmission& rs) {
  history_.push_back({rs.start, rs.end, Category::Reservation});
}

double AirtimeLedger::jfi_network_pair() const {
  const std::array<double, 2> shares = {static_cast<double>(success_[0]),
                                        static_cast<double>(success_[1])};
  return jain_fairness_index(shares);
}

AirtimePartition AirtimeLedger::partition(sim::Tick horizon,
                                          std::span<const sim::Transmission> in_flight) const {
  // Boundary sweep: +1/-1 per category at interval edges, highest active
  // category wins each elementary segment.
  struct Edge {
    sim::Tick at;
    int category;  // index 1..3
    int delta;
  };
  std::vector<Edge> edges;
  auto add = [&](sim::Tick start, sim::Tick end, Category cat) {
    if (start >= horizon) return;
    end = std::min(end, horizon);
    if (end <= start) return;
    edges.push_back({start, static_cast<int>(cat), +1});
    edges.push_back({end, static_cast<int>(cat), -1});
  };
  for (const auto& item : history_) add(item.start, item.end, item.category);
  for (const auto& tx : in_flight) {
    add(tx.start, tx.end,
        tx.is_reservation ? Category::Reservation
                          : (tx.collided ? Category::Collision : Category::Success));
  }
  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return a.at < b.at; });

  AirtimePartition part;
  std::array<int, 4> active{};  // active[1..3] per category
  sim::Tick cursor = 0;
  std::uint64_t covered = 0;
  std::size_t i = 0;
  while (i < edges.size()) {
    const sim::Tick at = edges[i].at;
    if (at > cursor) {
      const std::uint64_t span = at - cursor;
      if (active[3] > 0) {
        part.collision_ticks += span;
        covered += span;
      } else if (active[2] > 0) {
        part.success_ticks += span;
        covered += span;
      } else if (active[1] > 0) {
        part.rs_ticks += span;
        covered += span;
      }
      cursor = at;
    }
    while (i < edges.size() && edges[i].at == at) {
      active[static_cast<std::size_t>(edges[i].category)] += edges[i].delta;
      ++i;
    }
  }
  part.idle_ticks = horizon - covered;
  return part;
}

}  // namespace coexsim::metrics
