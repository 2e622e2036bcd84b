#pragma once

#include <memory>
#include <vector>

#include "coexsim/mac/node.hpp"
#include "coexsim/sim/channel.hpp"
#include "coexsim/sim/engine.hpp"

namespace coexsim::mac {

/// Receives resolved channel activity; implemented by the metrics layer.
class OutcomeSink {
 public:
  virtual ~OutcomeSink() = default;
  virtual void on_attempt_resolved(const TransmitterNode& node, const sim::Transmission& tx,
                                   sim::TxOutcome outcome) = 0;
  virtual void on_reservation_finished(const TransmitterNode& node,
                                       const sim::Transmission& rs) = 0;
};

/// Owns the transmitter population and drives their state machines from
/// engine events. Busy/idle notifications fan out in ascending node id, which
/// keeps runs deterministic.
class MacSystem {
 public:
  MacSystem(sim::SimEngine& engine, sim::Channel& channel, OutcomeSink* sink)
      : engine_(engine), channel_(channel), sink_(sink) {}

  std::int32_t add_node(const NodeSetup& setup, sim::RngStream rng);

  /// Kick off contention at the current clock (channel must be idle).
  void start();

  /// Engine event handler; StepBoundary events are ignored here.
  void handle(const sim::SimEvent& event);

  /// Instantaneous, error-free carrier sense on behalf of a node.
  bool sense_busy(std::int32_t /*node_id*/) const { return channel_.busy(engine_.now()); }

  TransmitterNode& node(std::int32_t id) { return *nodes_[static_cast<std::size_t>(id)]; }
  const TransmitterNode& node(std::int32_t id) const {
    return *nodes_[static_cast<std::size_t>(id)];
  }
  std::size_t node_count() const { return nodes_.size(); }

  /// Test mode: after every busy period all counters are redrawn from fresh
  /// windows, making each contention round an independent first attempt.
  void set_reset_each_round(bool on) { reset_each_round_ = on; }

 private:
  void notify_busy();
  void notify_idle();

  sim::SimEngine& engine_;
  sim::Channel& channel_;
  OutcomeSink* sink_;
  std::vector<std::unique_ptr<TransmitterNode>> nodes_;
  bool reset_each_round_ = false;
};

}  // namespace coexsim::mac
