#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <string_view>
#include <vector>

#include "coexsim/sim/event.hpp"
#include "coexsim/sim/time.hpp"

namespace coexsim::sim {

/// Streaming FNV-1a (64-bit) over raw bytes.
class Fnv1a64 {
 public:
  void update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      hash_ ^= c;
      hash_ *= 1099511628211ull;
    }
  }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 14695981039346656037ull;
};

/// Deterministic discrete-event engine. Events dispatch in (time, sequence)
/// order; the sequence number is assigned at schedule time, so equal-time
/// events dispatch in insertion order. The engine holds no global state:
/// independent engines may run concurrently.
class SimEngine {
 public:
  using Handler = std::function<void(const SimEvent&)>;

  SimEngine() = default;
  explicit SimEngine(Handler handler) : handler_(std::move(handler)) {}

  /// Replace the dispatch handler (used to wire up components constructed
  /// after the engine).
  void set_handler(Handler handler) { handler_ = std::move(handler); }

  Tick now() const { return now_; }

  /// Enqueue an event. Scheduling in the past is a programming error.
  void schedule(SimEvent event);

  /// Dispatch every event with time <= t_end in order, then set the clock to
  /// t_end.
  void run_until(Tick t_end);

  std::uint64_t dispatched_count() const { return dispatched_; }

  /// When enabled, every dispatched event is folded into an FNV-1a hash as a
  /// `tick,seq,kind,node_id` line (newline-terminated) and optionally echoed
  /// to a line sink.
  void set_trace_recording(bool on) { trace_on_ = on; }
  void set_trace_sink(std::function<void(std::string_view)> sink) { trace_sink_ = std::move(sink); }
  std::uint64_t trace_hash() const { return trace_hash_.value(); }

 private:
  struct Later {
    bool operator()(const SimEvent& a, const SimEvent& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.sequence > b.sequence;
    }
  };

  void record_trace(const SimEvent& event);

  Handler handler_;
  std::priority_queue<SimEvent, std::vector<SimEvent>, Later> queue_;
  Tick now_ = 0;
  std::uint64_t next_sequence_ = 0;
  std::uint64_t dispatched_ = 0;
  bool trace_on_ = false;
  Fnv1a64 trace_hash_;
  std::function<void(std::string_view)> trace_sink_;
};

}  // namespace coexsim::sim
