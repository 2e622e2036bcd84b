#include "coexsim/sim/engine.hpp"

#include <charconv>
#include <cstring>
#include <stdexcept>
#include <string>

namespace coexsim::sim {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::DeferExpiry: return "defer-expiry";
    case EventKind::SlotTick: return "slot-tick";
    case EventKind::BackoffExpiry: return "backoff-expiry";
    case EventKind::TxStart: return "tx-start";
    case EventKind::TxEnd: return "tx-end";
    case EventKind::RsStart: return "rs-start";
    case EventKind::StepBoundary: return "step-boundary";
  }
  return "unknown";
}

void SimEngine::schedule(SimEvent event) {
  if (event.time < now_) {
    throw std::logic_error("SimEngine::schedule: event at t=" + std::to_string(event.time) +
                           " is in the past (clock=" + std::to_string(now_) + ")");
  }
  event.sequence = next_sequence_++;
  queue_.push(event);
}

void SimEngine::run_until(Tick t_end) {
  if (t_end < now_) {
    throw std::logic_error("SimEngine::run_until: t_end=" + std::to_string(t_end) +
                           " is before clock=" + std::to_string(now_));
  }
  while (!queue_.empty() && queue_.top().time <= t_end) {
    const SimEvent event = queue_.top();
    queue_.pop();
    now_ = event.time;
    ++dispatched_;
    if (trace_on_) record_trace(event);
    handler_(event);
  }
  now_ = t_end;
}

void SimEngine::record_trace(const SimEvent& event) {
  char buf[96];
  char* p = buf;
  auto put_u64 = [&p](std::uint64_t v) { p = std::to_chars(p, p + 20, v).ptr; };
  put_u64(event.time);
  *p++ = ',';
  put_u64(event.sequence);
  *p++ = ',';
  const std::string_view kind = to_string(event.kind);
  std::memcpy(p, kind.data(), kind.size());
  p += kind.size();
  *p++ = ',';
  p = std::to_chars(p, p + 12, event.node_id).ptr;
  *p++ = '\n';
  const std::string_view line(buf, static_cast<std::size_t>(p - buf));
  trace_hash_.update(line);
  if (trace_sink_) trace_sink_(line);
}

}  // namespace coexsim::sim
