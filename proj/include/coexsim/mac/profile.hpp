#pragma once

#include <cstdint>
#include <stdexcept>
#include <string_view>

#include "coexsim/sim/time.hpp"

namespace coexsim::mac {

enum class ClassTag : std::uint8_t { PC1, PC3 };
enum class Technology : std::uint8_t { NRU, WiFi };

inline std::string_view to_string(Technology t) { return t == Technology::NRU ? "nru" : "wifi"; }
inline std::string_view to_string(ClassTag c) { return c == ClassTag::PC1 ? "pc1" : "pc3"; }

/// Channel-access priority class. PC1 is high priority (strict delay
/// requirements), PC3 low priority. In the default scenario PC1 maps to the
/// NR-U gNB and PC3 to the Wi-Fi APs.
struct PriorityClass {
  ClassTag tag = ClassTag::PC3;
  Technology technology = Technology::WiFi;
};

/// Per-class MAC timing. Defaults follow the class-1 / class-3 access
/// parameters (9 us slot, 16 us SIFS); everything is configurable.
struct MacTimingProfile {
  sim::Tick slot = 9;
  sim::Tick sifs = 16;
  std::uint32_t defer_slots = 1;        // m_p
  sim::Tick fixed_defer = 16;           // T_f (equal to SIFS in both stacks)
  std::uint32_t cw_min_std = 3;
  sim::Tick tx_duration = 500;
  sim::Tick slot_boundary_period = 500; // NR-U data alignment grid

  /// Required continuous idle time before the backoff countdown may run:
  /// AIFS for EDCA, T_f + m_p * slot for LBT. Identical formula in both.
  sim::Tick defer_total() const { return fixed_defer + defer_slots * slot; }
};

inline MacTimingProfile default_profile_pc1() {
  return MacTimingProfile{9, 16, 1, 16, 3, 500, 500};
}

inline MacTimingProfile default_profile_pc3() {
  return MacTimingProfile{9, 16, 3, 16, 15, 500, 500};
}

inline constexpr int kCwActionCount = 7;  // per-class CW actions {0..6}

/// Maximum contention window selected by action a: 2^(a+c) - 1, with c = 0
/// for PC1 and c = 4 for PC3.
inline std::uint32_t cw_from_action(int action, ClassTag tag) {
  if (action < 0 || action >= kCwActionCount) {
    throw std::invalid_argument("cw action out of range [0,6]");
  }
  const int c = (tag == ClassTag::PC1) ? 0 : 4;
  return (1u << (action + c)) - 1u;
}

}  // namespace coexsim::mac
