#pragma once

#include <cstdint>

namespace coexsim::sim {

/// Simulation time in ticks; 1 tick = 1 microsecond. All protocol durations
/// are exact integer multiples of 1 us, so the clock never drifts.
using Tick = std::uint64_t;

inline constexpr Tick kTicksPerUs = 1;
inline constexpr Tick kTicksPerMs = 1000;
inline constexpr Tick kTicksPerSec = 1000000;

}  // namespace coexsim::sim
