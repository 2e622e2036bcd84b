#pragma once

#include <cstdint>
#include <random>

namespace coexsim::sim {

/// splitmix64 finalizer, used to derive decorrelated substream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Deterministic seeded random stream. A (seed, stream) pair yields a
/// bit-identical draw sequence on every platform: the engine is mt19937_64
/// (fully specified by the standard) and all distribution mapping is done by
/// hand instead of through std distributions, whose output is
/// implementation-defined.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}

  RngStream(std::uint64_t seed, std::uint64_t stream)
      : engine_(splitmix64(splitmix64(seed) ^
                           splitmix64(stream * 0x9e3779b97f4a7c15ull + 0x632be59bd9b4e019ull))) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, bound] inclusive. Consumes exactly one draw.
  /// Multiply-shift mapping; bias is < bound / 2^64, negligible for the
  /// contention-window ranges used here (bound <= 1023).
  std::uint64_t next_below_inclusive(std::uint64_t bound) {
    const std::uint64_t n = bound + 1;
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(n)) >> 64);
  }

  /// Uniform double in [0, 1). Consumes exactly one draw.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace coexsim::sim
