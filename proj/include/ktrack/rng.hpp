#pragma once

// Counter-based random numbers: every draw is a pure function of a key and
// a counter, so results do not depend on call order or thread assignment.

#include <array>
#include <cstdint>
#include <utility>

namespace ktrack::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
Counter philox4x32(Counter counter, Key key);

Key make_key(std::uint64_t seed, std::uint32_t stream);
Counter make_counter(std::uint64_t a, std::uint64_t b);

/// Uniform in (0, 1), 53-bit resolution, from the first two output words.
double uniform_open(const Counter& bits);

/// Two independent standard normals via Box-Muller over all four words.
std::pair<double, double> normal_pair(const Counter& bits);

/// Named streams so that unrelated draws keyed on the same (seed, a, b) never
/// share bits.
enum Stream : std::uint32_t {
  kMeasurementNoise = 1,
  kMeasurementFailure = 2,
  kTrajectoryHeading = 3,
  kTrajectorySpeed = 4,
  kTrajectoryAcceleration = 5,
  kTrajectoryPhase = 6,
};

}  // namespace ktrack::rng
