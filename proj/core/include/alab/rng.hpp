#pragma once

#include <array>
#include <cstdint>

namespace alab {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Used for
// disorder sampling so that a site's Gaussian value is a pure function of
// (seed, realization index, site coordinates), independent of thread count
// and of the order in which sites are visited.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Standard normal attached to (seed, realization, canonical coordinates).
//
// Counter layout:
//   lane 0: realization index
//   lanes 1-3: coordinates biased by 2^15, two 16-bit fields per lane
// Key: (seed low 32, seed high 32).
// Output mapping: lanes (0,1) and (2,3) are merged into two uint64s, mapped
// to (0,1) via u = (y >> 11) * 2^-53 + 2^-54, then Box-Muller
// z = sqrt(-2 ln u1) * cos(2π u2). Supports d <= 6 and |coordinate| < 2^15.
double standard_normal_at(std::uint64_t seed, std::uint32_t realization,
                          const int* coords, int d);

}  // namespace alab
