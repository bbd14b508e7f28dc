#include "alab/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace alab {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& c,
                         const std::array<std::uint32_t, 2>& k) {
  std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c[0];
  std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c[2];
  std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

inline double to_unit(std::uint32_t a, std::uint32_t b) {
  std::uint64_t y = (static_cast<std::uint64_t>(a) << 32) | b;
  // (0,1): 53 significant bits plus a half-ulp offset keeps log() finite.
  return static_cast<double>(y >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    philox_round(counter, key);
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return counter;
}

double standard_normal_at(std::uint64_t seed, std::uint32_t realization,
                          const int* coords, int d) {
  if (d < 1 || d > 6) throw std::invalid_argument("standard_normal_at: d must be in [1,6]");
  std::array<std::uint32_t, 4> counter = {realization, 0, 0, 0};
  for (int j = 0; j < d; ++j) {
    int c = coords[j];
    if (c < -32768 || c > 32767)
      throw std::invalid_argument("standard_normal_at: coordinate out of range");
    std::uint32_t biased = static_cast<std::uint32_t>(c + 32768);
    std::uint32_t& lane = counter[1 + j / 2];
    lane |= biased << (16 * (j % 2));
  }
  std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                      static_cast<std::uint32_t>(seed >> 32)};
  auto r = philox4x32(counter, key);
  double u1 = to_unit(r[0], r[1]);
  double u2 = to_unit(r[2], r[3]);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace alab
