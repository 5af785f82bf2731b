// Counter-based random number generation (Philox4x32-10).
//
// Every draw in the library is a pure function of (seed, stream, a, b, c).
// There is no generator state, so realizations are reproducible bit-for-bit
// regardless of evaluation order, chunking, or thread count.

#pragma once

#include <array>
#include <cstdint>

#include <cmath>

namespace ersi {

namespace rng_detail {

inline void mulhilo32(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                      std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace rng_detail

// One 10-round Philox4x32 block: 128 bits of counter, 64 bits of key.
inline std::array<std::uint32_t, 4> philox4x32(std::uint64_t key,
                                               std::uint32_t c0, std::uint32_t c1,
                                               std::uint32_t c2, std::uint32_t c3) {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  std::uint32_t x0 = c0, x1 = c1, x2 = c2, x3 = c3;
  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);

  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    rng_detail::mulhilo32(kMul0, x0, hi0, lo0);
    rng_detail::mulhilo32(kMul1, x2, hi1, lo1);
    const std::uint32_t y0 = hi1 ^ x1 ^ k0;
    const std::uint32_t y1 = lo1;
    const std::uint32_t y2 = hi0 ^ x3 ^ k1;
    const std::uint32_t y3 = lo0;
    x0 = y0;
    x1 = y1;
    x2 = y2;
    x3 = y3;
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return {x0, x1, x2, x3};
}

// Independent draw streams. Distinct tags guarantee that e.g. source noise
// and measurement noise never share counters even under the same seed.
enum class RngStream : std::uint32_t {
  kSourceNoise = 1,
  kMeasurementNoise = 2,
  kProbeSurvey = 3,
  kTest = 100,
};

namespace rng_detail {

inline double to_unit_open(std::uint32_t hi, std::uint32_t lo) {
  // 53-bit mantissa, shifted into (0,1): never exactly 0 or 1.
  const std::uint64_t bits =
      (static_cast<std::uint64_t>(hi) << 21) ^ (static_cast<std::uint64_t>(lo) >> 11);
  const std::uint64_t mant = bits & ((std::uint64_t(1) << 53) - 1);
  return (static_cast<double>(mant) + 0.5) * 0x1p-53;
}

}  // namespace rng_detail

// Standard normal draw keyed on (seed, stream, a, b, c). Box-Muller on two
// uniforms from one Philox block; the sine branch is discarded.
inline double normal_draw(std::uint64_t seed, RngStream stream, std::uint32_t a,
                          std::uint32_t b, std::uint32_t c) {
  const auto r = philox4x32(seed, a, b, c, static_cast<std::uint32_t>(stream));
  const double u1 = rng_detail::to_unit_open(r[0], r[1]);
  const double u2 = rng_detail::to_unit_open(r[2], r[3]);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Uniform draw in [-1, 1].
inline double uniform_pm1_draw(std::uint64_t seed, RngStream stream, std::uint32_t a,
                               std::uint32_t b, std::uint32_t c) {
  const auto r = philox4x32(seed, a, b, c, static_cast<std::uint32_t>(stream));
  return 2.0 * rng_detail::to_unit_open(r[0], r[1]) - 1.0;
}

// Uniform draw in [0, 1).
inline double uniform01_draw(std::uint64_t seed, RngStream stream, std::uint32_t a,
                             std::uint32_t b, std::uint32_t c) {
  const auto r = philox4x32(seed, a, b, c, static_cast<std::uint32_t>(stream));
  return rng_detail::to_unit_open(r[0], r[1]);
}

}  // namespace ersi
