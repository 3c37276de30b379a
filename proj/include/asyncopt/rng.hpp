#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace asyncopt {

/// splitmix64 step; used to derive independent stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic sub-stream seed for (seed, stream).
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64(s);
  s = a ^ (stream * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
  return splitmix64(s);
}

/// Maps a raw 64-bit draw onto [0, n) with the multiply-shift reduction.
/// Unlike std::uniform_int_distribution the result is identical on every
/// platform.
inline std::uint64_t bounded(std::uint64_t raw, std::uint64_t n) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(raw) * n) >> 64);
}

inline std::uint64_t draw_bounded(std::mt19937_64& rng, std::uint64_t n) {
  return bounded(rng(), n);
}

/// Uniform double in [0,1) from the top 53 bits; platform-stable.
inline double draw_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller on platform-stable uniforms.
inline double draw_normal(std::mt19937_64& rng) {
  double u1 = 0.0;
  do {
    u1 = draw_unit(rng);
  } while (u1 <= 0.0);
  const double u2 = draw_unit(rng);
  constexpr double two_pi = 6.283185307179586476925287;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

}  // namespace asyncopt
