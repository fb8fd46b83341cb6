#pragma once

#include <random>

#include "glwalk/types.hpp"

namespace glwalk {

using Rng = std::mt19937_64;

// splitmix64 finalizer (public-domain constants); used purely as a mixing
// function to derive independent (value, stream) pairs.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Derive the seed of worker / subsystem `salt` from a base seed.  Derivation
// is deterministic and collision-resistant for the handful of salts in play.
inline Seed derive(Seed s, std::uint64_t salt) {
  Seed out;
  out.value = mix64(s.value ^ mix64(salt));
  out.stream = mix64(s.stream + 0x632be59bd9b4e019ull * (salt + 1));
  return out;
}

inline Rng make_rng(Seed s) {
  std::seed_seq seq{static_cast<std::uint32_t>(s.value), static_cast<std::uint32_t>(s.value >> 32),
                    static_cast<std::uint32_t>(s.stream),
                    static_cast<std::uint32_t>(s.stream >> 32)};
  return Rng(seq);
}

// Subsystem salts.  Fixed constants so documented derivations never shift
// between releases; partition workers add their index on top.
namespace salt {
inline constexpr std::uint64_t kHaarInner = 0x01;    // inner Haar sampling streams
inline constexpr std::uint64_t kChamberOuter = 0x02; // outer chamber draws
inline constexpr std::uint64_t kWalkTrials = 0x03;   // per-trial walk streams
inline constexpr std::uint64_t kPilot = 0x04;        // pilot runs sizing inner MC
inline constexpr std::uint64_t kDirections = 0x05;   // lambda-grid direction sets
}  // namespace salt

}  // namespace glwalk
