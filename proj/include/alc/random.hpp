#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace alc {

// splitmix64 finalizer; good avalanche, cheap.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic sub-stream derivation: every consumer of randomness mixes the
// scenario seed with its own salts (tick index, lane id, sample index, ...) so
// streams are independent of evaluation order.
constexpr std::uint64_t derive_seed(std::uint64_t base,
                                    std::initializer_list<std::uint64_t> salts) {
  std::uint64_t h = mix64(base);
  for (std::uint64_t s : salts) h = mix64(h ^ s);
  return h;
}

inline std::mt19937_64 make_rng(std::uint64_t base,
                                std::initializer_list<std::uint64_t> salts) {
  return std::mt19937_64(derive_seed(base, salts));
}

// Salt namespaces for the perception stand-in.
namespace rng_salt {
inline constexpr std::uint64_t kNoiseField = 0x51a5e001;
inline constexpr std::uint64_t kDropout = 0x51a5e002;
inline constexpr std::uint64_t kMcGeneric = 0x51a5e003;
inline constexpr std::uint64_t kConfFlicker = 0x51a5e004;
}  // namespace rng_salt

}  // namespace alc
