#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace cfo {

using Rng = std::mt19937_64;

// Stateless mixer used to turn (seed, stream name, index) into an independent
// seed, so each named random stream can be drawn without perturbing the others.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::string_view stream,
                                    std::uint64_t index = 0) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : stream) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return splitmix64(splitmix64(base ^ h) + index);
}

inline Rng make_rng(std::uint64_t seed) { return Rng{seed}; }

}  // namespace cfo
