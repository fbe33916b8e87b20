#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace wci {

/// Stateless 64-bit mixer (splitmix64 finalizer). Used for deriving
/// independent child seeds from a master seed so that adding a new
/// stream never perturbs an existing one.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_str(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Seed for replication `rep` of experiment (`tag`, `n`) under `master`.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::uint64_t n = 0, std::uint64_t rep = 0) {
  std::uint64_t s = mix64(master ^ hash_str(tag));
  s = mix64(s ^ n);
  return mix64(s ^ rep);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(mix64(seed)); }

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline int poisson_draw(double mean, Rng& rng) {
  return std::poisson_distribution<int>(mean)(rng);
}

}  // namespace wci
