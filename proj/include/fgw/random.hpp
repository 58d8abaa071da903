#pragma once

#include <cstdint>
#include <random>

#include "fgw/flo_core.hpp"

namespace fgw {

using Rng = std::mt19937_64;

/// Independent generator for stream `stream` of a run seeded with `seed`.
/// Streams are keyed by position (chunk, group, grid point), never by worker,
/// so results do not depend on how work is scheduled.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), 0x5eedu};
  return Rng(seq);
}

/// Mixes several integers into one seed (splitmix64 finalizer).
inline std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
  std::uint64_t z = seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Antisymmetric matrix with independent standard-normal upper-triangle entries.
inline SkewMatrix random_skew(int dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m = Matrix::Zero(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = r + 1; c < dim; ++c) {
      m(r, c) = normal(rng);
      m(c, r) = -m(r, c);
    }
  }
  return SkewMatrix::antisymmetrized(m);
}

inline FockString random_fock(int modes, Rng& rng) {
  std::bernoulli_distribution coin(0.5);
  std::vector<std::uint8_t> bits(modes);
  for (auto& b : bits) b = coin(rng) ? 1 : 0;
  return FockString(std::move(bits));
}

}  // namespace fgw
