#pragma once

#include <cstdint>
#include <random>

namespace qmpc {

// Every randomized operation takes an explicit stream; a run is reproducible from its seed.
using Rng = std::mt19937_64;

inline bool random_bit(Rng& rng) { return (rng() & 1u) != 0; }

inline uint64_t random_below(Rng& rng, uint64_t bound) {
  return std::uniform_int_distribution<uint64_t>(0, bound - 1)(rng);
}

inline double random_unit(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

// Derives an independent child stream, e.g. one per trial.
inline Rng fork(Rng& rng) {
  std::seed_seq seq{rng(), rng(), rng(), rng()};
  return Rng(seq);
}

}  // namespace qmpc
