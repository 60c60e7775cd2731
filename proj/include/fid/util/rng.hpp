// Deterministic RNG streams.  Replica k of a run seeded with master seed s
// always uses the same generator state, regardless of how many worker
// threads execute the run.
#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace fid {

using Rng = std::mt19937_64;

// splitmix64 step; good avalanche, used only to derive stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Independent stream for (master_seed, index).  Two distinct indices give
// generators whose states share no structure beyond splitmix64 mixing.
inline Rng replica_stream(std::uint64_t master_seed, std::uint64_t index) {
  std::uint64_t s = master_seed ^ (0x632be59bd9b4e019ULL * (index + 1));
  std::uint64_t a = splitmix64(s);
  std::uint64_t b = splitmix64(s);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return Rng(seq);
}

// Fresh distribution per call: normal_distribution caches a second deviate,
// and shared state would break replica-level determinism.
inline double std_normal(Rng& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  return n01(rng);
}

// Complex standard normal: Re and Im each N(0, 1/2), so E|z|^2 = 1.
inline std::complex<double> complex_normal(Rng& rng) {
  constexpr double half = 0.7071067811865476;  // 1/sqrt(2)
  double re = std_normal(rng);
  double im = std_normal(rng);
  return {re * half, im * half};
}

}  // namespace fid
