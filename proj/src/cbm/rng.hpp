#pragma once
#include <cmath>
#include <cstdint>
#include <initializer_list>

// Deterministic RNG building blocks: splitmix64 for seeding and stream
// derivation, xoshiro128++ for the sampling streams.  <random> distributions
// are avoided on purpose: their output is implementation-defined and the
// sampler promises bit-identical results across platforms and compilers.
namespace cbm {

struct SplitMix64 {
  uint64_t state;

  explicit SplitMix64(uint64_t seed) : state(seed) {}

  uint64_t next() {
    uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // uniform double in [0,1), 53 random bits
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }
};

// Fold a sequence of tags into a fresh stream seed.  Used everywhere a
// sub-stream is needed (per chain, per tile, per pass, ...) so that no two
// logical streams ever share state.
inline uint64_t derive_seed(uint64_t seed, std::initializer_list<uint64_t> tags) {
  SplitMix64 sm(seed);
  uint64_t s = sm.next();
  for (uint64_t t : tags) {
    SplitMix64 m(s ^ (t + 0x9E3779B97F4A7C15ull));
    s = m.next();
  }
  return s;
}

struct Xoshiro128pp {
  uint32_t s[4];

  static uint32_t rotl(uint32_t x, int k) { return (x << k) | (x >> (32 - k)); }

  static Xoshiro128pp from_seed(uint64_t seed) {
    SplitMix64 sm(seed);
    uint64_t a = sm.next(), b = sm.next();
    Xoshiro128pp r;
    r.s[0] = uint32_t(a);
    r.s[1] = uint32_t(a >> 32);
    r.s[2] = uint32_t(b);
    r.s[3] = uint32_t(b >> 32);
    if (!(r.s[0] | r.s[1] | r.s[2] | r.s[3])) r.s[0] = 1;  // all-zero state is invalid
    return r;
  }

  uint32_t next() {
    uint32_t result = rotl(s[0] + s[3], 7) + s[0];
    uint32_t t = s[1] << 9;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 11);
    return result;
  }

  // uniform float in [0,1): 24 random mantissa bits, exact in binary32
  float uniform() { return float(next() >> 8) * 0x1.0p-24f; }

  // uniform double in [0,1), 53 random bits
  double uniform64() {
    uint64_t hi = next(), lo = next();
    return double(((hi << 32) | lo) >> 11) * 0x1.0p-53;
  }
};

// Seeded standard normal via Box-Muller.  Only the optional per-qubit noise
// model uses this; it is never on the acceptance path, so the libm calls do
// not affect the cross-platform determinism story.
inline double gaussian(SplitMix64& sm) {
  double u1 = 1.0 - sm.uniform();  // (0,1]
  double u2 = sm.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

}  // namespace cbm
