#ifndef RAMAT_RNG_HPP
#define RAMAT_RNG_HPP

#include <cmath>
#include <cstdint>

namespace ramat {

// splitmix64 finalizer; bijective on 64-bit inputs.
inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

// Derives the seed for replication `index` from a master seed. Distinct
// indices map to distinct seeds (the finalizer is a bijection applied to
// distinct inputs), so replication streams never collide.
inline std::uint64_t seed_for(std::uint64_t master_seed, std::uint64_t index) {
  return mix64(master_seed + (index + 1) * 0x9e3779b97f4a7c15ULL);
}

// xoshiro256** by Blackman & Vigna, seeded through splitmix64. Chosen over
// std:: distributions so that streams are identical on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) {
      sm += 0x9e3779b97f4a7c15ULL;
      word = mix64(sm);
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_u01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Exponential variate by inverse transform.
  double next_exponential(double rate) {
    return -std::log1p(-next_u01()) / rate;
  }

  // Uniform integer in [0, n) without modulo bias (Lemire's method).
  std::uint64_t next_below(std::uint64_t n) {
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        x = next_u64();
        m = static_cast<__uint128_t>(x) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

}  // namespace ramat

#endif  // RAMAT_RNG_HPP
