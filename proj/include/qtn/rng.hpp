#pragma once

#include <cstdint>

namespace qtn {

// Counter-based splittable generator. Every consumer derives its own stream
// from (seed, ids...), so results never depend on how work is scheduled
// across threads. splitmix64 is the mixer; good enough for search sampling.
class Rng {
 public:
  Rng() = default;
  explicit Rng(std::uint64_t seed) : state_(mix(seed ^ 0x9e3779b97f4a7c15ull)) {}

  // Child stream: deterministic function of the parent seed and the ids.
  Rng derive(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) const {
    std::uint64_t s = state_;
    s = mix(s ^ mix(a ^ 0xd1b54a32d192ed03ull));
    s = mix(s ^ mix(b ^ 0x8cb92ba72f3d8dd7ull));
    s = mix(s ^ mix(c ^ 0xaef17502108ef2d9ull));
    Rng r;
    r.state_ = s;
    return r;
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  // Uniform in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound) {
    // 128-bit multiply avoids modulo bias well below any scale we sample at.
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Uniform in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool chance(double p) { return next_double() < p; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_ = 0;
};

}  // namespace qtn
