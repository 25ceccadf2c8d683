#pragma once

#include <cstdint>

namespace pimcc {

// splitmix64. Pinned here so test fixtures and CLI-generated inputs are
// reproducible across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound) { return next() % bound; }

  std::uint8_t next_byte() { return static_cast<std::uint8_t>(next() & 0xff); }

 private:
  std::uint64_t state_;
};

}  // namespace pimcc
