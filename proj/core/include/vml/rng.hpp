#pragma once

#include <cstdint>

namespace vml {

// Stafford mix13 finalizer (the splitmix64 output stage). Bijective on u64.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

// Counter-based random stream. Every draw is a pure function of
// (seed, stream, coordinate, counter), so coordinate substreams are
// independent of the truncation they are read at: sampling N+k coordinates
// reproduces the first N exactly. No state, trivially shareable.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix64(seed + 0x9e3779b97f4a7c15ULL * (stream + 1))) {}

  std::uint64_t bits(std::uint64_t coordinate, std::uint64_t counter) const {
    std::uint64_t h = key_;
    h = mix64(h ^ (coordinate + 0x9e3779b97f4a7c15ULL));
    h = mix64(h ^ (counter + 0xd1b54a32d192ed03ULL));
    return h;
  }

  // Uniform on [0,1) with 53 random bits; never returns exactly 1.
  double uniform(std::uint64_t coordinate, std::uint64_t counter) const {
    return static_cast<double>(bits(coordinate, counter) >> 11) * 0x1.0p-53;
  }

  // Uniform on (0,1): open at both ends, safe as a quantile argument.
  double uniform_open(std::uint64_t coordinate, std::uint64_t counter) const {
    return (static_cast<double>(bits(coordinate, counter) >> 11) + 0.5) *
           0x1.0p-53;
  }

 private:
  std::uint64_t key_;
};

}  // namespace vml
