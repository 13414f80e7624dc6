#pragma once

#include <cstdint>
#include <random>

namespace relavi {

/// Seedable stream generator. Streams derived from (master, index) are
/// independent for practical purposes and reproducible across runs;
/// uniform01 avoids std::uniform_real_distribution so sequences do not
/// depend on the standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    eng_.seed(seq);
  }

  static Rng stream(std::uint64_t master, std::uint64_t index) {
    Rng r(0);
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    r.eng_.seed(seq);
    return r;
  }

  std::uint64_t next() { return eng_(); }

  double uniform01() { return (next() >> 11) * 0x1.0p-53; }

  /// Uniform index in [0, n).
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(static_cast<unsigned __int128>(next()) * n >> 64);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace relavi
