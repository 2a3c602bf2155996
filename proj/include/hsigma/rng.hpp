#ifndef HSIGMA_RNG_HPP
#define HSIGMA_RNG_HPP

#include <array>
#include <cstdint>
#include <limits>

namespace hsigma {

/// Philox4x32-10 counter-based generator. The key is derived from (seed, stream),
/// so distinct streams are independent and reproducible without shared state.
/// Satisfies UniformRandomBitGenerator with 32-bit output.
class Philox {
 public:
  using result_type = std::uint32_t;

  Philox(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        counter_{0, 0, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)} {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (pos_ == 4) {
      block_ = generate(counter_, key_);
      if (++counter_[0] == 0) ++counter_[1];
      pos_ = 0;
    }
    return block_[pos_++];
  }

  /// Uniform double in (0, 1).
  double uniform() noexcept {
    const std::uint64_t hi = (*this)(), lo = (*this)();
    return (static_cast<double>(((hi << 32) | lo) >> 11) + 0.5) * 0x1.0p-53;
  }

  static std::array<std::uint32_t, 4> generate(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) noexcept {
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = std::uint64_t{M0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{M1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
      key[0] += W0;
      key[1] += W1;
    }
    return ctr;
  }

 private:
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_{};
  int pos_ = 4;
};

/// SplitMix64 finalizer; used to derive sub-seeds.
inline std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace hsigma

#endif  // HSIGMA_RNG_HPP
