#pragma once

#include <array>
#include <cstdint>

namespace sdgp {

/// Philox4x32-10 counter-based generator. A draw is a pure function of
/// (key, counter), so sample i of a Monte Carlo run can be produced by any
/// worker without shared state.
class Philox {
 public:
  using Block = std::array<std::uint32_t, 4>;

  explicit Philox(std::uint64_t seed) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  Block operator()(std::uint64_t hi, std::uint64_t lo) const noexcept {
    Block ctr{static_cast<std::uint32_t>(lo), static_cast<std::uint32_t>(lo >> 32),
              static_cast<std::uint32_t>(hi), static_cast<std::uint32_t>(hi >> 32)};
    std::array<std::uint32_t, 2> key = key_;
    for (int round = 0; round < 10; ++round) {
      ctr = single_round(ctr, key);
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static Block single_round(const Block& c, const std::array<std::uint32_t, 2>& k) noexcept {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    return {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
            static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
  }

  std::array<std::uint32_t, 2> key_;
};

/// Stream of standard normals for one (seed, stream) pair, by inverse CDF of
/// uniforms in (0, 1) carrying 53 random bits.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream) noexcept : gen_(seed), stream_(stream) {}

  /// j-th uniform of the stream, strictly inside (0, 1).
  double uniform(std::uint64_t j) const noexcept;
  /// j-th standard normal of the stream.
  double normal(std::uint64_t j) const noexcept;

 private:
  Philox gen_;
  std::uint64_t stream_;
};

}  // namespace sdgp
