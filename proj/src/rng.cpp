#include "sdgp/rng.hpp"

#include "sdgp/special.hpp"

namespace sdgp {

double NormalStream::uniform(std::uint64_t j) const noexcept {
  // One 128-bit block per pair of draws.
  const Philox::Block b = gen_(stream_, j >> 1);
  const std::uint32_t hi = (j & 1) ? b[2] : b[0];
  const std::uint32_t lo = (j & 1) ? b[3] : b[1];
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 21) ^ (lo >> 11);
  // (bits + 1/2) / 2^53 lies in (0, 1)
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double NormalStream::normal(std::uint64_t j) const noexcept { return normal_quantile(uniform(j)); }

}  // namespace sdgp
