#include "taskfc/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace taskfc {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
  // 53 significant bits, offset by half a step: strictly inside (0, 1).
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::uint64_t key, std::uint32_t c0,
                                        std::uint32_t c1, std::uint32_t c2,
                                        std::uint32_t c3) {
  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
  std::array<std::uint32_t, 4> ctr = {c0, c1, c2, c3};
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ k0,
           static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ k1,
           static_cast<std::uint32_t>(p0)};
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return ctr;
}

std::array<std::uint32_t, 4> CounterRng::next_block() {
  return philox4x32(seed_, domain_, a_, b_, index_++);
}

std::uint64_t CounterRng::next_u64() {
  const auto blk = next_block();
  return (static_cast<std::uint64_t>(blk[0]) << 32) | blk[1];
}

double CounterRng::next_unit() {
  const auto blk = next_block();
  return to_unit(blk[0], blk[1]);
}

double CounterRng::next_normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const auto blk = next_block();
  const double u1 = to_unit(blk[0], blk[1]);
  const double u2 = to_unit(blk[2], blk[3]);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_normal_ = radius * std::sin(angle);
  has_cached_normal_ = true;
  return radius * std::cos(angle);
}

std::uint32_t CounterRng::next_below(std::uint32_t bound) {
  const std::uint64_t span = bound;
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() / span * span;
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r < limit) return static_cast<std::uint32_t>(r % span);
  }
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint32_t tag,
                          std::uint32_t index) {
  const auto blk = philox4x32(seed, stream::kDerive, tag, index, 0);
  return (static_cast<std::uint64_t>(blk[0]) << 32) | blk[1];
}

}  // namespace taskfc
