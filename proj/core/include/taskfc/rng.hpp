#pragma once

#include <array>
#include <cstdint>

namespace taskfc {

/// Philox 4x32-10 counter-based generator. A draw is a pure function of
/// (key, counter), so independent streams are addressed rather than seeded
/// and any evaluation order produces identical values.
std::array<std::uint32_t, 4> philox4x32(std::uint64_t key, std::uint32_t c0,
                                        std::uint32_t c1, std::uint32_t c2,
                                        std::uint32_t c3);

/// Stream domains. Each (seed, domain, a, b) tuple is an independent stream.
namespace stream {
inline constexpr std::uint32_t kShifts = 1;
inline constexpr std::uint32_t kBetas = 2;
inline constexpr std::uint32_t kNuisance = 3;
inline constexpr std::uint32_t kNoise = 4;
inline constexpr std::uint32_t kCoin = 5;
inline constexpr std::uint32_t kDerive = 6;
inline constexpr std::uint32_t kSources = 7;
}  // namespace stream

/// One logical random stream keyed by (seed, domain, a, b). Only the
/// consumption position is state; streams with distinct keys never collide.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint32_t domain, std::uint32_t a = 0,
             std::uint32_t b = 0)
      : seed_(seed), domain_(domain), a_(a), b_(b) {}

  std::uint64_t next_u64();

  /// Uniform double strictly inside (0, 1).
  double next_unit();

  /// Standard normal via Box-Muller; values come in deterministic pairs.
  double next_normal();

  /// Uniform integer in {0, ..., bound-1}, bias-free by rejection.
  std::uint32_t next_below(std::uint32_t bound);

 private:
  std::array<std::uint32_t, 4> next_block();

  std::uint64_t seed_;
  std::uint32_t domain_, a_, b_;
  std::uint32_t index_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

/// Child seed for nested deterministic experiments (e.g. one per replication).
std::uint64_t derive_seed(std::uint64_t seed, std::uint32_t tag, std::uint32_t index);

}  // namespace taskfc
