#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace qdv {

/// Deterministic random source.
///
/// Every consumer gets its own stream derived from the run seed and a label,
/// so adding a consumer never shifts the values another one sees. Only the raw
/// 64-bit engine output is used; the std distributions are implementation
/// defined and would break cross-platform trace equality.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  static RandomStream derive(std::uint64_t seed, std::string_view label);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 bits of precision.
  double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// true with probability p.
  bool bernoulli(double p) { return next_unit() < p; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace qdv
