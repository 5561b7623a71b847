#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace perm {

/// Reproducible random stream identified by (seed, stream_id).
///
/// Distinct stream ids give independent-looking sequences from one seed; the
/// same pair reproduces the same sequence bit for bit on every platform,
/// since only the engine output is used and all transforms are our own.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(stream_id),
                      std::uint32_t(stream_id >> 32), std::uint32_t(0x5be0cd19u)};
    engine_.seed(seq);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t bits() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1).
  double uniform_open() { return (double(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  /// Standard normal by the polar method.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double x, y, r;
    do {
      x = 2.0 * uniform() - 1.0;
      y = 2.0 * uniform() - 1.0;
      r = x * x + y * y;
    } while (r >= 1.0 || r == 0.0);
    const double f = std::sqrt(-2.0 * std::log(r) / r);
    spare_ = y * f;
    has_spare_ = true;
    return x * f;
  }

 private:
  std::uint64_t seed_, stream_id_;
  std::mt19937_64 engine_;
  double spare_ = 0;
  bool has_spare_ = false;
};

}  // namespace perm
