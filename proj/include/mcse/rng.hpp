#pragma once

#include <array>
#include <cstdint>
#include <random>

namespace mcse {

/// Philox4x32-10 block function (Salmon et al., Random123).
[[nodiscard]] std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                                         std::array<std::uint32_t, 2> key);

/// Deterministic random stream keyed by (seed, stream id).
///
/// The seed is the Philox key; the stream id occupies the high half of the
/// 128-bit counter and the block index the low half, so different stream ids
/// walk disjoint counter ranges. Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()();

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal() { return normal_(*this); }
  /// Exponential with rate 1.
  double exponential();
  /// Gamma with the given shape and rate (mean shape / rate).
  double gamma(double shape, double rate);

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::uint64_t stream() const noexcept { return stream_; }
  /// 64-bit words consumed so far.
  [[nodiscard]] std::uint64_t position() const noexcept { return consumed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::uint64_t consumed_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  std::normal_distribution<double> normal_;
};

}  // namespace mcse
