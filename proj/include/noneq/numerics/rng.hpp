#pragma once

#include <array>
#include <cstdint>
#include <utility>

namespace noneq::numerics {

/// Counter-based Philox4x32-10 stream. The draw at `position` is a pure
/// function of (seed, stream_id, position), so streams with distinct ids
/// never overlap and a stream can be checkpointed by its position alone.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t position = 0);

  std::uint64_t next_u64() {
    if (position_ / kWordsPerRefill != cached_group_) refill();
    return cache_[position_++ % kWordsPerRefill];
  }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  /// Uniform on {0, ..., n-1} by Lemire's multiply-and-reject; n must be positive.
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n == 0) throw_zero_range();
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }
  /// Two independent standard normals (Box-Muller, no cached state).
  std::pair<double, double> gaussian_pair();
  double gaussian() { return gaussian_pair().first; }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t position() const { return position_; }
  void seek(std::uint64_t position);

  /// Raw Philox4x32-10 block, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                                    std::array<std::uint32_t, 2> key);

 private:
  void refill();
  [[noreturn]] static void throw_zero_range();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t position_;
  static constexpr int kBlocksPerRefill = 4;
  static constexpr std::uint64_t kWordsPerRefill = 2 * kBlocksPerRefill;
  std::uint64_t cached_group_ = ~std::uint64_t{0};
  std::array<std::uint64_t, 2 * kBlocksPerRefill> cache_{};
};

inline RngStream rng_stream(std::uint64_t seed, std::uint64_t stream_id) {
  return RngStream(seed, stream_id);
}

}  // namespace noneq::numerics
