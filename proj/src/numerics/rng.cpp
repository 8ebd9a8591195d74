#include "noneq/numerics/rng.hpp"

#include "noneq/errors.hpp"

#include <cmath>
#include <numbers>

namespace noneq::numerics {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

}  // namespace

std::array<std::uint32_t, 4> RngStream::philox4x32_10(std::array<std::uint32_t, 4> c,
                                                      std::array<std::uint32_t, 2> k) {
  std::uint32_t c0 = c[0], c1 = c[1], c2 = c[2], c3 = c[3];
  std::uint32_t k0 = k[0], k1 = k[1];
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c0;
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c2;
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
    c0 = hi1 ^ c1 ^ k0;
    c1 = lo1;
    c2 = hi0 ^ c3 ^ k1;
    c3 = lo0;
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return {c0, c1, c2, c3};
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t position)
    : seed_(seed), stream_id_(stream_id), position_(position) {}

void RngStream::seek(std::uint64_t position) { position_ = position; }

void RngStream::refill() {
  // Four consecutive blocks in lockstep: the rounds are a dependent multiply
  // chain, so interleaving independent counters hides the latency.
  const std::uint64_t group = (position_ >> 1) / kBlocksPerRefill;
  std::uint32_t c0[kBlocksPerRefill], c1[kBlocksPerRefill], c2[kBlocksPerRefill],
      c3[kBlocksPerRefill];
  for (int l = 0; l < kBlocksPerRefill; ++l) {
    const std::uint64_t block = group * kBlocksPerRefill + static_cast<std::uint64_t>(l);
    c0[l] = static_cast<std::uint32_t>(block);
    c1[l] = static_cast<std::uint32_t>(block >> 32);
    c2[l] = static_cast<std::uint32_t>(stream_id_);
    c3[l] = static_cast<std::uint32_t>(stream_id_ >> 32);
  }
  std::uint32_t k0 = static_cast<std::uint32_t>(seed_), k1 = static_cast<std::uint32_t>(seed_ >> 32);
  for (int round = 0; round < 10; ++round) {
    for (int l = 0; l < kBlocksPerRefill; ++l) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c0[l];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c2[l];
      const auto n0 = static_cast<std::uint32_t>(p1 >> 32) ^ c1[l] ^ k0;
      const auto n2 = static_cast<std::uint32_t>(p0 >> 32) ^ c3[l] ^ k1;
      c1[l] = static_cast<std::uint32_t>(p1);
      c3[l] = static_cast<std::uint32_t>(p0);
      c0[l] = n0;
      c2[l] = n2;
    }
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  for (int l = 0; l < kBlocksPerRefill; ++l) {
    cache_[2 * l] = (static_cast<std::uint64_t>(c1[l]) << 32) | c0[l];
    cache_[2 * l + 1] = (static_cast<std::uint64_t>(c3[l]) << 32) | c2[l];
  }
  cached_group_ = group;
}

void RngStream::throw_zero_range() { throw ParameterError("uniform_int: n must be positive"); }

std::pair<double, double> RngStream::gaussian_pair() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(phi), r * std::sin(phi)};
}

}  // namespace noneq::numerics
