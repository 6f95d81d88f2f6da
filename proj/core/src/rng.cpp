#include "homlab/rng.hpp"

#include <cmath>
#include <numbers>

namespace homlab {
namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) noexcept {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(product);
  hi = static_cast<std::uint32_t>(product >> 32);
}

// 53 random bits mapped to the open interval (0, 1).
inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32 | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kPhiloxM0, ctr[0], lo0, hi0);
    mulhilo(kPhiloxM1, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t label, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(splitmix64(parent) ^ label) ^ index);
}

CounterStream::CounterStream(std::uint64_t seed, std::uint64_t path_index) noexcept
    : seed_(seed),
      path_(path_index),
      key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

Philox4x32::Counter CounterStream::counter(std::uint64_t step, StreamTag tag,
                                           std::uint32_t block) const noexcept {
  // Words: step (64 bits), tag/block, path. Paths beyond 2^32 alias; the
  // ensemble sizes used here are far below that.
  return {static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32),
          (static_cast<std::uint32_t>(tag) << 24) | (block & 0x00FFFFFFu),
          static_cast<std::uint32_t>(path_)};
}

void CounterStream::uniforms(std::uint64_t step, StreamTag tag, std::span<double> out) const noexcept {
  std::uint32_t block = 0;
  for (std::size_t i = 0; i < out.size(); i += 2, ++block) {
    const auto r = Philox4x32::generate(counter(step, tag, block), key_);
    out[i] = to_open_unit(r[0], r[1]);
    if (i + 1 < out.size()) out[i + 1] = to_open_unit(r[2], r[3]);
  }
}

void CounterStream::normals(std::uint64_t step, StreamTag tag, std::span<double> out) const noexcept {
  std::uint32_t block = 0;
  for (std::size_t i = 0; i < out.size(); i += 2, ++block) {
    const auto r = Philox4x32::generate(counter(step, tag, block), key_);
    const double u1 = to_open_unit(r[0], r[1]);
    const double u2 = to_open_unit(r[2], r[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    out[i] = radius * std::cos(angle);
    if (i + 1 < out.size()) out[i + 1] = radius * std::sin(angle);
  }
}

}  // namespace homlab
