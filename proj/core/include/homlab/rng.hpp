#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace homlab {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// Stateless: the output is a pure function of (counter, key).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter counter, Key key) noexcept;
};

/// SplitMix64 finalizer; used to derive independent 64-bit keys.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Mixes a parent seed with a label and an index into a child seed.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t label, std::uint64_t index = 0) noexcept;

/// Stream purposes. Different purposes never share counters.
enum class StreamTag : std::uint32_t {
  kSpatialNoise = 0,
  kTimeNoise = 1,
  kInitialShift = 2,
  kMedium = 3,
};

/// Random numbers addressed by (seed, path, step, tag).
///
/// Every draw is recomputed from its address, so results do not depend on
/// the order or the thread in which paths are generated.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t path_index) noexcept;

  /// Fills `out` with standard normal variates for one step.
  void normals(std::uint64_t step, StreamTag tag, std::span<double> out) const noexcept;

  /// Fills `out` with uniforms on the open interval (0, 1).
  void uniforms(std::uint64_t step, StreamTag tag, std::span<double> out) const noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t path_index() const noexcept { return path_; }

 private:
  Philox4x32::Counter counter(std::uint64_t step, StreamTag tag, std::uint32_t block) const noexcept;

  std::uint64_t seed_;
  std::uint64_t path_;
  Philox4x32::Key key_;
};

}  // namespace homlab
