#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace gp {

/// Deterministic generator used everywhere a seed is recorded.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Bounded draws use rejection sampling on the raw 64-bit output so
/// results do not depend on the standard library's distribution classes,
/// which are implementation-defined. Independent substreams are derived from
/// (seed, stream) with SplitMix64.
class Rng {
 public:
  static constexpr std::string_view kName = "mt19937_64-rejection/v1";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng substream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform double in [0, 1) with 53 bits of precision.
  double unit();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace gp
