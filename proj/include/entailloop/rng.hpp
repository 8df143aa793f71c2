#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace entailloop {

/// The single pseudo-random generator used by every stochastic stage.
///
/// Engine: std::mt19937_64 (64-bit Mersenne Twister, fixed by the C++
/// standard). Reference vector: a default-seeded engine (seed 5489) yields
/// 9981545732273789042 as its 10000th output.
///
/// Integer and real draws are derived from raw engine output with
/// library-independent rules so that sequences are identical across standard
/// library implementations:
///   - uniform_index(n): rejection sampling on the top of the 64-bit range.
///   - uniform01(): (x >> 11) * 2^-53, in [0, 1).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n);

  /// Uniform real in [0, 1).
  double uniform01();

  /// Uniform real in [0, 1]; both endpoints reachable.
  double uniform_closed01();

  /// Fisher-Yates shuffle driven by uniform_index.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_index(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// 64-bit FNV-1a of a byte string.
std::uint64_t fnv1a64(std::string_view bytes);

/// Seed for a stage/replicate, a pure function of its three arguments:
/// splitmix64(global ^ splitmix64(fnv1a64(stage) ^ splitmix64(replicate))).
std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view stage,
                          std::uint64_t replicate = 0);

}  // namespace entailloop
