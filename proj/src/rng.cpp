#include "entailloop/rng.hpp"

#include <limits>

namespace entailloop {

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  // Reject draws from the incomplete final block so every residue is equally likely.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform_closed01() {
  return static_cast<double>(engine_() >> 11) / static_cast<double>((1ULL << 53) - 1);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view stage,
                          std::uint64_t replicate) {
  return splitmix64(global_seed ^ splitmix64(fnv1a64(stage) ^ splitmix64(replicate)));
}

}  // namespace entailloop
