#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace ewb {

// Seeded generator with platform-independent derived distributions.
// std::mt19937_64's output sequence is fixed by the standard, but the
// <random> distributions are not, so uniform/normal draws are computed here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform integer on [0, bound) without modulo bias; bound > 0.
  std::uint64_t below(std::uint64_t bound);
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Counter-based 64-bit mixer (splitmix64 finalizer). Stateless, so a stream
// indexed by (seed, counter) gives the same bits regardless of which thread
// evaluates it.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t counter);

template <class T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace ewb
