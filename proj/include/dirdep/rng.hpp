#pragma once

// Seed derivation and the small generators used for permutations.
//
// Reproducibility contract: every random stream in the library is a pure
// function of (master seed, index), never of scheduling order.
//
//   derive_seed(master, i) = mix64(mix64(master) + (i + 1) * 0x9E3779B97F4A7C15)
//
// where mix64 is the SplitMix64 output finalizer. Permutation b (1-based) of
// a permutation test with seed s is drawn from SplitMix64(derive_seed(s, b)).
// Monte Carlo replicate r of a scenario with seed s uses
// replicate_seed = derive_seed(s, r); its sample is drawn from
// std::mt19937_64(derive_seed(replicate_seed, 0)) and its permutation test
// runs with seed derive_seed(replicate_seed, 1).

#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <utility>

namespace dirdep {

constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master) + (index + 1) * kGoldenGamma);
}

/// SplitMix64; cheap to seed, which matters when every permutation gets its
/// own stream.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    state_ += kGoldenGamma;
    return mix64(state_);
  }

 private:
  std::uint64_t state_;
};

/// Engine for all samplers.
using SampleEngine = std::mt19937_64;

/// Uniform on [0, 1) with 53 random bits; identical on every platform.
template <class URBG>
double uniform01(URBG& g) {
  static_assert(URBG::max() == std::numeric_limits<std::uint64_t>::max() && URBG::min() == 0);
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, bound) by Lemire's multiply-shift with rejection.
template <class URBG>
std::uint64_t uniform_below(std::uint64_t bound, URBG& g) {
  static_assert(URBG::max() == std::numeric_limits<std::uint64_t>::max() && URBG::min() == 0);
  auto x = g();
  auto m = static_cast<unsigned __int128>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = g();
      m = static_cast<unsigned __int128>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

/// Fills `out` with a uniformly random permutation of {0, ..., n-1}
/// (Fisher-Yates).
template <class URBG>
void random_permutation(std::span<std::size_t> out, URBG& g) {
  std::iota(out.begin(), out.end(), std::size_t{0});
  for (std::size_t i = out.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(i, g));
    std::swap(out[i - 1], out[j]);
  }
}

}  // namespace dirdep
