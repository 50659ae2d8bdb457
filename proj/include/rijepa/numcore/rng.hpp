#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "rijepa/numcore/tensor.hpp"

namespace rijepa {

inline constexpr std::uint64_t kDefaultSeed = 111;

// xoshiro256** seeded through splitmix64. Normals come from Box-Muller, so the
// draw sequence depends only on the seed, never on the standard library.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = kDefaultSeed);

  // Independent stream keyed by (seed, name). Does not advance this stream.
  RngStream substream(std::string_view name) const;

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 bits of precision.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> s_{};
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// n i.i.d. rows from N(mean, variance·I).
Tensor sample_gaussian(RngStream& rng, std::span<const double> mean, double variance,
                       std::size_t n);

}  // namespace rijepa
