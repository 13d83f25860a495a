#pragma once

#include <cstdint>
#include <span>

namespace causalfair {

// SplitMix64 (Steele, Lea & Flood 2014). Every random draw in the library goes
// through this generator so that results are bit-identical across platforms and
// standard libraries. Independent streams are derived with stream(), which
// hashes (seed, key...) into a fresh state; sampling uses one stream per row.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    return mix(z);
  }

  // Uniform double in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound) by rejection; bound > 0.
  std::uint64_t below(std::uint64_t bound);

  // Index drawn from a probability vector by inverse CDF. The last index with
  // non-zero mass absorbs rounding slack.
  int categorical(std::span<const double> probs);

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Child stream for (seed, key). Distinct keys give statistically independent
  // streams; the rule is fixed and part of the reproducibility contract.
  static SplitMix64 stream(std::uint64_t seed, std::uint64_t key) {
    return SplitMix64(mix(mix(seed) ^ (key + 0x632BE59BD9B4E019ULL)));
  }
  static SplitMix64 stream(std::uint64_t seed, std::uint64_t key, std::uint64_t subkey) {
    return stream(mix(mix(seed) ^ (key + 0x632BE59BD9B4E019ULL)), subkey);
  }

 private:
  std::uint64_t state_;
};

}  // namespace causalfair
