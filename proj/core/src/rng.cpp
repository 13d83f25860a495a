#include "causalfair/rng.hpp"

#include <limits>

namespace causalfair {

std::uint64_t SplitMix64::below(std::uint64_t bound) {
  // Reject draws from the biased tail of the 64-bit range.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % bound;
}

int SplitMix64::categorical(std::span<const double> probs) {
  const double u = uniform();
  double cumulative = 0.0;
  int last_nonzero = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last_nonzero = static_cast<int>(i);
    cumulative += probs[i];
    if (u < cumulative) return static_cast<int>(i);
  }
  return last_nonzero;
}

}  // namespace causalfair
