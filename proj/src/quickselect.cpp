#include "selectlab/quickselect.hpp"

#include <numeric>

namespace selectlab {

RunRecord run_random(std::size_t n, RandomStream& rng) {
  if (n < 1) throw ContractViolation("run_random: n must be >= 1");
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 1);
  // Fisher-Yates
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t k = rng.below(i + 1);
    std::swap(perm[i], perm[k]);
  }
  const std::size_t rank = static_cast<std::size_t>(rng.below(n)) + 1;
  return quickselect(rank_array_unchecked(std::move(perm)), rank);
}

RunRecord run_random(std::size_t n, std::uint64_t seed, std::uint64_t stream_index) {
  RandomStream rng(seed, stream_index);
  return run_random(n, rng);
}

}  // namespace selectlab
