#pragma once

// Exact finite-n combinatorics of Hoare partition and Quickselect.

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include <gmpxx.h>

namespace selectlab {

using Rational = mpq_class;

/// Probability mass function on ascending integer support, exact masses.
struct RationalPmf {
  std::vector<std::int64_t> support;
  std::vector<Rational> mass;

  Rational total() const;
  Rational mean() const;
  /// Mass at k (zero off the support).
  Rational at(std::int64_t k) const;
  friend bool operator==(const RationalPmf& a, const RationalPmf& b);
};

/// Law of the split index I_n of the first partition: 2/n at 1, 1/n at 2..n-1.
RationalPmf split_pmf(std::size_t n);

/// Law of the swap count T_n of the first partition given I_n = j:
/// Bernoulli(1/2) for j = 1, hypergeometric Hyp(n-1; j, n-j) for j >= 2.
RationalPmf swaps_conditional_pmf(std::size_t n, std::size_t j);

/// E[T_n | I_n = j], closed form (1/2 for j = 1, j(n-j)/(n-1) otherwise).
Rational conditional_swaps_mean(std::size_t n, std::size_t j);

/// E[T_n] summed over the split law; equals (n+1)/6.
Rational expected_swaps_first_pass(std::size_t n);

/// H_n = 1 + 1/2 + ... + 1/n.
Rational harmonic(std::size_t n);

/// Mean number of data moves from the analytic-combinatorics literature,
/// n + (2/3)H_n - 17/9 + 2H_n/(3n) - 2/(9n). Derived for a slightly
/// different partition, so it is compared with 2 E[Y_n], not equated.
Rational expected_moves_mahmoud(std::size_t n);

struct ExactExpectationTable {
  std::size_t n_max = 0;
  // All indexed by n; slot 0 is unused.
  std::vector<Rational> e_t;  // E[T_n], 0 for n = 1
  std::vector<Rational> e_y;  // E[Y_n]
  std::vector<Rational> e_m;  // expected_moves_mahmoud(n)
  std::vector<Rational> h;    // H_n
};

/// E[Y_n] for n = 1..n_max from the distributional recurrence, using running
/// sums so the whole table costs O(n_max) big-integer operations.
/// The recurrence treats both sub-lists as fresh uniform permutations. Hoare
/// partition does not quite preserve that (the pivot's spot in the right
/// sub-list depends on the swaps), so from n = 4 on these values differ
/// from the true mean of quickselect_hoare by O(1); see enumerate_small.
/// Reducing every entry to lowest terms dominates: about 50 s at n_max = 1e4.
ExactExpectationTable expected_total_swaps(std::size_t n_max);

/// E[Y_n] at the requested n only (any order, duplicates allowed). Same
/// recurrence, but only the returned values are reduced, so n = 65536 takes
/// seconds.
std::vector<Rational> expected_total_swaps_at(const std::vector<std::size_t>& ns);

/// Floating-point version of the same recurrence (long double accumulation).
/// Relative error grows at most linearly in n; about 1e-15 at n = 1e6.
std::vector<double> expected_total_swaps_float(std::size_t n_max);

/// Brute-force tabulation over all n! permutations (and all ranks).
struct JointEnumeration {
  std::size_t n = 0;
  // joint[j][k] = #{permutations with I_n = j, T_n = k}
  std::vector<std::vector<std::uint64_t>> joint;
  // y_counts[y] = #{(permutation, rank) with Y_n = y}
  std::map<std::uint64_t, std::uint64_t> y_counts;

  std::uint64_t permutations() const;
  std::uint64_t pairs() const;
  RationalPmf split_marginal() const;
  RationalPmf swaps_given_split(std::size_t j) const;
  Rational mean_exchanges() const;
};

inline constexpr std::size_t kEnumerationMaxN = 9;

/// Exhaustive oracle; refuses n outside 2..9.
JointEnumeration enumerate_small(std::size_t n);

}  // namespace selectlab
