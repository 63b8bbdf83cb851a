#pragma once

// Monte Carlo harness relating Quickselect runs to the limit law.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "selectlab/exact.hpp"
#include "selectlab/limit_law.hpp"

namespace selectlab {

/// sup_x |F_emp(x) - F(x)|, checked on both sides of every empirical jump;
/// F is the linear interpolation of the grid.
double ks_distance_empirical(std::span<const double> samples, const CdfGrid& cdf);

struct ConvergenceRow {
  std::size_t n = 0;
  std::size_t runs = 0;
  double ks_to_limit = 0.0;
  double mean_normalized = 0.0;
  double mean_std_error = 0.0;
  double var_normalized_times_n = 0.0;  // n Var(Y_n / n)
  double wall_seconds = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;  // ascending n
};

/// For each n, `runs` Quickselect runs on the streams (derive_seed(seed, n), i).
ConvergenceReport convergence_study(std::vector<std::size_t> n_list, std::size_t runs,
                                    std::uint64_t seed, const CdfGrid& cdf, unsigned threads = 1);

/// The normalized values Y_n/n of `runs` runs for one n (same streams as
/// convergence_study).
std::vector<double> normalized_runs(std::size_t n, std::size_t runs, std::uint64_t seed,
                                    unsigned threads = 1);

struct VarianceScaling {
  std::size_t n = 0;
  std::size_t runs = 0;
  double value = 0.0;      // sample Var(Y_n) / n^2
  double std_error = 0.0;  // of `value`
  double mean_exchanges = 0.0;
};

VarianceScaling variance_scaling(std::size_t n, std::size_t runs, std::uint64_t seed,
                                 unsigned threads = 1);

struct MovesRow {
  std::size_t n = 0;
  Rational expected_moves;     // closed form from the literature
  Rational twice_exchanges;    // 2 E[Y_n], exact
  Rational difference;         // expected_moves - twice_exchanges
  double difference_over_n = 0.0;
  double moves_over_n = 0.0;
  std::size_t runs = 0;        // 0: no Monte Carlo column
  double var_twice_over_n2 = 0.0;  // Var(2 Y_n)/n^2
  double var_std_error = 0.0;
};

/// Variance band for Var(M_n)/n^2 from the literature: [1/15, 41/15] up to
/// o(1); the sharp constant is 1/15.
inline constexpr double kMovesVarianceLower = 1.0 / 15.0;
inline constexpr double kMovesVarianceUpper = 41.0 / 15.0;

std::vector<MovesRow> moves_vs_exchanges_report(const std::vector<std::size_t>& n_list,
                                                std::size_t runs, std::uint64_t seed,
                                                unsigned threads = 1);

}  // namespace selectlab
