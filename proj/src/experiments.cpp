#include "selectlab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "selectlab/errors.hpp"
#include "selectlab/parallel.hpp"
#include "selectlab/quickselect.hpp"

namespace selectlab {

namespace {

constexpr std::uint64_t kVarianceTag = 0x7661726961ull;

struct Summary {
  long double mean = 0;
  long double var = 0;  // unbiased
  long double m4 = 0;   // fourth central moment
};

Summary summarize(std::span<const double> xs) {
  Summary s;
  const auto n = static_cast<long double>(xs.size());
  for (double x : xs) s.mean += x;
  s.mean /= n;
  long double m2 = 0;
  for (double x : xs) {
    const long double d = x - s.mean;
    m2 += d * d;
    s.m4 += d * d * d * d;
  }
  s.var = m2 / (n - 1);
  s.m4 /= n;
  return s;
}

std::vector<double> exchange_counts(std::size_t n, std::size_t runs, std::uint64_t seed,
                                    unsigned threads) {
  std::vector<double> out(runs);
  parallel_for(runs, threads, [&](std::size_t i) {
    out[i] = static_cast<double>(run_random(n, seed, i).exchanges);
  });
  return out;
}

}  // namespace

double ks_distance_empirical(std::span<const double> samples, const CdfGrid& cdf) {
  if (samples.empty()) throw DomainError("ks_distance_empirical: no samples");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double total = static_cast<double>(s.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t j = i;
    while (j < s.size() && s[j] == s[i]) ++j;
    const double f = cdf(s[i]);
    d = std::max(d, std::abs(static_cast<double>(j) / total - f));
    d = std::max(d, std::abs(f - static_cast<double>(i) / total));
    i = j;
  }
  return d;
}

std::vector<double> normalized_runs(std::size_t n, std::size_t runs, std::uint64_t seed,
                                    unsigned threads) {
  const std::uint64_t sub = derive_seed(seed, n);
  std::vector<double> out(runs);
  parallel_for(runs, threads, [&](std::size_t i) { out[i] = run_random(n, sub, i).normalized; });
  return out;
}

ConvergenceReport convergence_study(std::vector<std::size_t> n_list, std::size_t runs,
                                    std::uint64_t seed, const CdfGrid& cdf, unsigned threads) {
  if (runs < 2) throw DomainError("convergence_study: runs must be >= 2");
  std::sort(n_list.begin(), n_list.end());
  ConvergenceReport report;
  for (std::size_t n : n_list) {
    if (n < 2) throw DomainError("convergence_study: every n must be >= 2");
    const auto start = std::chrono::steady_clock::now();
    const std::vector<double> xs = normalized_runs(n, runs, seed, threads);
    const Summary s = summarize(xs);
    ConvergenceRow row;
    row.n = n;
    row.runs = runs;
    row.ks_to_limit = ks_distance_empirical(xs, cdf);
    row.mean_normalized = static_cast<double>(s.mean);
    row.mean_std_error = static_cast<double>(std::sqrt(s.var / static_cast<long double>(runs)));
    row.var_normalized_times_n = static_cast<double>(s.var) * static_cast<double>(n);
    row.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.rows.push_back(row);
  }
  return report;
}

VarianceScaling variance_scaling(std::size_t n, std::size_t runs, std::uint64_t seed,
                                 unsigned threads) {
  if (n < 2) throw DomainError("variance_scaling: n must be >= 2");
  if (runs < 2) throw DomainError("variance_scaling: runs must be >= 2");
  const std::vector<double> ys = exchange_counts(n, runs, derive_seed(derive_seed(seed, kVarianceTag), n), threads);
  const Summary s = summarize(ys);
  const long double n2 = static_cast<long double>(n) * n;
  VarianceScaling v;
  v.n = n;
  v.runs = runs;
  v.value = static_cast<double>(s.var / n2);
  v.std_error =
      static_cast<double>(std::sqrt(std::max(0.0L, s.m4 - s.var * s.var) / runs) / n2);
  v.mean_exchanges = static_cast<double>(s.mean);
  return v;
}

std::vector<MovesRow> moves_vs_exchanges_report(const std::vector<std::size_t>& n_list,
                                                std::size_t runs, std::uint64_t seed,
                                                unsigned threads) {
  if (n_list.empty()) throw DomainError("moves_vs_exchanges_report: empty n list");
  if (n_list.end() != std::find(n_list.begin(), n_list.end(), std::size_t{0}))
    throw DomainError("moves_vs_exchanges_report: n must be >= 1");
  const std::vector<Rational> e_y = expected_total_swaps_at(n_list);
  std::vector<MovesRow> rows;
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    const std::size_t n = n_list[i];
    MovesRow row;
    row.n = n;
    row.expected_moves = expected_moves_mahmoud(n);
    row.twice_exchanges = 2 * e_y[i];
    row.difference = row.expected_moves - row.twice_exchanges;
    row.difference_over_n = row.difference.get_d() / static_cast<double>(n);
    row.moves_over_n = row.expected_moves.get_d() / static_cast<double>(n);
    if (runs >= 2 && n >= 2) {
      const VarianceScaling v = variance_scaling(n, runs, seed, threads);
      row.runs = runs;
      row.var_twice_over_n2 = 4.0 * v.value;
      row.var_std_error = 4.0 * v.std_error;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace selectlab
