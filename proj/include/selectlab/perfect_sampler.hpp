#pragma once

// Exact sampling from the limit law by coupling from the past with a
// multigamma coupler.
//
// The kernel density phi(x, .) of sqrt(U) x + sqrt(U)(1 - sqrt(U)) is at
// least alpha = sqrt(8/7) - 1 on (1/8, 1/4) for every x in [0, 1]. Writing
// phi(x, .) = r + g_x with r = alpha 1_(1/8,1/4), one transition is
//
//   Phi(x, B, U) = B (U/8 + 1/8) + (1 - B) G_x^{-1}(U),  B ~ Ber(alpha/8),
//
// where G_x is the distribution function of g_x / (1 - alpha/8). Every chain
// takes the same value at a step with B = 1, so all chains have coalesced at
// the last such step before time 0.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "selectlab/rng.hpp"

namespace selectlab {

struct SamplerConstants {
  static double alpha();             // sqrt(8/7) - 1
  static double coalescence_prob();  // alpha / 8 = 1/(2 sqrt 14) - 1/8
};

/// Breakpoints of the piecewise inverse of G_x, as functions of x.
struct QuantileBreakpoints {
  double a, b, c, d, e, f, g;
};
QuantileBreakpoints quantile_breakpoints(double x);

/// Index 1..6 of the inverse branch used for (x, u).
int quantile_branch(double x, double u);

/// Residual distribution function
/// G_x(t) = (8/(8-alpha)) (F_x(t) - alpha max{0, min{t - 1/8, 1/8}}).
double cdf_G(double x, double t);

/// Closed-form inverse of G_x. Throws ConsistencyError when the chosen branch
/// lands outside its t-interval by more than 1e-9.
double quantile_G_inv(double x, double u);

/// One multigamma transition.
double multigamma_update(double x, bool coalesce, double u);

struct LimitSample {
  double value = 0.0;
  std::uint64_t tau = 0;         // backward trials up to the coalescing one
  std::uint64_t draws_used = 0;  // geometric + coalesced draw + (tau - 1) updates
};

/// One exact draw from the limit law.
LimitSample cftp_sample(RandomStream& rng);

/// `count` draws; draw i uses the stream (seed, i), so the output does not
/// depend on the number of threads.
std::vector<LimitSample> sample_limit(std::size_t count, std::uint64_t seed, unsigned threads = 1);
std::vector<double> sample_limit_values(std::size_t count, std::uint64_t seed,
                                        unsigned threads = 1);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double two_sample_ks(std::vector<double> a, std::vector<double> b);

/// Asymptotic critical value c(level) sqrt((n+m)/(nm)), c = sqrt(-ln(level/2)/2).
double two_sample_ks_threshold(std::size_t n, std::size_t m, double level = 0.001);

struct KernelCheck {
  double x = 0.0;
  std::size_t runs = 0;
  double ks = 0.0;
  double threshold = 0.0;
  bool passed() const { return ks < threshold; }
};

/// Compares `runs` multigamma updates from x with `runs` direct draws
/// sqrt(U) x + sqrt(U)(1 - sqrt(U)).
KernelCheck kernel_update_check(double x, std::size_t runs, std::uint64_t seed);

/// Multigamma updates from x (B and U drawn from rng); exposed for tests.
std::vector<double> multigamma_draws(double x, std::size_t runs, RandomStream& rng);

}  // namespace selectlab
