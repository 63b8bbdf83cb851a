#pragma once

// Numerics of the limit law X = sqrt(U) X + sqrt(U)(1 - sqrt(U)) of the
// normalized exchange count Y_n / n.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "selectlab/exact.hpp"

namespace selectlab {

/// Radicands in [-1e-12, 0) are rounding noise and clamp to zero; anything
/// more negative raises ConsistencyError.
inline constexpr double kRadicandSlack = 1e-12;
double guarded_sqrt(double radicand);

struct MomentTable {
  std::size_t k_max = 0;
  std::vector<Rational> moments;  // E[X^k], k = 0..k_max

  Rational variance() const;
};

/// Exact moments from the recursion
/// E[X^k] = 2 (k+2)! (k-1)! sum_{i<k} E[X^i] / ((2k-i+2)! i!).
MomentTable moments(std::size_t k_max);

/// Same recursion in long double; used where k_max is large.
std::vector<long double> moments_float(std::size_t k_max);

/// Distribution function of sqrt(U) x + sqrt(U)(1 - sqrt(U)) at t.
double kernel_cdf(double x, double t);

/// Density phi(x, t) of the same variable: 2g on p_t < x <= t, g - 1 on
/// t < x <= 1, zero elsewhere, with g = (1+x)/sqrt((1+x)^2 - 4t) and
/// p_t = 2 sqrt(t) - 1. Returns +infinity exactly at x = p_t.
double kernel_density(double x, double t);

/// g(x, t) and its x-primitive G(x, t) = sqrt((1+x)^2 - 4t).
double kernel_g(double x, double t);
double kernel_g_primitive(double x, double t);

struct CdfGrid {
  std::vector<double> points;  // t_i = i/m, i = 0..m
  std::vector<double> values;  // F(t_i)
  double residual = 0.0;       // sup-norm change of the last iteration
  std::size_t iterations = 0;
  bool converged = false;

  std::size_t cells() const { return points.empty() ? 0 : points.size() - 1; }
  /// Linear interpolation; 0 left of 0, 1 right of 1.
  double operator()(double t) const;
};

struct CdfSolveOptions {
  std::size_t grid = 4096;
  double tol = 1e-7;
  std::size_t max_iter = 200;
};

/// Fixed-point iteration F_{k+1}(t) = integral of F_x(t) d mu_k(x), starting
/// from the point mass at 0. mu_k is carried as cell masses placed at cell
/// midpoints.
CdfGrid cdf_solve(const CdfSolveOptions& opts = {});

/// One application of the mixture map to the measure of `grid`, on its points.
std::vector<double> cdf_push(const CdfGrid& grid);

/// One application of the two-sided map
/// X -> 1{V<=U} U X + 1{V>U} (1-U) X' + U(1-U), evaluated at `ts` by
/// midpoint quadrature in U with `quad_points` nodes.
std::vector<double> cdf_push_two_sided(const CdfGrid& grid, const std::vector<double>& ts,
                                       std::size_t quad_points = 20000);

/// Twenty rows t = 0.000..0.095 by eight columns 0.0..0.7: entry [r][c] is
/// F(c/10 + r/200).
std::vector<std::vector<double>> fig1_table(const CdfGrid& grid);

struct DensityGrid {
  std::vector<double> points;  // t_i = i/m
  std::vector<double> values;  // f(t_i)
  double mass = 0.0;           // trapezoid integral of f
  double mean = 0.0;
  double second_moment = 0.0;
  double residual = 0.0;
  double eigenvalue = 0.0;     // mass ratio of the last unnormalized step
  std::size_t iterations = 0;
  bool converged = false;

  double max_value() const;
};

struct DensitySolveOptions {
  std::size_t grid = 2048;
  double tol = 1e-9;
  std::size_t max_iter = 400;
};

/// Power iteration f_{k+1} = Phi[f_k] of the density integral equation from
/// f_0 = 1, f held piecewise constant on cells, g integrated exactly through
/// its primitive so the singularity at x = p_t needs no quadrature.
DensityGrid density_solve(const DensitySolveOptions& opts = {});

/// Phi[f](t) for piecewise-constant cell values f on [0,1].
double density_map(const std::vector<double>& cell_values, double t);

enum class DerivativeMethod { series, montecarlo };

struct DerivativeEstimate {
  double value = 0.0;
  double error_bar = 0.0;  // half-width of the last bracket, or 3 standard errors
  std::size_t terms_or_samples = 0;
  bool flagged = false;
};

/// f'_r(0) = E[2/(1+X)^2] = 2 sum_k (-1)^k (k+1) E[X^k]. The alternating
/// series is summed to k_max; the estimate is the midpoint of the last pair
/// of partial sums.
DerivativeEstimate right_derivative_series(std::size_t k_max = 200);

/// Monte Carlo average of 2/(1+X)^2 over perfect samples.
DerivativeEstimate right_derivative_montecarlo(std::size_t samples, std::uint64_t seed,
                                               unsigned threads = 1);
/// Same average over draws the caller already has.
DerivativeEstimate right_derivative_from_samples(std::span<const double> xs);

/// P(X >= 1 - eps) <= 2^{k(k+3)/4} eps^{k/2}.
double tail_bound(double eps, int k);

struct RateConstants {
  double p = 0.0;
  double tau_p = 0.0;
  double kappa_p = 0.0;
  double eps = 0.0;
  double omega_eps = 0.0;
  double density_bound_used = 0.0;
};

/// tau_p = (1/2 + Gamma(p/2+1)/2^{p/2+1})^{1/p} and
/// kappa_p = (2p+3)/(2p-1) (7 + tau_p), p >= 1.
RateConstants rate_constants(double p);

/// omega_eps = (1/(2 eps))^{2 eps} (||f|| kappa_{1/(2eps)-1})^{1-2eps},
/// 0 < eps <= 1/4; the KS distance of Y_n/n to X is at most
/// omega_eps n^{-1/2+eps}.
RateConstants ks_rate_bound(double eps, double density_bound);

inline constexpr double kDensityBound = 109.0;

}  // namespace selectlab
