#include <doctest.h>

#include <cmath>
#include <vector>

#include "selectlab/errors.hpp"
#include "selectlab/limit_law.hpp"
#include "selectlab/perfect_sampler.hpp"
#include "selectlab/rng.hpp"
#include "fig1_golden.hpp"

using namespace selectlab;

namespace {

const CdfGrid& solved_cdf() {
  static const CdfGrid grid = cdf_solve({});
  return grid;
}

const DensityGrid& solved_density() {
  static const DensityGrid grid = density_solve({});
  return grid;
}

Rational q(long p, long d) {
  Rational r(p, d);
  r.canonicalize();
  return r;
}

// Integral of phi(x, .) over its support [0, ((1+x)/2)^2], after t = T - s^2
// which removes the inverse square root at the top.
double kernel_mass(double x) {
  const double top = 0.25 * (1.0 + x) * (1.0 + x);
  auto piece = [&](double s_lo, double s_hi) {
    if (s_hi <= s_lo) return 0.0;
    const int n = 20000;
    const double h = (s_hi - s_lo) / n;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double s = s_lo + (i + 0.5) * h;
      acc += kernel_density(x, top - s * s) * 2.0 * s;
    }
    return acc * h;
  };
  const double s_break = x < top ? std::sqrt(top - x) : 0.0;
  return piece(0.0, s_break) + piece(s_break, std::sqrt(top));
}

}  // namespace

TEST_CASE("moments") {
  const MomentTable t = moments(3);
  CHECK(t.moments[0] == 1);
  CHECK(t.moments[1] == q(1, 2));
  CHECK(t.moments[2] == q(4, 15));
  CHECK(t.variance() == q(1, 60));
  CHECK(t.moments[3] == q(187, 1260));
  CHECK_THROWS_AS(moments(0), DomainError);
  CHECK_THROWS_AS(moments(1).variance(), DomainError);
}

TEST_CASE("moment recursion closes with the i = k term kept") {
  const std::size_t k_max = 40;
  const MomentTable t = moments(k_max);
  std::vector<mpz_class> fact(2 * k_max + 3);
  fact[0] = 1;
  for (std::size_t i = 1; i < fact.size(); ++i) fact[i] = fact[i - 1] * static_cast<unsigned long>(i);
  for (std::size_t k = 1; k <= k_max; ++k) {
    Rational sum = 0;
    for (std::size_t i = 0; i <= k; ++i) sum += t.moments[i] / Rational(fact[2 * k - i + 2] * fact[i]);
    CHECK(t.moments[k] == Rational(2 * fact[k + 1] * fact[k]) * sum);
  }
  for (std::size_t k = 1; k <= k_max; ++k) {
    CHECK(t.moments[k] > 0);
    CHECK(t.moments[k] < t.moments[k - 1]);
  }
}

TEST_CASE("float moments") {
  const MomentTable t = moments(60);
  const std::vector<long double> f = moments_float(60);
  for (std::size_t k = 0; k <= 60; ++k)
    CHECK(std::abs(static_cast<double>(f[k]) / t.moments[k].get_d() - 1.0) < 1e-12);
}

TEST_CASE("third moment against perfect samples") {
  const std::vector<double> xs = sample_limit_values(1000000, 31337);
  double s = 0, s2 = 0;
  for (double x : xs) {
    s += x * x * x;
    s2 += x * x * x * x * x * x;
  }
  const double n = static_cast<double>(xs.size());
  const double mean = s / n;
  const double se = std::sqrt((s2 / n - mean * mean) / n);
  CHECK(std::abs(mean - 187.0 / 1260.0) < 4 * se);
}

TEST_CASE("kernel cdf") {
  for (double x : {0.01, 0.3, 0.9, 1.0}) CHECK(kernel_cdf(x, 0.0) == 0.0);
  CHECK(kernel_cdf(0.0, 0.25) == 1.0);
  CHECK(kernel_cdf(1.0, 0.75) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(kernel_cdf(0.4, -0.1) == 0.0);
  CHECK(kernel_cdf(0.4, 2.0) == 1.0);

  // Oracle: simulate sqrt(U) * 1 + sqrt(U)(1 - sqrt(U)).
  RandomStream rng(8, 0);
  const int n = 1000000;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    const double r = std::sqrt(rng.uniform());
    hits += r + r * (1.0 - r) <= 0.75;
  }
  CHECK(std::abs(hits / static_cast<double>(n) - 0.25) < 4 * std::sqrt(0.25 * 0.75 / n));

  // monotone in t, continuous at t = x (x = 1 is the top of the support)
  for (double x : {0.0, 0.2, 0.5, 1.0}) {
    double prev = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      const double v = kernel_cdf(x, i / 1000.0);
      CHECK(v >= prev - 1e-15);
      prev = v;
    }
    if (x > 0 && x < 1) CHECK(kernel_cdf(x, x) == doctest::Approx(kernel_cdf(x, x - 1e-12)).epsilon(1e-9));
  }
}

TEST_CASE("kernel density") {
  for (double x : {0.1, 0.5, 1.0}) CHECK(kernel_density(x, 0.0) == doctest::Approx(0.0));
  CHECK(kernel_density(1.0, 0.125) == doctest::Approx(std::sqrt(8.0 / 7.0) - 1.0).epsilon(1e-14));
  CHECK(kernel_density(1.0, 0.125) == doctest::Approx(SamplerConstants::alpha()).epsilon(1e-14));
  CHECK(std::isinf(kernel_density(0.0, 0.25)));
  for (double x : {0.0, 1.0 / 3.0, 1.0}) {
    CAPTURE(x);
    CHECK(std::abs(kernel_mass(x) - 1.0) < 1e-10);
  }
  // derivative of the cdf
  for (double x : {0.2, 0.7})
    for (double t : {0.05, 0.3, 0.5}) {
      const double h = 1e-6;
      const double num = (kernel_cdf(x, t + h) - kernel_cdf(x, t - h)) / (2 * h);
      if (t < 0.25 * (1 + x) * (1 + x)) CHECK(num == doctest::Approx(kernel_density(x, t)).epsilon(1e-5));
    }
}

TEST_CASE("radicand guard") {
  CHECK(guarded_sqrt(4.0) == 2.0);
  CHECK(guarded_sqrt(-1e-13) == 0.0);
  CHECK_THROWS_AS(guarded_sqrt(-1e-6), ConsistencyError);
}

TEST_CASE("cdf solver reproduces the published table") {
  const CdfGrid& g = solved_cdf();
  REQUIRE(g.converged);
  CHECK(g.cells() == 4096);
  const auto table = fig1_table(g);
  double worst = 0;
  for (int r = 0; r < 20; ++r)
    for (int c = 0; c < 8; ++c) worst = std::max(worst, std::abs(table[r][c] - kFig1Golden[r][c]));
  CHECK(worst < 5e-4);
  CHECK(std::abs(g(0.355) - 0.1376) < 5e-4);
  CHECK(std::abs(g(0.500) - 0.4400) < 5e-4);
  CHECK(std::abs(g(0.700) - 0.9768) < 5e-4);
}

TEST_CASE("cdf grid is a distribution function") {
  const CdfGrid& g = solved_cdf();
  CHECK(g.values.front() == 0.0);
  CHECK(g.values.back() == 1.0);
  CHECK(g(-0.5) == 0.0);
  CHECK(g(1.5) == 1.0);
  for (std::size_t i = 1; i < g.values.size(); ++i) REQUIRE(g.values[i] >= g.values[i - 1]);
}

TEST_CASE("cdf is a fixed point of both forms of the equation") {
  const CdfGrid& g = solved_cdf();
  const std::vector<double> pushed = cdf_push(g);
  double change = 0;
  for (std::size_t i = 0; i < pushed.size(); ++i) change = std::max(change, std::abs(pushed[i] - g.values[i]));
  CHECK(change <= g.residual);

  std::vector<double> ts;
  for (int i = 0; i <= 50; ++i) ts.push_back(i / 50.0);
  const std::vector<double> two = cdf_push_two_sided(g, ts);
  for (std::size_t i = 0; i < ts.size(); ++i) CHECK(std::abs(two[i] - g(ts[i])) < 1e-4);
}

TEST_CASE("cdf grid refinement") {
  CdfSolveOptions coarse;
  coarse.grid = 2048;
  const auto a = fig1_table(cdf_solve(coarse));
  const auto b = fig1_table(solved_cdf());
  for (int r = 0; r < 20; ++r)
    for (int c = 0; c < 8; ++c) CHECK(std::abs(a[r][c] - b[r][c]) < 5e-5);
}

TEST_CASE("cdf solver options") {
  CHECK_THROWS_AS(cdf_solve({.grid = 10}), DomainError);
  CHECK_THROWS_AS(cdf_solve({.tol = 0.0}), DomainError);
  const CdfGrid g = cdf_solve({.grid = 256, .max_iter = 2});
  CHECK_FALSE(g.converged);
  CHECK(g.iterations == 2);
}

TEST_CASE("density properties") {
  const DensityGrid& d = solved_density();
  REQUIRE(d.converged);
  CHECK(std::abs(d.mass - 1.0) < 1e-3);
  CHECK(std::abs(d.mean - 0.5) < 1e-3);
  CHECK(std::abs(d.second_moment - 4.0 / 15.0) < 2e-3);
  CHECK(std::abs(d.eigenvalue - 1.0) < 1e-3);
  CHECK(std::abs(d.values.front()) < 1e-6);
  CHECK(std::abs(d.values.back()) < 1e-6);
  for (std::size_t i = 1; i < d.points.size() && d.points[i] <= 0.25; ++i)
    REQUIRE(d.values[i] >= d.values[i - 1]);
  CHECK(d.max_value() >= 3.0);
  CHECK(d.max_value() <= 4.0);
  CHECK(d.max_value() <= kDensityBound);
  for (double v : d.values) REQUIRE(v >= 0.0);
}

TEST_CASE("density integrates to the cdf") {
  const DensityGrid& d = solved_density();
  const CdfGrid& g = solved_cdf();
  const double h = d.points[1];
  double acc = 0;
  for (std::size_t i = 1; i < d.points.size(); ++i) {
    acc += 0.5 * h * (d.values[i - 1] + d.values[i]);
    if (i % 64 == 0) CHECK(std::abs(acc - g(d.points[i])) < 1e-3);
  }
}

TEST_CASE("density Hoelder bound away from 1") {
  const DensityGrid& d = solved_density();
  const double eps = 0.5;
  const double constant = (9.0 + 6.0 * std::pow(eps, -1.5)) * kDensityBound;
  const std::size_t m = d.points.size() - 1;
  for (std::size_t i = 0; i <= m / 2; i += 7)
    for (std::size_t j = i + 1; j <= m / 2; j += 5)
      REQUIRE(std::abs(d.values[j] - d.values[i]) <=
              constant * std::sqrt(d.points[j] - d.points[i]));
}

TEST_CASE("density near zero") {
  const DensityGrid& d = solved_density();
  // f(t)/sqrt(t) shrinks as t walks down to 0.
  for (std::size_t i = 10; i > 1; --i)
    CHECK(d.values[i - 1] / std::sqrt(d.points[i - 1]) < d.values[i] / std::sqrt(d.points[i]));
  CHECK(d.values[1] / std::sqrt(d.points[1]) < 0.05);
  // and f(t)/t is close to the right derivative
  CHECK(d.values[1] / d.points[1] == doctest::Approx(0.911364).epsilon(5e-3));
}

TEST_CASE("right derivative at zero") {
  const DerivativeEstimate s = right_derivative_series();
  CHECK_FALSE(s.flagged);
  CHECK(std::abs(s.value - 0.911364) < 1e-3);
  CHECK(s.error_bar < 1e-4);
  CHECK(s.value > 0.5);
  CHECK(s.value < 2.0);

  const DerivativeEstimate m = right_derivative_montecarlo(200000, 4242);
  CHECK(m.terms_or_samples == 200000);
  CHECK(std::abs(m.value - s.value) < 2e-3);
  CHECK(std::abs(m.value - s.value) < m.error_bar + s.error_bar);

  CHECK(right_derivative_series(4).flagged);
  CHECK_THROWS_AS(right_derivative_series(1), DomainError);
}

TEST_CASE("tail bound") {
  CHECK(tail_bound(0.05, 2) == doctest::Approx(std::pow(2.0, 2.5) * 0.05));
  CHECK(tail_bound(0.05, 2) == doctest::Approx(0.2828).epsilon(1e-3));
  CHECK(tail_bound(1.0, 1) == doctest::Approx(2.0));
  CHECK_THROWS_AS(tail_bound(0.0, 2), DomainError);
  CHECK_THROWS_AS(tail_bound(0.1, 0), DomainError);
}

TEST_CASE("rate constants") {
  const RateConstants r2 = rate_constants(2.0);
  CHECK(r2.tau_p == doctest::Approx(std::sqrt(0.75)));
  CHECK(r2.kappa_p == doctest::Approx(7.0 / 3.0 * (7.0 + std::sqrt(0.75))));
  CHECK(r2.kappa_p == doctest::Approx(18.354).epsilon(1e-4));

  const RateConstants r1 = rate_constants(1.0);
  CHECK(r1.tau_p == doctest::Approx(0.5 + std::sqrt(M_PI) / (4.0 * std::sqrt(2.0))));
  CHECK(r1.tau_p == doctest::Approx(0.8133).epsilon(1e-4));
  CHECK(r1.kappa_p == doctest::Approx(39.07).epsilon(1e-3));

  const RateConstants w = ks_rate_bound(0.25, kDensityBound);
  CHECK(w.p == doctest::Approx(1.0));
  CHECK(w.omega_eps == doctest::Approx(std::sqrt(2.0 * 109.0 * r1.kappa_p)));
  CHECK(w.omega_eps == doctest::Approx(92.3).epsilon(1e-3));
  CHECK_THROWS_AS(ks_rate_bound(0.3, 109), DomainError);
  CHECK_THROWS_AS(rate_constants(0.5), DomainError);
}
