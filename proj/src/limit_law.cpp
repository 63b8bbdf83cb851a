#include "selectlab/limit_law.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "selectlab/errors.hpp"
#include "selectlab/parallel.hpp"
#include "selectlab/perfect_sampler.hpp"

namespace selectlab {

double guarded_sqrt(double radicand) {
  if (radicand >= 0.0) return std::sqrt(radicand);
  if (radicand >= -kRadicandSlack) return 0.0;
  throw ConsistencyError("negative radicand " + std::to_string(radicand));
}

// ---------------------------------------------------------------------------
// Moments

Rational MomentTable::variance() const {
  if (k_max < 2) throw DomainError("variance needs k_max >= 2");
  return moments[2] - moments[1] * moments[1];
}

MomentTable moments(std::size_t k_max) {
  if (k_max < 1) throw DomainError("moments: k_max must be >= 1");
  std::vector<mpz_class> fact(2 * k_max + 3);
  fact[0] = 1;
  for (std::size_t i = 1; i < fact.size(); ++i) fact[i] = fact[i - 1] * static_cast<unsigned long>(i);

  MomentTable table;
  table.k_max = k_max;
  table.moments.assign(k_max + 1, 0);
  table.moments[0] = 1;
  for (std::size_t k = 1; k <= k_max; ++k) {
    Rational sum = 0;
    for (std::size_t i = 0; i < k; ++i) {
      Rational term(table.moments[i]);
      term /= Rational(fact[2 * k - i + 2] * fact[i]);
      sum += term;
    }
    table.moments[k] = Rational(2 * fact[k + 2] * fact[k - 1]) * sum;
  }
  return table;
}

std::vector<long double> moments_float(std::size_t k_max) {
  std::vector<long double> m(k_max + 1, 0.0L);
  m[0] = 1.0L;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const long double log_front = std::log(2.0L) + std::lgamma(static_cast<long double>(k + 3)) +
                                  std::lgamma(static_cast<long double>(k));
    long double sum = 0.0L;
    for (std::size_t i = 0; i < k; ++i) {
      const long double log_c = log_front - std::lgamma(static_cast<long double>(2 * k - i + 3)) -
                                std::lgamma(static_cast<long double>(i + 1));
      sum += m[i] * std::exp(log_c);
    }
    m[k] = sum;
  }
  return m;
}

// ---------------------------------------------------------------------------
// Kernel

double kernel_cdf(double x, double t) {
  if (t < 0.0) return 0.0;
  const double a = 1.0 + x;
  if (t >= 0.25 * a * a) return 1.0;
  const double root = guarded_sqrt(a * a - 4.0 * t);
  if (t < x) {
    // smaller root of s^2 - (1+x)s + t, written without cancellation
    const double s = 2.0 * t / (a + root);
    return s * s;
  }
  return 1.0 - a * root;
}

double kernel_g(double x, double t) {
  const double a = 1.0 + x;
  return a / std::sqrt(a * a - 4.0 * t);
}

double kernel_g_primitive(double x, double t) {
  const double a = 1.0 + x;
  return guarded_sqrt(a * a - 4.0 * t);
}

double kernel_density(double x, double t) {
  if (t < 0.0) return 0.0;
  const double p_t = 2.0 * std::sqrt(t) - 1.0;
  if (x == p_t) return std::numeric_limits<double>::infinity();
  if (p_t < x && x <= t) return 2.0 * kernel_g(x, t);
  if (t < x && x <= 1.0) return kernel_g(x, t) - 1.0;
  return 0.0;
}

// ---------------------------------------------------------------------------
// Distribution function

double CdfGrid::operator()(double t) const {
  if (t <= 0.0) return t < 0.0 ? 0.0 : values.front();
  if (t >= 1.0) return 1.0;
  const double m = static_cast<double>(cells());
  const double pos = t * m;
  auto i = static_cast<std::size_t>(pos);
  if (i >= cells()) i = cells() - 1;
  const double w = pos - static_cast<double>(i);
  return values[i] + w * (values[i + 1] - values[i]);
}

namespace {

struct Atom {
  double x;
  double w;
};

std::vector<Atom> cell_atoms(const std::vector<double>& values) {
  const std::size_t m = values.size() - 1;
  std::vector<Atom> atoms;
  atoms.reserve(m);
  for (std::size_t c = 0; c < m; ++c) {
    const double w = values[c + 1] - values[c];
    if (w > 0.0) atoms.push_back({(static_cast<double>(c) + 0.5) / static_cast<double>(m), w});
  }
  // the mass sitting at 0 itself
  if (values[0] > 0.0) atoms.insert(atoms.begin(), Atom{0.0, values[0]});
  return atoms;
}

std::vector<double> mixture_cdf(const std::vector<Atom>& atoms, const std::vector<double>& ts) {
  const std::size_t npts = ts.size();
  std::vector<double> out(npts, 0.0);
  std::vector<double> step(npts + 1, 0.0);
  for (const Atom& atom : atoms) {
    const double a = 1.0 + atom.x;
    const double a2 = a * a;
    const double t_top = 0.25 * a2;
    const auto end = static_cast<std::size_t>(
        std::lower_bound(ts.begin(), ts.end(), t_top) - ts.begin());
    for (std::size_t i = 0; i < end; ++i) {
      const double t = ts[i];
      const double rad = a2 - 4.0 * t;
      if (rad < -kRadicandSlack) throw ConsistencyError("cdf_solve: negative radicand");
      const double root = rad > 0.0 ? std::sqrt(rad) : 0.0;
      double v;
      if (t < atom.x) {
        const double s = 2.0 * t / (a + root);
        v = s * s;
      } else {
        v = 1.0 - a * root;
      }
      out[i] += atom.w * v;
    }
    step[end] += atom.w;
  }
  double ones = 0.0;
  for (std::size_t i = 0; i < npts; ++i) {
    ones += step[i];
    out[i] = std::clamp(out[i] + ones, 0.0, 1.0);
  }
  return out;
}

std::vector<double> uniform_nodes(std::size_t m) {
  std::vector<double> ts(m + 1);
  for (std::size_t i = 0; i <= m; ++i) ts[i] = static_cast<double>(i) / static_cast<double>(m);
  return ts;
}

}  // namespace

CdfGrid cdf_solve(const CdfSolveOptions& opts) {
  if (opts.grid < 64) throw DomainError("cdf_solve: grid must be >= 64");
  if (!(opts.tol > 0.0)) throw DomainError("cdf_solve: tol must be > 0");
  CdfGrid grid;
  grid.points = uniform_nodes(opts.grid);
  grid.values.assign(opts.grid + 1, 1.0);  // point mass at 0
  std::vector<Atom> atoms{{0.0, 1.0}};
  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    std::vector<double> next = mixture_cdf(atoms, grid.points);
    double change = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i)
      change = std::max(change, std::abs(next[i] - grid.values[i]));
    grid.values = std::move(next);
    grid.values.back() = 1.0;
    grid.residual = change;
    grid.iterations = it;
    if (change < opts.tol) {
      grid.converged = true;
      break;
    }
    atoms = cell_atoms(grid.values);
  }
  return grid;
}

std::vector<double> cdf_push(const CdfGrid& grid) {
  return mixture_cdf(cell_atoms(grid.values), grid.points);
}

std::vector<double> cdf_push_two_sided(const CdfGrid& grid, const std::vector<double>& ts,
                                       std::size_t quad_points) {
  std::vector<double> out(ts.size(), 0.0);
  const double h = 1.0 / static_cast<double>(quad_points);
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double t = ts[k];
    double acc = 0.0;
    // P(uX + u(1-u) <= t) weighted by 2u (the two branches are mirror images)
    for (std::size_t q = 0; q < quad_points; ++q) {
      const double u = (static_cast<double>(q) + 0.5) * h;
      acc += 2.0 * u * grid((t - u * (1.0 - u)) / u);
    }
    out[k] = acc * h;
  }
  return out;
}

std::vector<std::vector<double>> fig1_table(const CdfGrid& grid) {
  std::vector<std::vector<double>> table(20, std::vector<double>(8));
  for (int r = 0; r < 20; ++r)
    for (int c = 0; c < 8; ++c) table[r][c] = grid(c / 10.0 + r / 200.0);
  return table;
}

// ---------------------------------------------------------------------------
// Density

double DensityGrid::max_value() const { return *std::max_element(values.begin(), values.end()); }

double density_map(const std::vector<double>& f, double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const std::size_t m = f.size();
  const double md = static_cast<double>(m);
  const double lo = std::max(0.0, 2.0 * std::sqrt(t) - 1.0);

  // Walk the breakpoints lo < nodes... < t < nodes... < 1, integrating g f
  // exactly per piece through G and subtracting the plain integral of f
  // above t.
  double below = 0.0, above = 0.0, plain_above = 0.0;
  double x_prev = lo;
  double g_prev = kernel_g_primitive(lo, t);
  auto c = static_cast<std::size_t>(lo * md);
  if (c >= m) c = m - 1;
  bool passed_t = false;
  while (x_prev < 1.0) {
    const double node = static_cast<double>(c + 1) / md;
    double x_next = node;
    bool hits_t = false;
    if (!passed_t && t < node) {
      x_next = t;
      hits_t = true;
    }
    if (x_next > x_prev) {
      const double g_next = kernel_g_primitive(x_next, t);
      const double piece = f[c] * (g_next - g_prev);
      if (passed_t) {
        above += piece;
        plain_above += f[c] * (x_next - x_prev);
      } else {
        below += piece;
      }
      g_prev = g_next;
      x_prev = x_next;
    }
    if (hits_t) {
      passed_t = true;
    } else {
      ++c;
      if (c >= m) break;
    }
  }
  return 2.0 * below + above - plain_above;
}

namespace {

void moments_trapezoid(DensityGrid& d) {
  const std::size_t m = d.points.size() - 1;
  const double h = 1.0 / static_cast<double>(m);
  double m0 = 0, m1 = 0, m2 = 0;
  for (std::size_t i = 0; i <= m; ++i) {
    const double w = (i == 0 || i == m) ? 0.5 : 1.0;
    const double t = d.points[i];
    m0 += w * d.values[i];
    m1 += w * t * d.values[i];
    m2 += w * t * t * d.values[i];
  }
  d.mass = m0 * h;
  d.mean = m1 * h;
  d.second_moment = m2 * h;
}

}  // namespace

DensityGrid density_solve(const DensitySolveOptions& opts) {
  if (opts.grid < 64) throw DomainError("density_solve: grid must be >= 64");
  if (!(opts.tol > 0.0)) throw DomainError("density_solve: tol must be > 0");
  const std::size_t m = opts.grid;
  const double h = 1.0 / static_cast<double>(m);
  std::vector<double> f(m, 1.0), next(m);
  DensityGrid d;
  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    double mass_in = 0.0, mass_out = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
      next[c] = density_map(f, (static_cast<double>(c) + 0.5) * h);
      mass_in += f[c] * h;
      mass_out += next[c] * h;
    }
    double change = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
      next[c] /= mass_out;
      change = std::max(change, std::abs(next[c] - f[c]));
    }
    f.swap(next);
    d.eigenvalue = mass_out / mass_in;
    d.residual = change;
    d.iterations = it;
    if (change < opts.tol) {
      d.converged = true;
      break;
    }
  }
  d.points = uniform_nodes(m);
  d.values.resize(m + 1);
  for (std::size_t i = 0; i <= m; ++i) d.values[i] = density_map(f, d.points[i]);
  moments_trapezoid(d);
  return d;
}

// ---------------------------------------------------------------------------
// Right derivative at zero

DerivativeEstimate right_derivative_series(std::size_t k_max) {
  if (k_max < 2) throw DomainError("right_derivative_series: k_max must be >= 2");
  const MomentTable table = moments(k_max);
  Rational partial = 0, previous = 0;
  for (std::size_t k = 0; k <= k_max; ++k) {
    previous = partial;
    Rational term = table.moments[k] * static_cast<unsigned long>(2 * (k + 1));
    if (k % 2 == 0)
      partial += term;
    else
      partial -= term;
  }
  DerivativeEstimate est;
  const double a = previous.get_d(), b = partial.get_d();
  est.value = 0.5 * (a + b);
  est.error_bar = 0.5 * std::abs(b - a);
  est.terms_or_samples = k_max + 1;
  est.flagged = est.error_bar > 1e-4;
  return est;
}

DerivativeEstimate right_derivative_montecarlo(std::size_t samples, std::uint64_t seed,
                                               unsigned threads) {
  if (samples < 2) throw DomainError("right_derivative_montecarlo: need >= 2 samples");
  return right_derivative_from_samples(sample_limit_values(samples, seed, threads));
}

DerivativeEstimate right_derivative_from_samples(std::span<const double> xs) {
  if (xs.size() < 2) throw DomainError("right_derivative_from_samples: need >= 2 samples");
  double sum = 0.0, sum_sq = 0.0;
  for (double x : xs) {
    const double v = 2.0 / ((1.0 + x) * (1.0 + x));
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(xs.size());
  const double mean = sum / n;
  const double var = (sum_sq - n * mean * mean) / (n - 1.0);
  DerivativeEstimate est;
  est.value = mean;
  est.error_bar = 3.0 * std::sqrt(var / n);
  est.terms_or_samples = xs.size();
  return est;
}

// ---------------------------------------------------------------------------
// Tail and rate constants

double tail_bound(double eps, int k) {
  if (!(eps > 0.0)) throw DomainError("tail_bound: eps must be > 0");
  if (k < 1) throw DomainError("tail_bound: k must be >= 1");
  const double kd = k;
  return std::exp2(kd * (kd + 3.0) / 4.0) * std::pow(eps, kd / 2.0);
}

RateConstants rate_constants(double p) {
  if (!(p >= 1.0)) throw DomainError("rate_constants: p must be >= 1");
  RateConstants rc;
  rc.p = p;
  rc.tau_p = std::pow(0.5 + std::tgamma(p / 2.0 + 1.0) / std::exp2(p / 2.0 + 1.0), 1.0 / p);
  rc.kappa_p = (2.0 * p + 3.0) / (2.0 * p - 1.0) * (7.0 + rc.tau_p);
  return rc;
}

RateConstants ks_rate_bound(double eps, double density_bound) {
  if (!(eps > 0.0 && eps <= 0.25)) throw DomainError("ks_rate_bound: eps must lie in (0, 1/4]");
  if (!(density_bound > 0.0)) throw DomainError("ks_rate_bound: density bound must be > 0");
  RateConstants rc = rate_constants(-1.0 + 1.0 / (2.0 * eps));
  rc.eps = eps;
  rc.density_bound_used = density_bound;
  rc.omega_eps = std::pow(1.0 / (2.0 * eps), 2.0 * eps) *
                 std::pow(density_bound * rc.kappa_p, 1.0 - 2.0 * eps);
  return rc;
}

}  // namespace selectlab
