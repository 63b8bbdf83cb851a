#include "selectlab/perfect_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "selectlab/errors.hpp"
#include "selectlab/limit_law.hpp"
#include "selectlab/parallel.hpp"

namespace selectlab {

namespace {

const double kAlpha = std::sqrt(8.0 / 7.0) - 1.0;
const double kCoalesce = kAlpha / 8.0;
constexpr double kBranchSlack = 1e-9;

}  // namespace

double SamplerConstants::alpha() { return kAlpha; }
double SamplerConstants::coalescence_prob() { return kCoalesce; }

QuantileBreakpoints quantile_breakpoints(double x) {
  const double al = kAlpha;
  const double rest = 8.0 - al;
  const double xx = x * x;
  QuantileBreakpoints bp{};
  bp.a = 8.0 * xx / rest;
  bp.b = 4.0 * (2.0 - (1.0 + x) * std::sqrt(4.0 * xx + 8.0 * x + 2.0)) / rest;
  bp.c = (8.0 * (1.0 - (1.0 + x) * std::sqrt(xx + 2.0 * x)) - al) / rest;
  const double dd = 2.0 + 2.0 * x - std::sqrt(4.0 * xx + 8.0 * x + 2.0);
  bp.d = dd * dd / (16.0 - 2.0 * al);
  bp.e = (8.0 * xx + (1.0 - 8.0 * x) * al) / rest;
  bp.f = (4.0 * xx + 8.0 * x + 2.0 - al - 4.0 * (1.0 + x) * std::sqrt(xx + 2.0 * x)) / rest;
  bp.g = (8.0 * xx - al) / rest;
  return bp;
}

int quantile_branch(double x, double u) {
  const QuantileBreakpoints bp = quantile_breakpoints(x);
  if (x < 0.125) {
    if (u < bp.a) return 1;
    if (u < bp.b) return 2;
    if (u < bp.c) return 3;
    return 4;
  }
  if (x < 0.25) {
    if (u < bp.d) return 1;
    if (u < bp.e) return 5;
    if (u < bp.c) return 3;
    return 4;
  }
  if (u < bp.d) return 1;
  if (u < bp.f) return 5;
  if (u < bp.g) return 6;
  return 4;
}

double cdf_G(double x, double t) {
  const double removed = kAlpha * std::max(0.0, std::min(t - 0.125, 0.125));
  return 8.0 / (8.0 - kAlpha) * (kernel_cdf(x, t) - removed);
}

namespace {

double branch_value(int branch, double x, double u) {
  const double al = kAlpha;
  const double a = 1.0 + x;
  const double a2 = a * a;
  switch (branch) {
    case 1:
      return (al / 8.0 - 1.0) * u + a / 4.0 * std::sqrt(2.0 * (8.0 - al)) * std::sqrt(u);
    case 2: {
      const double w = 8.0 * (1.0 - u) + al * u;
      return (64.0 * a2 * a2 - w * w) / (256.0 * a2);
    }
    case 3: {
      const double rad = 4.0 * (4.0 + al * al) * a2 - 2.0 * al * (8.0 - al) * (1.0 - u) - 4.0 * al * al;
      return (2.0 * al * al + al * (8.0 - al) * (1.0 - u) - 16.0 * a2 + 4.0 * a * guarded_sqrt(rad)) /
             (8.0 * al * al);
    }
    case 4: {
      const double w = (8.0 - al) * (1.0 - u);
      return (64.0 * a2 * a2 - w * w) / (256.0 * a2);
    }
    case 5: {
      const double q = al * u + al - 8.0 * u;
      const double rad = 4.0 * al * al * a2 - 2.0 * (1.0 + al) * q;
      return (4.0 * al * a2 + (1.0 + al) * q + 2.0 * a * guarded_sqrt(rad)) /
             (8.0 * (1.0 + al) * (1.0 + al));
    }
    case 6:
      return (al / 8.0 - 1.0) * u + a / 4.0 * std::sqrt(2.0) * std::sqrt(8.0 * u + al * (1.0 - u)) -
             al / 8.0;
  }
  throw ConsistencyError("quantile_G_inv: unknown branch");
}

// t-interval covered by each branch for the given x.
std::pair<double, double> branch_range(int branch, double x) {
  const double top = 0.25 * (1.0 + x) * (1.0 + x);
  switch (branch) {
    case 1: return {0.0, std::min(x, 0.125)};
    case 2: return {x, 0.125};
    case 3: return {std::max(x, 0.125), 0.25};
    case 4: return {std::max(x, 0.25), top};
    case 5: return {0.125, std::min(x, 0.25)};
    case 6: return {0.25, x};
  }
  return {0.0, 1.0};
}

}  // namespace

double quantile_G_inv(double x, double u) {
  const int branch = quantile_branch(x, u);
  const double t = branch_value(branch, x, u);
  const auto [lo, hi] = branch_range(branch, x);
  if (t < lo - kBranchSlack || t > hi + kBranchSlack || !std::isfinite(t)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "quantile_G_inv: branch " << branch << " at x=" << x << " u=" << u << " gave t=" << t
        << " outside [" << lo << ", " << hi << "]";
    throw ConsistencyError(msg.str());
  }
  return std::clamp(t, lo, hi);
}

double multigamma_update(double x, bool coalesce, double u) {
  return coalesce ? 0.125 * u + 0.125 : quantile_G_inv(x, u);
}

LimitSample cftp_sample(RandomStream& rng) {
  // tau on {1, 2, ...}: P(tau > k) = (1 - alpha/8)^k
  const double v = rng.uniform_open_zero();
  const auto failures = static_cast<std::uint64_t>(std::floor(std::log(v) / std::log1p(-kCoalesce)));
  LimitSample s;
  s.tau = failures + 1;
  double x = 0.125 * rng.uniform() + 0.125;
  for (std::uint64_t k = 1; k < s.tau; ++k) x = quantile_G_inv(x, rng.uniform());
  s.value = x;
  s.draws_used = s.tau + 1;
  return s;
}

std::vector<LimitSample> sample_limit(std::size_t count, std::uint64_t seed, unsigned threads) {
  std::vector<LimitSample> out(count);
  parallel_for(count, threads, [&](std::size_t i) {
    RandomStream rng(seed, i);
    out[i] = cftp_sample(rng);
  });
  return out;
}

std::vector<double> sample_limit_values(std::size_t count, std::uint64_t seed, unsigned threads) {
  std::vector<double> out(count);
  parallel_for(count, threads, [&](std::size_t i) {
    RandomStream rng(seed, i);
    out[i] = cftp_sample(rng).value;
  });
  return out;
}

double two_sample_ks(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("two_sample_ks: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double two_sample_ks_threshold(std::size_t n, std::size_t m, double level) {
  const double c = std::sqrt(-0.5 * std::log(level / 2.0));
  const double nd = static_cast<double>(n), md = static_cast<double>(m);
  return c * std::sqrt((nd + md) / (nd * md));
}

std::vector<double> multigamma_draws(double x, std::size_t runs, RandomStream& rng) {
  std::vector<double> out(runs);
  for (auto& v : out) {
    const bool coalesce = rng.bernoulli(kCoalesce);
    v = multigamma_update(x, coalesce, rng.uniform());
  }
  return out;
}

KernelCheck kernel_update_check(double x, std::size_t runs, std::uint64_t seed) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("kernel_update_check: x must lie in [0,1]");
  RandomStream update_rng(derive_seed(seed, 1), 0);
  RandomStream direct_rng(derive_seed(seed, 2), 0);
  std::vector<double> updates = multigamma_draws(x, runs, update_rng);
  std::vector<double> direct(runs);
  for (auto& v : direct) {
    const double s = std::sqrt(direct_rng.uniform());
    v = s * x + s * (1.0 - s);
  }
  KernelCheck kc;
  kc.x = x;
  kc.runs = runs;
  kc.ks = two_sample_ks(std::move(updates), std::move(direct));
  kc.threshold = two_sample_ks_threshold(runs, runs);
  return kc;
}

}  // namespace selectlab
