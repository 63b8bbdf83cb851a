#include "selectlab/exact.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "selectlab/errors.hpp"
#include "selectlab/quickselect.hpp"

namespace selectlab {

namespace {

mpz_class binomial(std::size_t n, std::size_t k) {
  mpz_class out;
  if (k > n) return 0;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

Rational ratio(std::int64_t p, std::int64_t q) {
  Rational r(p, q);
  r.canonicalize();
  return r;
}

void require_n(std::size_t n, const char* what) {
  if (n < 2) throw DomainError(std::string(what) + ": n must be >= 2");
}

}  // namespace

Rational RationalPmf::total() const {
  Rational s = 0;
  for (const auto& m : mass) s += m;
  return s;
}

Rational RationalPmf::mean() const {
  Rational s = 0;
  for (std::size_t i = 0; i < support.size(); ++i) s += mass[i] * support[i];
  return s;
}

Rational RationalPmf::at(std::int64_t k) const {
  auto it = std::lower_bound(support.begin(), support.end(), k);
  if (it == support.end() || *it != k) return 0;
  return mass[static_cast<std::size_t>(it - support.begin())];
}

bool operator==(const RationalPmf& a, const RationalPmf& b) {
  return a.support == b.support && a.mass == b.mass;
}

RationalPmf split_pmf(std::size_t n) {
  require_n(n, "split_pmf");
  RationalPmf pmf;
  const auto nn = static_cast<std::int64_t>(n);
  for (std::int64_t j = 1; j <= nn - 1; ++j) {
    pmf.support.push_back(j);
    pmf.mass.push_back(ratio(j == 1 ? 2 : 1, nn));
  }
  return pmf;
}

RationalPmf swaps_conditional_pmf(std::size_t n, std::size_t j) {
  require_n(n, "swaps_conditional_pmf");
  if (j < 1 || j > n - 1)
    throw DomainError("swaps_conditional_pmf: j must lie in 1..n-1, got " + std::to_string(j));
  RationalPmf pmf;
  if (j == 1) {
    pmf.support = {0, 1};
    pmf.mass = {ratio(1, 2), ratio(1, 2)};
    return pmf;
  }
  const mpz_class denom = binomial(n - 1, n - j);
  const std::size_t k_hi = std::min(j, n - j);
  for (std::size_t k = 1; k <= k_hi; ++k) {
    Rational m(binomial(j, k) * binomial(n - j - 1, n - j - k), denom);
    m.canonicalize();
    pmf.support.push_back(static_cast<std::int64_t>(k));
    pmf.mass.push_back(m);
  }
  return pmf;
}

Rational conditional_swaps_mean(std::size_t n, std::size_t j) {
  require_n(n, "conditional_swaps_mean");
  if (j < 1 || j > n - 1) throw DomainError("conditional_swaps_mean: j must lie in 1..n-1");
  if (j == 1) return ratio(1, 2);
  Rational m(mpz_class(j) * mpz_class(n - j), mpz_class(n - 1));
  m.canonicalize();
  return m;
}

Rational expected_swaps_first_pass(std::size_t n) {
  require_n(n, "expected_swaps_first_pass");
  // P(I=1) E[T|I=1] = (2/n)(1/2); the j >= 2 terms share the factor 1/(n(n-1)).
  unsigned __int128 acc = 0;
  for (std::size_t j = 2; j + 1 <= n; ++j) acc += static_cast<unsigned __int128>(j) * (n - j);
  mpz_class acc_z;
  const auto hi = static_cast<unsigned long>(acc >> 64);
  const auto lo = static_cast<unsigned long>(acc);
  acc_z = hi;
  acc_z <<= 64;
  acc_z += lo;
  Rational rest(acc_z, mpz_class(n) * mpz_class(n - 1));
  rest.canonicalize();
  return Rational(1, n) + rest;
}

Rational harmonic(std::size_t n) {
  Rational h = 0;
  for (std::size_t k = 1; k <= n; ++k) h += Rational(1, k);
  return h;
}

Rational expected_moves_mahmoud(std::size_t n) {
  if (n < 1) throw DomainError("expected_moves_mahmoud: n must be >= 1");
  const Rational h = harmonic(n);
  const Rational nq(n);
  return nq + Rational(2, 3) * h - Rational(17, 9) + Rational(2) * h / (3 * nq) -
         Rational(2) / (9 * nq);
}

namespace {

// E[Y_n] = E[T_n] + (1/n) sum_{j=1}^{n-1} [(j/n)E_j + ((n-j)/n)E_{n-j}]
//          + (1/n) [(1/n)E_1 + ((n-1)/n)E_{n-1}]
//        = (n+1)/6 + (2 S_{n-1} + (n-1)E_{n-1}) / n^2,
// with S_m = sum_{j<=m} j E_j and E_1 = 0. Everything is kept over the common
// denominator 6 (n!)^2, which turns each step into a few multiply-adds by
// machine words.
class SwapsRecurrence {
 public:
  std::size_t n() const { return n_; }

  void step() {
    const unsigned long n = ++n_;
    mpz_mul_ui(q_.get_mpz_t(), q_.get_mpz_t(), n);
    mpz_mul_ui(q_.get_mpz_t(), q_.get_mpz_t(), n);
    mpz_mul_ui(next_.get_mpz_t(), q_.get_mpz_t(), n + 1);
    mpz_addmul_ui(next_.get_mpz_t(), s_.get_mpz_t(), 2);
    mpz_addmul_ui(next_.get_mpz_t(), p_.get_mpz_t(), n - 1);
    p_.swap(next_);
    mpz_mul_ui(s_.get_mpz_t(), s_.get_mpz_t(), n);
    mpz_mul_ui(s_.get_mpz_t(), s_.get_mpz_t(), n);
    mpz_addmul_ui(s_.get_mpz_t(), p_.get_mpz_t(), n);
  }

  Rational value() const {
    Rational r(p_, 6 * q_);
    r.canonicalize();
    return r;
  }

 private:
  std::size_t n_ = 1;
  mpz_class q_ = 1;  // (n!)^2
  mpz_class p_ = 0;  // 6 (n!)^2 E_n
  mpz_class s_ = 0;  // 6 (n!)^2 S_n
  mpz_class next_;
};

}  // namespace

ExactExpectationTable expected_total_swaps(std::size_t n_max) {
  if (n_max < 1) throw DomainError("expected_total_swaps: n_max must be >= 1");
  ExactExpectationTable t;
  t.n_max = n_max;
  t.e_t.assign(n_max + 1, 0);
  t.e_y.assign(n_max + 1, 0);
  t.e_m.assign(n_max + 1, 0);
  t.h.assign(n_max + 1, 0);

  SwapsRecurrence rec;
  Rational harm = 0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    harm += Rational(1, n);
    t.h[n] = harm;
    // n + (2/3)H - 17/9 + 2H/(3n) - 2/(9n) = H 2(n+1)/(3n) + (9n^2 - 17n - 2)/(9n)
    Rational tail(mpz_class(9) * n * n - mpz_class(17) * n - 2, mpz_class(9) * n);
    tail.canonicalize();
    Rational scale(mpz_class(2) * (n + 1), mpz_class(3) * n);
    scale.canonicalize();
    t.e_m[n] = harm * scale + tail;
    if (n >= 2) {
      t.e_t[n] = Rational(n + 1, 6);
      t.e_t[n].canonicalize();
      rec.step();
      t.e_y[n] = rec.value();
    }
  }
  return t;
}

std::vector<Rational> expected_total_swaps_at(const std::vector<std::size_t>& ns) {
  std::vector<std::size_t> order(ns.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return ns[a] < ns[b]; });
  std::vector<Rational> out(ns.size());
  SwapsRecurrence rec;
  for (std::size_t idx : order) {
    if (ns[idx] < 1) throw DomainError("expected_total_swaps_at: n must be >= 1");
    while (rec.n() < ns[idx]) rec.step();
    out[idx] = rec.value();
  }
  return out;
}

std::vector<double> expected_total_swaps_float(std::size_t n_max) {
  if (n_max < 1) throw DomainError("expected_total_swaps_float: n_max must be >= 1");
  std::vector<long double> e(n_max + 1, 0.0L);
  long double weighted_sum = 0.0L;
  for (std::size_t n = 1; n <= n_max; ++n) {
    if (n >= 2) {
      const long double nl = static_cast<long double>(n);
      e[n] = (nl + 1.0L) / 6.0L + (2.0L * weighted_sum + e[1] + (nl - 1.0L) * e[n - 1]) / (nl * nl);
    }
    weighted_sum += static_cast<long double>(n) * e[n];
  }
  return {e.begin(), e.end()};
}

std::uint64_t JointEnumeration::permutations() const {
  std::uint64_t s = 0;
  for (const auto& row : joint)
    for (auto c : row) s += c;
  return s;
}

std::uint64_t JointEnumeration::pairs() const {
  std::uint64_t s = 0;
  for (const auto& [y, c] : y_counts) s += c;
  return s;
}

RationalPmf JointEnumeration::split_marginal() const {
  RationalPmf pmf;
  const std::uint64_t total = permutations();
  for (std::size_t j = 1; j < joint.size(); ++j) {
    const std::uint64_t c = std::accumulate(joint[j].begin(), joint[j].end(), std::uint64_t{0});
    if (c == 0) continue;
    Rational m(mpz_class(static_cast<unsigned long>(c)), mpz_class(static_cast<unsigned long>(total)));
    m.canonicalize();
    pmf.support.push_back(static_cast<std::int64_t>(j));
    pmf.mass.push_back(m);
  }
  return pmf;
}

RationalPmf JointEnumeration::swaps_given_split(std::size_t j) const {
  if (j < 1 || j >= joint.size()) throw DomainError("swaps_given_split: j out of range");
  RationalPmf pmf;
  const auto& row = joint[j];
  const std::uint64_t total = std::accumulate(row.begin(), row.end(), std::uint64_t{0});
  if (total == 0) return pmf;
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (row[k] == 0) continue;
    Rational m(mpz_class(static_cast<unsigned long>(row[k])),
               mpz_class(static_cast<unsigned long>(total)));
    m.canonicalize();
    pmf.support.push_back(static_cast<std::int64_t>(k));
    pmf.mass.push_back(m);
  }
  return pmf;
}

Rational JointEnumeration::mean_exchanges() const {
  mpz_class num = 0;
  for (const auto& [y, c] : y_counts)
    num += mpz_class(static_cast<unsigned long>(y)) * mpz_class(static_cast<unsigned long>(c));
  Rational m(num, mpz_class(static_cast<unsigned long>(pairs())));
  m.canonicalize();
  return m;
}

JointEnumeration enumerate_small(std::size_t n) {
  if (n < 2 || n > kEnumerationMaxN)
    throw ContractViolation("enumerate_small: n must lie in 2.." +
                            std::to_string(kEnumerationMaxN) + " (n! permutations), got " +
                            std::to_string(n));
  JointEnumeration out;
  out.n = n;
  out.joint.assign(n, std::vector<std::uint64_t>(n / 2 + 1, 0));
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 1);
  do {
    auto first = rank_array_unchecked(perm);
    const PartitionOutcome po = hoare_partition(first, 1, n);
    ++out.joint[po.split_index][po.swaps];
    for (std::size_t rank = 1; rank <= n; ++rank) {
      const RunRecord rec = quickselect(rank_array_unchecked(perm), rank);
      ++out.y_counts[rec.exchanges];
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

}  // namespace selectlab
