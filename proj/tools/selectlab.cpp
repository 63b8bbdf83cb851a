// selectlab: command-line front end.
//
// Exit status: 0 success, 2 usage error, 1 numeric-consistency failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "selectlab/errors.hpp"
#include "selectlab/exact.hpp"
#include "selectlab/experiments.hpp"
#include "selectlab/io.hpp"
#include "selectlab/limit_law.hpp"
#include "selectlab/perfect_sampler.hpp"
#include "selectlab/quickselect.hpp"
#include "selectlab/rng.hpp"

using json = nlohmann::ordered_json;
namespace sl = selectlab;

namespace {

constexpr const char* kSeedEnv = "SELECTLAB_SEED";

struct Common {
  std::uint64_t seed = sl::kDefaultSeed;
  std::string format = "csv";
  std::string out;
  unsigned threads = 1;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flag > environment > built-in default.
std::uint64_t resolve_seed(const CLI::App& app, std::uint64_t flag_value) {
  const CLI::App* sub = app.get_subcommands().front();
  if (sub->get_option("--seed")->count() > 0) return flag_value;
  if (const char* env = std::getenv(kSeedEnv); env != nullptr && *env != '\0') {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used, 0);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
      return v;
    } catch (const std::exception&) {
      throw UsageError(std::string(kSeedEnv) + " is not an unsigned integer: " + env);
    }
  }
  return sl::kDefaultSeed;
}

class Output {
 public:
  Output(const std::string& path, bool binary) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(
        path, binary ? std::ios::out | std::ios::binary : std::ios::out);
    if (!*file_) throw UsageError("cannot open output file: " + path);
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void emit_json(Output& out, const json& j) { out.stream() << j.dump(2) << '\n'; }

json rational_map(const std::vector<sl::Rational>& values, std::size_t first) {
  json j = json::object();
  for (std::size_t k = first; k < values.size(); ++k)
    j[std::to_string(k)] = sl::io::fraction(values[k]);
  return j;
}

json pmf_json(const sl::RationalPmf& pmf) {
  json j = json::object();
  for (std::size_t i = 0; i < pmf.support.size(); ++i)
    j[std::to_string(pmf.support[i])] = sl::io::fraction(pmf.mass[i]);
  return j;
}

void add_common(CLI::App* sub, Common& c, std::uint64_t& seed_flag,
                const std::string& formats = "csv,json") {
  sub->add_option("--seed", seed_flag,
                  "RNG seed (default " + std::to_string(sl::kDefaultSeed) + ", or $" +
                      kSeedEnv + ")");
  std::vector<std::string> allowed;
  std::stringstream ss(formats);
  for (std::string f; std::getline(ss, f, ',');) allowed.push_back(f);
  sub->add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember(allowed))
      ->capture_default_str();
  sub->add_option("--out", c.out, "Output path (default stdout)");
  sub->add_option("--threads", c.threads, "Worker threads")
      ->check(CLI::Range(1u, 1024u))
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Key exchanges in Quickselect: exact laws, limit law, perfect sampling"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  Common c;
  std::uint64_t seed_flag = 0;
  std::function<void()> action;

  // partition-dist
  std::size_t pd_n = 8;
  auto* pd = app.add_subcommand("partition-dist", "Exact law of the split index and first-pass swaps");
  pd->add_option("--n", pd_n, "Array size")->check(CLI::Range(std::size_t{2}, std::size_t{100000}))->capture_default_str();
  add_common(pd, c, seed_flag);
  pd->callback([&] {
    action = [&] {
      Output out(c.out, false);
      const sl::RationalPmf split = sl::split_pmf(pd_n);
      if (c.format == "json") {
        json j;
        j["n"] = pd_n;
        j["split"] = pmf_json(split);
        json cond = json::object();
        for (std::size_t j_ = 1; j_ < pd_n; ++j_)
          cond[std::to_string(j_)] = pmf_json(sl::swaps_conditional_pmf(pd_n, j_));
        j["swaps_given_split"] = cond;
        j["first_pass_mean"] = sl::io::fraction(sl::expected_swaps_first_pass(pd_n));
        emit_json(out, j);
        return;
      }
      auto& os = out.stream();
      os << "j,k,split,split_fraction,swaps,swaps_fraction\n";
      for (std::size_t idx = 0; idx < split.support.size(); ++idx) {
        const auto j_ = static_cast<std::size_t>(split.support[idx]);
        const sl::RationalPmf cond = sl::swaps_conditional_pmf(pd_n, j_);
        for (std::size_t k = 0; k < cond.support.size(); ++k)
          os << j_ << ',' << cond.support[k] << ',' << sl::io::decimal(split.mass[idx]) << ','
             << sl::io::fraction(split.mass[idx]) << ',' << sl::io::decimal(cond.mass[k]) << ','
             << sl::io::fraction(cond.mass[k]) << '\n';
      }
    };
  });

  // run
  std::size_t run_n = 1000, run_runs = 10;
  auto* run = app.add_subcommand("run", "Quickselect on random permutations with a uniform rank");
  run->add_option("--n", run_n, "Array size")->check(CLI::PositiveNumber)->capture_default_str();
  run->add_option("--runs", run_runs, "Number of runs")->check(CLI::PositiveNumber)->capture_default_str();
  add_common(run, c, seed_flag);
  run->callback([&] {
    action = [&] {
      const std::uint64_t seed = resolve_seed(app, seed_flag);
      std::vector<sl::RunRecord> records(run_runs);
      for (std::size_t i = 0; i < run_runs; ++i) records[i] = sl::run_random(run_n, seed, i);
      Output out(c.out, false);
      if (c.format == "json") {
        json arr = json::array();
        for (const auto& r : records)
          arr.push_back({{"n", r.n}, {"rank", r.rank}, {"exchanges", r.exchanges}, {"normalized", r.normalized}});
        emit_json(out, {{"seed", seed}, {"runs", arr}});
      } else {
        sl::io::write_run_csv(out.stream(), records);
      }
    };
  });

  // exact-mean
  std::size_t em_n = 100;
  std::vector<std::size_t> em_at;
  bool em_float = false;
  auto* em = app.add_subcommand("exact-mean", "Exact E[Y_n] from the recurrence");
  em->add_option("--n", em_n, "Largest n of the table")->check(CLI::PositiveNumber)->capture_default_str();
  em->add_option("--at", em_at, "Only these n (comma separated); skips the full table")->delimiter(',');
  em->add_flag("--float", em_float, "Long-double recurrence instead of rationals");
  add_common(em, c, seed_flag);
  em->callback([&] {
    action = [&] {
      Output out(c.out, false);
      auto& os = out.stream();
      if (em_float) {
        const std::vector<double> e = sl::expected_total_swaps_float(em_n);
        if (c.format == "json") {
          json j = json::object();
          for (std::size_t n = 1; n <= em_n; ++n) j[std::to_string(n)] = e[n];
          emit_json(out, j);
        } else {
          os << "n,value\n";
          for (std::size_t n = 1; n <= em_n; ++n) os << n << ',' << sl::io::decimal(e[n]) << '\n';
        }
        return;
      }
      std::vector<std::size_t> ns = em_at;
      std::vector<sl::Rational> values;
      if (ns.empty()) {
        ns.resize(em_n);
        std::iota(ns.begin(), ns.end(), std::size_t{1});
        const sl::ExactExpectationTable t = sl::expected_total_swaps(em_n);
        values.assign(t.e_y.begin() + 1, t.e_y.end());
      } else {
        values = sl::expected_total_swaps_at(ns);
      }
      if (c.format == "json") {
        json j = json::object();
        for (std::size_t i = 0; i < ns.size(); ++i) j[std::to_string(ns[i])] = sl::io::fraction(values[i]);
        emit_json(out, j);
      } else {
        os << "n,value,fraction\n";
        for (std::size_t i = 0; i < ns.size(); ++i)
          os << ns[i] << ',' << sl::io::decimal(values[i]) << ',' << sl::io::fraction(values[i]) << '\n';
      }
    };
  });

  // moves
  std::vector<std::size_t> mv_n{10000};
  std::size_t mv_runs = 100000;
  auto* mv = app.add_subcommand("moves", "Expected data moves against twice the exchanges");
  mv->add_option("--n", mv_n, "Sizes (comma separated)")->delimiter(',')->check(CLI::PositiveNumber)->capture_default_str();
  mv->add_option("--runs", mv_runs, "Monte Carlo runs for the variance column (0 to skip)")->capture_default_str();
  add_common(mv, c, seed_flag);
  mv->callback([&] {
    action = [&] {
      const std::uint64_t seed = resolve_seed(app, seed_flag);
      const auto rows = sl::moves_vs_exchanges_report(mv_n, mv_runs, seed, c.threads);
      Output out(c.out, false);
      if (c.format == "json") {
        json arr = json::array();
        for (const auto& r : rows) {
          json j{{"n", r.n},
                 {"expected_moves", sl::io::fraction(r.expected_moves)},
                 {"twice_exchanges", sl::io::fraction(r.twice_exchanges)},
                 {"difference", sl::io::fraction(r.difference)},
                 {"difference_over_n", r.difference_over_n},
                 {"moves_over_n", r.moves_over_n}};
          if (r.runs > 0) {
            j["runs"] = r.runs;
            j["var_twice_over_n2"] = r.var_twice_over_n2;
            j["var_std_error"] = r.var_std_error;
          }
          arr.push_back(j);
        }
        emit_json(out, {{"seed", seed},
                        {"variance_band", {sl::kMovesVarianceLower, sl::kMovesVarianceUpper}},
                        {"rows", arr}});
      } else {
        auto& os = out.stream();
        os << "n,expected_moves,twice_exchanges,difference,difference_over_n,moves_over_n,runs,"
              "var_twice_over_n2,var_std_error\n";
        for (const auto& r : rows)
          os << r.n << ',' << sl::io::decimal(r.expected_moves) << ','
             << sl::io::decimal(r.twice_exchanges) << ',' << sl::io::decimal(r.difference) << ','
             << sl::io::decimal(r.difference_over_n) << ',' << sl::io::decimal(r.moves_over_n) << ','
             << r.runs << ',' << sl::io::decimal(r.var_twice_over_n2) << ','
             << sl::io::decimal(r.var_std_error) << '\n';
      }
    };
  });

  // moments
  std::size_t mo_k = 10;
  auto* mo = app.add_subcommand("moments", "Exact moments E[X^k] of the limit law");
  mo->add_option("--kmax", mo_k, "Highest moment")->check(CLI::Range(std::size_t{1}, std::size_t{5000}))->capture_default_str();
  add_common(mo, c, seed_flag);
  mo->callback([&] {
    action = [&] {
      const sl::MomentTable t = sl::moments(mo_k);
      Output out(c.out, false);
      if (c.format == "json") {
        emit_json(out, rational_map(t.moments, 1));
      } else {
        sl::io::write_rational_column(out.stream(), t.moments, 1, "k,value,fraction");
      }
    };
  });

  // cdf
  sl::CdfSolveOptions cdf_opts;
  bool cdf_fig1 = false;
  auto* cdf = app.add_subcommand("cdf", "Distribution function of the limit law on a grid");
  cdf->add_option("--grid", cdf_opts.grid, "Grid cells")->check(CLI::Range(std::size_t{8}, std::size_t{1} << 20))->capture_default_str();
  cdf->add_option("--tol", cdf_opts.tol, "Sup-norm stopping tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  cdf->add_option("--max-iter", cdf_opts.max_iter, "Iteration cap")->check(CLI::PositiveNumber)->capture_default_str();
  cdf->add_flag("--fig1", cdf_fig1, "Print F(c/10 + r/200) as a 20x8 table");
  add_common(cdf, c, seed_flag);
  cdf->callback([&] {
    action = [&] {
      const sl::CdfGrid g = sl::cdf_solve(cdf_opts);
      if (!g.converged)
        throw sl::ConsistencyError("cdf: no convergence after " + std::to_string(g.iterations) +
                                   " iterations (residual " + sl::io::decimal(g.residual) + ")");
      Output out(c.out, false);
      if (cdf_fig1) {
        const auto table = sl::fig1_table(g);
        if (c.format == "json") {
          json rows = json::array();
          for (const auto& r : table) rows.push_back(r);
          emit_json(out, {{"columns", {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7}}, {"row_step", 0.005}, {"rows", rows}});
        } else {
          sl::io::write_fig1(out.stream(), table);
        }
        return;
      }
      if (c.format == "json") {
        emit_json(out, {{"grid", g.cells()}, {"iterations", g.iterations}, {"residual", g.residual},
                        {"converged", g.converged}, {"t", g.points}, {"F", g.values}});
      } else {
        sl::io::write_cdf_csv(out.stream(), g);
      }
    };
  });

  // density
  sl::DensitySolveOptions den_opts;
  auto* den = app.add_subcommand("density", "Density of the limit law on a grid");
  den->add_option("--grid", den_opts.grid, "Grid cells")->check(CLI::Range(std::size_t{8}, std::size_t{1} << 20))->capture_default_str();
  den->add_option("--tol", den_opts.tol, "Sup-norm stopping tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  den->add_option("--max-iter", den_opts.max_iter, "Iteration cap")->check(CLI::PositiveNumber)->capture_default_str();
  add_common(den, c, seed_flag);
  den->callback([&] {
    action = [&] {
      const sl::DensityGrid g = sl::density_solve(den_opts);
      if (!g.converged)
        throw sl::ConsistencyError("density: no convergence after " + std::to_string(g.iterations) +
                                   " iterations (residual " + sl::io::decimal(g.residual) + ")");
      Output out(c.out, false);
      if (c.format == "json") {
        emit_json(out, {{"grid", g.points.size() - 1}, {"iterations", g.iterations},
                        {"residual", g.residual}, {"eigenvalue", g.eigenvalue}, {"mass", g.mass},
                        {"mean", g.mean}, {"second_moment", g.second_moment},
                        {"max", g.max_value()}, {"t", g.points}, {"f", g.values}});
      } else {
        sl::io::write_density_csv(out.stream(), g);
      }
    };
  });

  // sample
  std::size_t sa_count = 1000;
  auto* sa = app.add_subcommand("sample", "Exact draws from the limit law by coupling from the past");
  sa->add_option("--count", sa_count, "Number of draws")->check(CLI::PositiveNumber)->capture_default_str();
  add_common(sa, c, seed_flag, "csv,json,binary");
  sa->callback([&] {
    action = [&] {
      const std::uint64_t seed = resolve_seed(app, seed_flag);
      const auto draws = sl::sample_limit(sa_count, seed, c.threads);
      Output out(c.out, c.format == "binary");
      if (c.format == "json") {
        double sum = 0, lo = 1, hi = 0, tau = 0;
        for (const auto& d : draws) {
          sum += d.value;
          lo = std::min(lo, d.value);
          hi = std::max(hi, d.value);
          tau += static_cast<double>(d.tau);
        }
        const double n = static_cast<double>(draws.size());
        const double mean = sum / n;
        double ss = 0;
        for (const auto& d : draws) ss += (d.value - mean) * (d.value - mean);
        emit_json(out, {{"seed", seed}, {"count", draws.size()}, {"mean", mean},
                        {"variance", draws.size() > 1 ? ss / (n - 1) : 0.0}, {"min", lo},
                        {"max", hi}, {"mean_tau", tau / n}});
        return;
      }
      std::vector<double> values(draws.size());
      for (std::size_t i = 0; i < draws.size(); ++i) values[i] = draws[i].value;
      if (c.format == "binary") {
        sl::io::write_binary(out.stream(), values);
      } else {
        auto& os = out.stream();
        os << "x\n";
        for (double v : values) os << sl::io::decimal(v) << '\n';
      }
    };
  });

  // kernel-check
  std::vector<double> kc_x{0.0, 0.3, 1.0};
  std::size_t kc_runs = 1000000;
  auto* kc = app.add_subcommand("kernel-check", "Two-sample KS: multigamma updates against direct kernel draws");
  kc->add_option("--x", kc_x, "Starting points (comma separated)")->delimiter(',')->check(CLI::Range(0.0, 1.0))->capture_default_str();
  kc->add_option("--runs", kc_runs, "Draws per side")->check(CLI::PositiveNumber)->capture_default_str();
  add_common(kc, c, seed_flag);
  int kc_status = 0;
  kc->callback([&] {
    action = [&] {
      const std::uint64_t seed = resolve_seed(app, seed_flag);
      std::vector<sl::KernelCheck> checks;
      for (std::size_t i = 0; i < kc_x.size(); ++i)
        checks.push_back(sl::kernel_update_check(kc_x[i], kc_runs, sl::derive_seed(seed, i)));
      Output out(c.out, false);
      if (c.format == "json") {
        json arr = json::array();
        for (const auto& k : checks)
          arr.push_back({{"x", k.x}, {"runs", k.runs}, {"ks", k.ks}, {"threshold", k.threshold}, {"passed", k.passed()}});
        emit_json(out, {{"seed", seed}, {"checks", arr}});
      } else {
        auto& os = out.stream();
        os << "x,runs,ks,threshold,passed\n";
        for (const auto& k : checks)
          os << sl::io::decimal(k.x) << ',' << k.runs << ',' << sl::io::decimal(k.ks) << ','
             << sl::io::decimal(k.threshold) << ',' << (k.passed() ? "true" : "false") << '\n';
      }
      for (const auto& k : checks)
        if (!k.passed()) kc_status = 1;
    };
  });

  // converge
  std::vector<std::size_t> cv_n{100, 1000, 10000};
  std::size_t cv_runs = 100000;
  sl::CdfSolveOptions cv_cdf;
  auto* cv = app.add_subcommand("converge", "KS distance of Y_n/n to the limit law");
  cv->add_option("--n", cv_n, "Sizes (comma separated)")->delimiter(',')->check(CLI::Range(std::size_t{2}, std::size_t{1} << 30))->capture_default_str();
  cv->add_option("--runs", cv_runs, "Runs per size")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 40))->capture_default_str();
  cv->add_option("--grid", cv_cdf.grid, "Grid cells of the limit CDF")->check(CLI::Range(std::size_t{8}, std::size_t{1} << 20))->capture_default_str();
  cv->add_option("--tol", cv_cdf.tol, "CDF solver tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  cv->add_option("--max-iter", cv_cdf.max_iter, "CDF solver iteration cap")->check(CLI::PositiveNumber)->capture_default_str();
  add_common(cv, c, seed_flag);
  cv->callback([&] {
    action = [&] {
      const std::uint64_t seed = resolve_seed(app, seed_flag);
      const sl::CdfGrid g = sl::cdf_solve(cv_cdf);
      if (!g.converged) throw sl::ConsistencyError("converge: limit CDF did not converge");
      const auto report = sl::convergence_study(cv_n, cv_runs, seed, g, c.threads);
      Output out(c.out, false);
      if (c.format == "json") {
        const sl::RateConstants rc = sl::ks_rate_bound(0.25, sl::kDensityBound);
        json arr = json::array();
        for (const auto& r : report.rows)
          arr.push_back({{"n", r.n}, {"runs", r.runs}, {"ks", r.ks_to_limit}, {"mean", r.mean_normalized},
                         {"mean_std_error", r.mean_std_error}, {"nvar", r.var_normalized_times_n},
                         {"ks_ceiling", rc.omega_eps * std::pow(static_cast<double>(r.n), -0.25)}});
        emit_json(out, {{"seed", seed}, {"rows", arr}});
      } else {
        sl::io::write_converge_csv(out.stream(), report);
      }
    };
  });

  // constants
  double co_p = 1.0, co_eps = 0.25, co_bound = sl::kDensityBound;
  auto* co = app.add_subcommand("constants", "Rate constants, sampler constants, tail bounds");
  co->add_option("--p", co_p, "Order p of the Wasserstein-type rate")->check(CLI::Range(1.0, 1e6))->capture_default_str();
  co->add_option("--eps", co_eps, "KS rate exponent slack in (0, 1/4]")->capture_default_str();
  co->add_option("--density-bound", co_bound, "Sup-norm bound on the density")->check(CLI::PositiveNumber)->capture_default_str();
  add_common(co, c, seed_flag);
  co->callback([&] {
    action = [&] {
      const sl::RateConstants rp = sl::rate_constants(co_p);
      const sl::RateConstants re = sl::ks_rate_bound(co_eps, co_bound);
      Output out(c.out, false);
      if (c.format == "json") {
        emit_json(out, {{"p", rp.p}, {"tau_p", rp.tau_p}, {"kappa_p", rp.kappa_p},
                        {"eps", re.eps}, {"eps_p", re.p}, {"omega_eps", re.omega_eps},
                        {"density_bound", re.density_bound_used},
                        {"alpha", sl::SamplerConstants::alpha()},
                        {"coalescence_prob", sl::SamplerConstants::coalescence_prob()},
                        {"mean_coalescence_time", 1.0 / sl::SamplerConstants::coalescence_prob()}});
      } else {
        auto& os = out.stream();
        os << "name,value\n";
        os << "p," << sl::io::decimal(rp.p) << "\ntau_p," << sl::io::decimal(rp.tau_p)
           << "\nkappa_p," << sl::io::decimal(rp.kappa_p) << "\neps," << sl::io::decimal(re.eps)
           << "\neps_p," << sl::io::decimal(re.p) << "\nomega_eps," << sl::io::decimal(re.omega_eps)
           << "\ndensity_bound," << sl::io::decimal(re.density_bound_used)
           << "\nalpha," << sl::io::decimal(sl::SamplerConstants::alpha())
           << "\ncoalescence_prob," << sl::io::decimal(sl::SamplerConstants::coalescence_prob())
           << "\nmean_coalescence_time," << sl::io::decimal(1.0 / sl::SamplerConstants::coalescence_prob())
           << '\n';
      }
    };
  });

  // tail
  double ta_eps = 0.05;
  int ta_k = 2;
  std::size_t ta_count = 0;
  auto* ta = app.add_subcommand("tail", "Upper-tail bound P(X >= 1 - eps), optionally with an empirical estimate");
  ta->add_option("--eps", ta_eps, "Tail width")->check(CLI::PositiveNumber)->capture_default_str();
  ta->add_option("--k", ta_k, "Bound order")->check(CLI::Range(1, 64))->capture_default_str();
  ta->add_option("--count", ta_count, "Perfect samples for the empirical tail (0 to skip)")->capture_default_str();
  add_common(ta, c, seed_flag);
  ta->callback([&] {
    action = [&] {
      const std::uint64_t seed = resolve_seed(app, seed_flag);
      const double bound = sl::tail_bound(ta_eps, ta_k);
      json j{{"eps", ta_eps}, {"k", ta_k}, {"bound", bound}};
      if (ta_count > 0) {
        const auto xs = sl::sample_limit_values(ta_count, seed, c.threads);
        std::size_t hits = 0;
        for (double x : xs) hits += x >= 1.0 - ta_eps;
        j["seed"] = seed;
        j["count"] = ta_count;
        j["empirical"] = static_cast<double>(hits) / static_cast<double>(ta_count);
      }
      Output out(c.out, false);
      if (c.format == "json") {
        emit_json(out, j);
      } else {
        auto& os = out.stream();
        os << "eps,k,bound,count,empirical\n"
           << sl::io::decimal(ta_eps) << ',' << ta_k << ',' << sl::io::decimal(bound) << ','
           << ta_count << ',';
        if (ta_count > 0) os << sl::io::decimal(j["empirical"].get<double>());
        os << '\n';
      }
    };
  });

  // derivative
  std::string de_method = "series";
  std::size_t de_k = 200, de_samples = 1000000;
  auto* de = app.add_subcommand("derivative", "Right derivative of the density at zero");
  de->add_option("--method", de_method, "series or montecarlo")->check(CLI::IsMember({"series", "montecarlo"}))->capture_default_str();
  de->add_option("--kmax", de_k, "Series terms")->check(CLI::Range(std::size_t{2}, std::size_t{5000}))->capture_default_str();
  de->add_option("--samples", de_samples, "Perfect samples")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 40))->capture_default_str();
  add_common(de, c, seed_flag);
  de->callback([&] {
    action = [&] {
      const sl::DerivativeEstimate d =
          de_method == "series"
              ? sl::right_derivative_series(de_k)
              : sl::right_derivative_montecarlo(de_samples, resolve_seed(app, seed_flag), c.threads);
      Output out(c.out, false);
      if (c.format == "json") {
        emit_json(out, {{"method", de_method}, {"value", d.value}, {"error_bar", d.error_bar},
                        {"terms_or_samples", d.terms_or_samples}, {"flagged", d.flagged}});
      } else {
        out.stream() << "method,value,error_bar,terms_or_samples,flagged\n"
                     << de_method << ',' << sl::io::decimal(d.value) << ','
                     << sl::io::decimal(d.error_bar) << ',' << d.terms_or_samples << ','
                     << (d.flagged ? "true" : "false") << '\n';
      }
    };
  });

  // enumerate
  std::size_t en_n = 5;
  auto* en = app.add_subcommand("enumerate", "Exhaustive tabulation over all n! permutations");
  en->add_option("--n", en_n, "Array size (2..9)")->check(CLI::Range(std::size_t{2}, sl::kEnumerationMaxN))->capture_default_str();
  add_common(en, c, seed_flag);
  en->callback([&] {
    action = [&] {
      const sl::JointEnumeration e = sl::enumerate_small(en_n);
      Output out(c.out, false);
      if (c.format == "json") {
        json ys = json::object();
        for (const auto& [y, cnt] : e.y_counts) ys[std::to_string(y)] = cnt;
        emit_json(out, {{"n", e.n}, {"permutations", e.permutations()}, {"joint", e.joint},
                        {"y_counts", ys}, {"mean_exchanges", sl::io::fraction(e.mean_exchanges())}});
      } else {
        auto& os = out.stream();
        os << "j,k,count\n";
        for (std::size_t j = 1; j < e.joint.size(); ++j)
          for (std::size_t k = 0; k < e.joint[j].size(); ++k)
            if (e.joint[j][k] > 0) os << j << ',' << k << ',' << e.joint[j][k] << '\n';
      }
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    action();
    std::cout << std::flush;
    return kc_status;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const sl::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const sl::ContractViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const sl::ConsistencyError& e) {
    std::cerr << "numeric consistency failure: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
