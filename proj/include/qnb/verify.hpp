// qnb/verify.hpp - invariant suites behind `qnb verify` and the acceptance run
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qnb/brute_force.hpp"
#include "qnb/closed_forms.hpp"
#include "qnb/dist.hpp"
#include "qnb/oracle.hpp"
#include "qnb/parallel.hpp"
#include "qnb/qmath.hpp"
#include "qnb/runcount.hpp"
#include "qnb/table_io.hpp"

namespace qnb {

struct VerifyGrid {
  int k_max = 3;
  int r_max = 3;
  std::vector<double> thetas = {0.3, 0.5, 0.8};
  std::vector<double> qs = {0.5, 0.9, 1.0};
  int n_max = 14;  // enumeration depth

  int kernel_k_max = 4;
  int kernel_r_max = 4;
  int kernel_s_max = 12;
  int kernel_t_max = 4;
  std::vector<double> kernel_qs = {0.25, 0.75, 1.0};
};

struct VerifyOptions {
  VerifyGrid grid;
  double kernel_rel_tol = 1e-10;
  double oracle_tol = 1e-10;
  double route_tol = 1e-9;
  double limit_tol = 1e-4;
  double coincidence_tol = 1e-10;
  double duality_tol = 1e-9;
  double qmath_tol = 1e-10;
  // Test hook: added to every direct-route value before it meets the oracle.
  double perturbation = 0.0;
};

/// Outcome of one suite: worst deviation seen and the failing points.
struct CheckResult {
  CheckResult() = default;
  CheckResult(std::string name_, double tolerance_) : name(std::move(name_)), tolerance(tolerance_) {}

  std::string name;
  double tolerance = 0.0;
  std::size_t points = 0;
  double max_deviation = 0.0;
  std::size_t failure_count = 0;
  std::vector<std::string> failures;  // first few, for the report

  bool passed() const noexcept { return failure_count == 0; }

  void record(double deviation, const std::string& where) {
    ++points;
    if (std::isnan(deviation)) deviation = INFINITY;
    max_deviation = std::max(max_deviation, deviation);
    if (deviation > tolerance) {
      ++failure_count;
      if (failures.size() < 20) failures.push_back(where + " deviation=" + io::json_number(deviation));
    }
  }

  void merge(const CheckResult& other) {
    points += other.points;
    max_deviation = std::max(max_deviation, other.max_deviation);
    failure_count += other.failure_count;
    for (const auto& f : other.failures)
      if (failures.size() < 20) failures.push_back(f);
  }
};

struct VerifyReport {
  std::vector<CheckResult> checks;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed(); });
  }

  std::string to_json() const {
    std::string out = std::string("{\"passed\":") + (passed() ? "true" : "false") + ",\"checks\":[";
    for (std::size_t i = 0; i < checks.size(); ++i) {
      const auto& c = checks[i];
      if (i) out += ",";
      out += "{\"name\":\"" + c.name + "\",\"passed\":" + (c.passed() ? "true" : "false") +
             ",\"points\":" + std::to_string(c.points) + ",\"max_deviation\":" + io::json_number(c.max_deviation) +
             ",\"tolerance\":" + io::json_number(c.tolerance) +
             ",\"failure_count\":" + std::to_string(c.failure_count) + ",\"failures\":[";
      for (std::size_t j = 0; j < c.failures.size(); ++j) {
        if (j) out += ",";
        out += "\"" + c.failures[j] + "\"";
      }
      out += "]}";
    }
    return out + "]}\n";
  }
};

namespace detail {

inline std::vector<Scheme> all_schemes(int k) {
  std::vector<Scheme> out = {Scheme::non_overlapping(), Scheme::at_least(), Scheme::overlapping(), Scheme::exact()};
  for (int ell = 0; ell < k; ++ell) out.push_back(Scheme::ell_overlapping(ell));
  return out;
}

struct GridPoint {
  RunSpec spec;
  ModelParams params;
};

inline std::vector<GridPoint> grid_points(const VerifyGrid& g) {
  std::vector<GridPoint> out;
  for (int k = 1; k <= g.k_max; ++k)
    for (int r = 1; r <= g.r_max; ++r)
      for (double theta : g.thetas)
        for (double q : g.qs)
          for (auto s : all_schemes(k)) out.push_back({{k, r, s}, {theta, q}});
  return out;
}

inline std::string where(const RunSpec& spec, const ModelParams& p, int n) {
  std::string s = "(" + spec.scheme.name();
  if (spec.scheme.kind == SchemeKind::ell_overlapping) s += " ell=" + std::to_string(spec.scheme.ell);
  return s + ", k=" + std::to_string(spec.k) + ", r=" + std::to_string(spec.r) + ", theta=" + io::csv_number(p.theta) +
         ", q=" + io::csv_number(p.q) + ", n=" + std::to_string(n) + ")";
}

// Runs one CheckResult per grid point in parallel and merges them in order.
template <class Fn>
CheckResult over_points(const std::string& name, double tol, const std::vector<GridPoint>& points, Fn&& fn) {
  std::vector<CheckResult> parts(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    parts[i].tolerance = tol;
    fn(points[i], parts[i]);
  });
  CheckResult total(name, tol);
  for (const auto& p : parts) total.merge(p);
  return total;
}

}  // namespace detail

/// Recurrence kernels against direct composition sums (relative tolerance).
inline CheckResult check_kernels_vs_brute_force(const VerifyOptions& opt) {
  const auto& g = opt.grid;
  CheckResult res{"kernel_vs_brute_force", opt.kernel_rel_tol};
  for (double q : g.kernel_qs) {
    KernelCache cache(q);
    for (int k = 1; k <= g.kernel_k_max; ++k)
      for (Family f : {Family::A, Family::B, Family::C, Family::D, Family::E})
        for (int ell = 0; ell < (f == Family::E ? k : 1); ++ell)
          for (int r = 1; r <= g.kernel_r_max; ++r)
            for (int s = 0; s <= g.kernel_s_max; ++s)
              for (int t = 0; t <= g.kernel_t_max; ++t) {
                const double want = brute_force_kernel(f, k, ell, r, s, t, q);
                const double got = kernel({f, k, ell, r, s, t}, cache);
                res.record(std::abs(got - want) / std::max(1.0, std::abs(want)),
                           "(" + family_name(f) + ", k=" + std::to_string(k) + ", ell=" + std::to_string(ell) +
                               ", r=" + std::to_string(r) + ", s=" + std::to_string(s) + ", t=" + std::to_string(t) +
                               ", q=" + io::csv_number(q) + ")");
              }
  }
  return res;
}

/// q = 1 recurrence values against the exact closed forms; deviation is
/// |rounded value - closed form| (must be 0) or the pre-rounding error if
/// that exceeds 1e-6.
inline CheckResult check_kernels_vs_closed_form(const VerifyOptions& opt) {
  const auto& g = opt.grid;
  CheckResult res{"kernel_vs_closed_form", 0.0};
  KernelCache cache(1.0);
  for (int k = 1; k <= g.kernel_k_max; ++k)
    for (Family f : {Family::A, Family::B, Family::C, Family::D, Family::E})
      for (int ell = 0; ell < (f == Family::E ? k : 1); ++ell)
        for (int r = 1; r <= g.kernel_r_max; ++r)
          for (int s = 0; s <= g.kernel_s_max; ++s)
            for (int t = 0; t <= g.kernel_t_max; ++t) {
              const double v = kernel({f, k, ell, r, s, t}, cache);
              const BigInt exact = closed_form_q1(f, k, ell, r, s, t);
              const double rounding = std::abs(v - std::round(v));
              const double diff = std::abs(std::round(v) - exact.convert_to<double>());
              res.record(rounding > 1e-6 ? rounding : diff,
                         "(" + family_name(f) + ", k=" + std::to_string(k) + ", ell=" + std::to_string(ell) +
                             ", r=" + std::to_string(r) + ", s=" + std::to_string(s) + ", t=" + std::to_string(t) + ")");
            }
  return res;
}

/// Direct and dual routes agree (schemes with a dual) for n up to 2 n_max.
inline CheckResult check_direct_vs_dual(const VerifyOptions& opt) {
  auto points = detail::grid_points(opt.grid);
  std::erase_if(points, [](const detail::GridPoint& p) { return !DistContext::has_dual(p.spec.scheme); });
  return detail::over_points("direct_vs_dual", opt.route_tol, points, [&](const detail::GridPoint& p, CheckResult& res) {
    DistContext ctx(p.params);
    for (int n = 1; n <= 2 * opt.grid.n_max; ++n)
      res.record(std::abs(ctx.pmf_direct(p.spec, n) + opt.perturbation - ctx.pmf_dual(p.spec, n)),
                 detail::where(p.spec, p.params, n));
  });
}

/// Every route against exhaustive enumeration for n <= n_max.
inline CheckResult check_formula_vs_oracle(const VerifyOptions& opt) {
  const auto points = detail::grid_points(opt.grid);
  return detail::over_points("formula_vs_oracle", opt.oracle_tol, points, [&](const detail::GridPoint& p, CheckResult& res) {
    const auto oracle = enumerate_waiting_pmf(p.spec, p.params, opt.grid.n_max);
    DistContext ctx(p.params);
    for (int n = 1; n <= opt.grid.n_max; ++n) {
      const std::string at = detail::where(p.spec, p.params, n);
      res.record(std::abs(ctx.pmf_direct(p.spec, n) + opt.perturbation - oracle.pmf(n)), at + " direct");
      if (DistContext::has_dual(p.spec.scheme)) res.record(std::abs(ctx.pmf_dual(p.spec, n) - oracle.pmf(n)), at + " dual");
    }
  });
}

/// pmf_direct just below q = 1 against the exact q = 1 corollaries, n <= 20.
inline CheckResult check_q_limit(const VerifyOptions& opt) {
  VerifyGrid g = opt.grid;
  g.qs = {1.0 - 1e-7};
  return detail::over_points("q_to_one", opt.limit_tol, detail::grid_points(g), [&](const detail::GridPoint& p, CheckResult& res) {
    DistContext ctx(p.params);
    for (int n = 1; n <= 20; ++n)
      res.record(std::abs(ctx.pmf_direct(p.spec, n) - pmf_classical(p.spec, n, p.params.theta)),
                 detail::where(p.spec, p.params, n));
  });
}

/// ell = 0 is non-overlapping and ell = k - 1 is overlapping, pointwise.
inline CheckResult check_scheme_coincidence(const VerifyOptions& opt) {
  VerifyGrid g = opt.grid;
  std::vector<detail::GridPoint> points;
  for (const auto& p : detail::grid_points(g))
    if (p.spec.scheme.kind == SchemeKind::non_overlapping) points.push_back(p);
  return detail::over_points("scheme_coincidence", opt.coincidence_tol, points,
                             [&](const detail::GridPoint& p, CheckResult& res) {
                               DistContext ctx(p.params);
                               const int k = p.spec.k;
                               const int r = p.spec.r;
                               for (int n = 1; n <= 2 * opt.grid.n_max; ++n) {
                                 res.record(std::abs(ctx.pmf_direct({k, r, Scheme::ell_overlapping(0)}, n) -
                                                     ctx.pmf_direct({k, r, Scheme::non_overlapping()}, n)),
                                            detail::where({k, r, Scheme::ell_overlapping(0)}, p.params, n));
                                 res.record(std::abs(ctx.pmf_direct({k, r, Scheme::ell_overlapping(k - 1)}, n) -
                                                     ctx.pmf_direct({k, r, Scheme::overlapping()}, n)),
                                            detail::where({k, r, Scheme::ell_overlapping(k - 1)}, p.params, n));
                               }
                             });
}

/// P(count in n trials >= r) = P(W <= n); every scheme but exact counting.
inline CheckResult check_duality(const VerifyOptions& opt) {
  auto points = detail::grid_points(opt.grid);
  std::erase_if(points, [](const detail::GridPoint& p) { return !DistContext::has_dual(p.spec.scheme); });
  return detail::over_points("duality", opt.duality_tol, points, [&](const detail::GridPoint& p, CheckResult& res) {
    DistContext ctx(p.params);
    double cdf = 0.0;
    for (int n = 1; n <= 2 * opt.grid.n_max; ++n) {
      cdf += ctx.pmf_direct(p.spec, n);
      double upper = 0.0;
      for (int x = p.spec.r; x <= max_count(p.spec.scheme, n, p.spec.k); ++x)
        upper += ctx.count_pmf(p.spec.scheme, x, n, p.spec.k);
      res.record(std::abs(upper - cdf), detail::where(p.spec, p.params, n));
    }
  });
}

/// Gaussian coefficient symmetry, positivity (deviation 1 when violated),
/// agreement with the subset sum, and the q-Newton residual.
inline CheckResult check_qmath(const VerifyOptions& opt) {
  CheckResult res{"q_calculus", opt.qmath_tol};
  for (double q : {0.1, 0.5, 0.9, 1.0})
    for (int n = 0; n <= 20; ++n)
      for (int m = 0; m <= n; ++m) {
        const double v = q_binomial_coeff(n, m, q);
        const std::string at = "(n=" + std::to_string(n) + ", m=" + std::to_string(m) + ", q=" + io::csv_number(q) + ")";
        res.record(std::abs(v - q_binomial_coeff(n, n - m, q)) / v, at + " symmetry");
        res.record(v > 0.0 ? 0.0 : 1.0, at + " positivity");
      }
  for (double q : {0.1, 0.5, 0.9})
    for (int n = 0; n <= 12; ++n)
      for (int m = 0; m <= n; ++m) {
        double subset = 0.0;
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
          if (__builtin_popcount(mask) != m) continue;
          int e = -m * (m + 1) / 2;
          for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) e += i + 1;
          subset += std::pow(q, e);
        }
        res.record(std::abs(q_binomial_coeff(n, m, q) - subset) / subset,
                   "(n=" + std::to_string(n) + ", m=" + std::to_string(m) + ", q=" + io::csv_number(q) + ") subsets");
      }
  for (double z : {-0.5, 0.3, 1.0})
    for (double q : {0.2, 0.8})
      for (int n = 1; n <= 10; ++n)
        res.record(q_newton_identity_residual(z, q, n), "(z=" + io::csv_number(z) + ", q=" + io::csv_number(q) +
                                                            ", n=" + std::to_string(n) + ") newton");
  return res;
}

/// The counts and waiting times of the two illustration sequences.
struct WorkedExample {
  std::string label;
  std::string sequence;
  int k;
  Scheme scheme;
  std::optional<int> r;  // waiting time when set, count otherwise
  std::optional<int> expected;
};

inline const std::vector<WorkedExample>& worked_examples() {
  static const std::vector<WorkedExample> examples = {
      {"N_{12,2}", "011111000111", 2, Scheme::non_overlapping(), std::nullopt, 3},
      {"G_{12,2}", "011111000111", 2, Scheme::at_least(), std::nullopt, 2},
      {"M_{12,2}", "011111000111", 2, Scheme::overlapping(), std::nullopt, 6},
      {"E_{12,5}", "011111000111", 5, Scheme::exact(), std::nullopt, 1},
      {"W^I_{2,2}", "011111000111", 2, Scheme::non_overlapping(), 2, 5},
      {"W^II_{2,2}", "011111000111", 2, Scheme::at_least(), 2, 11},
      {"W^III_{2,2}", "011111000111", 2, Scheme::overlapping(), 2, 4},
      {"W^IV_{2,3}", "011111000111", 3, Scheme::exact(), 2, std::nullopt},
      {"N_{15,4,2}", "111111011110111", 4, Scheme::ell_overlapping(2), std::nullopt, 3},
      {"N_{15,4,3}", "111111011110111", 4, Scheme::ell_overlapping(3), std::nullopt, 4},
  };
  return examples;
}

inline std::optional<int> evaluate(const WorkedExample& ex) {
  const BinarySeq seq = BinarySeq::parse(ex.sequence);
  if (ex.r) return waiting_time(seq, ex.k, *ex.r, ex.scheme);
  return count_runs(seq, ex.k, ex.scheme);
}

/// Exact reproduction; deviation 1 per mismatch.
inline CheckResult check_worked_examples() {
  CheckResult res{"worked_examples", 0.0};
  for (const auto& ex : worked_examples()) {
    const auto got = evaluate(ex);
    const auto show = [](std::optional<int> v) { return v ? std::to_string(*v) : std::string("not-reached"); };
    res.record(got == ex.expected ? 0.0 : 1.0, ex.label + " on " + ex.sequence + " got " + show(got) +
                                                   " expected " + show(ex.expected));
  }
  return res;
}

/// The suites behind `verify`: kernels, routes, oracle, q -> 1 limit.
inline VerifyReport run_verification(const VerifyOptions& opt) {
  VerifyReport rep;
  rep.checks.push_back(check_kernels_vs_brute_force(opt));
  rep.checks.push_back(check_kernels_vs_closed_form(opt));
  rep.checks.push_back(check_direct_vs_dual(opt));
  rep.checks.push_back(check_formula_vs_oracle(opt));
  rep.checks.push_back(check_q_limit(opt));
  rep.checks.push_back(check_scheme_coincidence(opt));
  rep.checks.push_back(check_duality(opt));
  rep.checks.push_back(check_qmath(opt));
  return rep;
}

}  // namespace qnb
