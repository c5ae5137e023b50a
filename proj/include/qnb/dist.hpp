// qnb/dist.hpp - waiting-time and run-count distributions on q-geometric trials
//
// Trial j succeeds with probability theta q^f, f = failures so far. A path
// with i failures splits its successes into i + 1 cells (before the first
// failure, between failures, after the last), and cell c is weighted by
// (theta q^{c-1})^{y_c}; that weight is exactly the kernel weight, so every
// probability below is sum_i theta^{successes} prod_{j<=i}(1 - theta q^{j-1})
// times a kernel.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "qnb/closed_forms.hpp"
#include "qnb/error.hpp"
#include "qnb/kernels.hpp"
#include "qnb/qmath.hpp"
#include "qnb/runcount.hpp"

namespace qnb {

struct ModelParams {
  double theta = 0.5;
  double q = 1.0;

  void validate() const {
    if (!(theta > 0.0 && theta < 1.0)) throw parameter_error("theta must lie in (0, 1)");
    if (!(q > 0.0 && q <= 1.0)) throw parameter_error("q must lie in (0, 1]");
  }
  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct RunSpec {
  int k = 1;
  int r = 1;
  Scheme scheme;

  void validate() const {
    scheme.validate(k);
    if (r < 1) throw parameter_error("r must be >= 1");
  }
  friend bool operator==(const RunSpec&, const RunSpec&) = default;
};

/// Dense waiting-time PMF starting at support_min. tail_bound is the mass
/// not in `probs`, 1 - sum(probs), never an estimate.
struct PmfTable {
  RunSpec spec;
  ModelParams params;
  int support_min = 1;
  std::vector<double> probs;
  double tail_bound = 1.0;
  bool truncated = false;
  std::optional<std::vector<double>> std_errors;  // Monte Carlo tables only

  int max_n() const noexcept { return support_min + static_cast<int>(probs.size()) - 1; }
  double pmf(int n) const {
    if (n < support_min || n > max_n()) return 0.0;
    return probs[static_cast<std::size_t>(n - support_min)];
  }
  double mass() const {
    double m = 0.0;
    for (double p : probs) m += p;
    return m;
  }
  std::vector<double> cdf() const {
    std::vector<double> c(probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) c[i] = acc += probs[i];
    return c;
  }
};

/// Smallest possible waiting time: kr, r(k+1)-1, k+r-1, r(k+1)-1, ell+r(k-ell).
inline int support_min(const RunSpec& spec) {
  spec.validate();
  const int k = spec.k;
  const int r = spec.r;
  switch (spec.scheme.kind) {
    case SchemeKind::non_overlapping: return k * r;
    case SchemeKind::at_least:
    case SchemeKind::exact: return r * (k + 1) - 1;
    case SchemeKind::overlapping: return k + r - 1;
    case SchemeKind::ell_overlapping: return spec.scheme.ell + r * (k - spec.scheme.ell);
  }
  return 1;
}

/// Kernel family that weighs run counts under `scheme`.
inline Family count_family(Scheme scheme) {
  switch (scheme.kind) {
    case SchemeKind::non_overlapping: return Family::A;
    case SchemeKind::at_least: return Family::B;
    case SchemeKind::overlapping: return Family::C;
    case SchemeKind::exact: return Family::D;
    case SchemeKind::ell_overlapping: return Family::E;
  }
  return Family::A;
}

/// Evaluation context for one parameter point: owns the kernel cache and
/// the failure-product prefix. Not thread-safe; use one per thread.
///
/// At q = 1 the cache stores theta^s (1-theta)^{r-1} K, which stays finite for
/// any n; below 1 it stores theta^s K, bounded by prod_j 1/(1 - q^j).
class DistContext {
 public:
  explicit DistContext(ModelParams params)
      : params_((params.validate(), params)),
        beta_(params.q == 1.0 ? 1.0 - params.theta : 1.0),
        cache_(params.q, {params.theta, beta_}) {}

  const ModelParams& params() const noexcept { return params_; }
  KernelCache& cache() noexcept { return cache_; }

  /// P(W = n) from the direct first-passage decomposition.
  double pmf_direct(const RunSpec& spec, int n) {
    spec.validate();
    const int sm = support_min(spec);
    if (n < sm) return 0.0;
    const int k = spec.k;
    const int r = spec.r;
    const double theta = params_.theta;
    const double q = params_.q;
    double sum = 0.0;

    // Paths end with a final run of length e preceded by the i-th failure.
    auto term = [&](Family family, int ell, int e, int i, int t) {
      const double v = kernel({family, k, ell, i, n - e - i, t}, cache_);
      if (v == 0.0) return 0.0;
      return std::pow(theta, e) * std::pow(q, static_cast<double>(i) * e) * failure_factor(i, i) * v;
    };

    switch (spec.scheme.kind) {
      case SchemeKind::non_overlapping:
        if (n == sm) return std::pow(theta, sm);
        // the final run closes m >= 1 occurrences at once
        for (int m = 1; m <= r; ++m)
          for (int i = 1; i <= n - r * k; ++i) sum += term(Family::A, 0, m * k, i, r - m);
        return sum;

      case SchemeKind::at_least:
      case SchemeKind::exact: {
        if (r == 1 && n == k) return std::pow(theta, k);
        const Family f = spec.scheme.kind == SchemeKind::at_least ? Family::B : Family::Dcap;
        for (int i = std::max(1, r - 1); i <= n - r * k; ++i) sum += term(f, 0, k, i, r - 1);
        return sum;
      }

      case SchemeKind::overlapping: {
        if (n == sm) return std::pow(theta, sm);
        const int lo = std::max(1, (n - k - r) / k + 1);
        for (int e = k; e <= k + r - 1; ++e)
          for (int i = lo; i <= n - k - r + 1; ++i) sum += term(Family::C, 0, e, i, r - (e - k + 1));
        return sum;
      }

      case SchemeKind::ell_overlapping: {
        if (n == sm) return std::pow(theta, sm);
        const int ell = spec.scheme.ell;
        const int lo = std::max(1, (n - ell - 1 - r * (k - ell)) / k + 1);
        // the final run jumps from r - m to r at length ell + m (k - ell)
        for (int m = 1; m <= r; ++m) {
          const int e = ell + m * (k - ell);
          for (int i = lo; i <= n - r * (k - ell) - ell; ++i) sum += term(Family::E, ell, e, i, r - m);
        }
        return sum;
      }
    }
    return 0.0;
  }

  /// P(count of runs in n trials = x).
  double count_pmf(Scheme scheme, int x, int n, int k) {
    scheme.validate(k);
    if (n < 0) throw parameter_error("n must be >= 0");
    if (x < 0) return 0.0;
    int upper = n - x * k;
    switch (scheme.kind) {
      case SchemeKind::overlapping:
        if (x > 0) upper = n - k - x + 1;
        break;
      case SchemeKind::ell_overlapping:
        if (x > 0) upper = n - (x * (k - scheme.ell) + scheme.ell);
        break;
      default:
        break;
    }
    const Family family = count_family(scheme);
    const int ell = family == Family::E ? scheme.ell : 0;
    double sum = 0.0;
    for (int i = 0; i <= upper; ++i) {
      const double v = kernel({family, k, ell, i + 1, n - i, x}, cache_);
      if (v != 0.0) sum += failure_factor(i, i + 1) * v;
    }
    return sum;
  }

  /// P(W <= n) = P(count in n trials >= r), for schemes with the duality.
  double cdf_dual(const RunSpec& spec, int n) {
    require_dual(spec);
    if (n < support_min(spec)) return 0.0;
    double below = 0.0;
    for (int x = 0; x < spec.r; ++x) below += count_pmf(spec.scheme, x, n, spec.k);
    return 1.0 - below;
  }

  /// P(W = n) = sum_{x<r} f(x; n-1) - f(x; n).
  double pmf_dual(const RunSpec& spec, int n) {
    require_dual(spec);
    if (n < support_min(spec)) return 0.0;
    double sum = 0.0;
    for (int x = 0; x < spec.r; ++x)
      sum += count_pmf(spec.scheme, x, n - 1, spec.k) - count_pmf(spec.scheme, x, n, spec.k);
    return sum;
  }

  static bool has_dual(Scheme scheme) { return scheme.kind != SchemeKind::exact; }

 private:
  static void require_dual(const RunSpec& spec) {
    spec.validate();
    if (!has_dual(spec.scheme)) throw unsupported_scheme("no dual route for Type IV");
  }

  // prod_{j=1}^{i} (1 - theta q^{j-1}) divided by the beta^{cells-1} folded
  // into the cached kernel.
  double failure_factor(int i, int cells) {
    if (params_.q == 1.0) return i - (cells - 1) == 1 ? beta_ : 1.0;
    extend_products(i);
    return products_[static_cast<std::size_t>(i)];
  }

  void extend_products(int i) {
    if (static_cast<int>(products_.size()) > i) return;
    if (products_.empty()) products_.push_back(1.0);
    const double theta = params_.theta;
    const double q = params_.q;
    for (int j = static_cast<int>(products_.size()); j <= i; ++j) {
      // factor for the j-th failure
      const double f = 1.0 - theta * std::pow(q, j - 1);
      if (f < 1e-12) log_space_ = true;
      if (log_space_) {
        log_sum_ += std::log(f);
        products_.push_back(std::exp(log_sum_));
      } else {
        products_.push_back(products_.back() * f);
        log_sum_ += std::log(f);
      }
    }
  }

  ModelParams params_;
  double beta_;
  KernelCache cache_;
  std::vector<double> products_;
  double log_sum_ = 0.0;
  bool log_space_ = false;
};

inline double pmf_direct(const RunSpec& spec, int n, const ModelParams& params) {
  DistContext ctx(params);
  return ctx.pmf_direct(spec, n);
}

inline double pmf_dual(const RunSpec& spec, int n, const ModelParams& params) {
  DistContext ctx(params);
  return ctx.pmf_dual(spec, n);
}

inline double count_dist_pmf(Scheme scheme, int x, int n, int k, const ModelParams& params) {
  DistContext ctx(params);
  return ctx.count_pmf(scheme, x, n, k);
}

/// P(x successes in n trials) = [n x]_q theta^x prod_{i=1}^{n-x} (1 - theta q^{i-1}).
inline double q_binomial_pmf(int x, int n, const ModelParams& params) {
  params.validate();
  if (n < 0) throw parameter_error("n must be >= 0");
  if (x < 0 || x > n) return 0.0;
  return q_binomial_coeff(n, x, params.q) * std::pow(params.theta, x) *
         q_shifted_factorial(params.theta, params.q, n - x);
}

/// q = 1 waiting-time PMF from the exact allocation counts: the same
/// decomposition as pmf_direct with every kernel replaced by its closed form.
inline double pmf_classical(const RunSpec& spec, int n, double theta) {
  spec.validate();
  ModelParams{theta, 1.0}.validate();
  const int sm = support_min(spec);
  if (n < sm) return 0.0;
  const int k = spec.k;
  const int r = spec.r;
  auto term = [&](Family family, int ell, int e, int i, int t) {
    const BigInt c = closed_form_q1(family, k, ell, i, n - e - i, t);
    if (c == 0) return 0.0;
    return c.convert_to<double>() * std::pow(theta, n - i) * std::pow(1.0 - theta, i);
  };
  double sum = 0.0;
  switch (spec.scheme.kind) {
    case SchemeKind::non_overlapping:
      if (n == sm) return std::pow(theta, sm);
      for (int m = 1; m <= r; ++m)
        for (int i = 1; i <= n - r * k; ++i) sum += term(Family::A, 0, m * k, i, r - m);
      return sum;
    case SchemeKind::at_least:
    case SchemeKind::exact: {
      if (r == 1 && n == k) return std::pow(theta, k);
      const Family f = spec.scheme.kind == SchemeKind::at_least ? Family::B : Family::Dcap;
      for (int i = std::max(1, r - 1); i <= n - r * k; ++i) sum += term(f, 0, k, i, r - 1);
      return sum;
    }
    case SchemeKind::overlapping: {
      if (n == sm) return std::pow(theta, sm);
      const int lo = std::max(1, (n - k - r) / k + 1);
      for (int e = k; e <= k + r - 1; ++e)
        for (int i = lo; i <= n - k - r + 1; ++i) sum += term(Family::C, 0, e, i, r - (e - k + 1));
      return sum;
    }
    case SchemeKind::ell_overlapping: {
      if (n == sm) return std::pow(theta, sm);
      const int ell = spec.scheme.ell;
      const int lo = std::max(1, (n - ell - 1 - r * (k - ell)) / k + 1);
      for (int m = 1; m <= r; ++m)
        for (int i = lo; i <= n - r * (k - ell) - ell; ++i)
          sum += term(Family::E, ell, ell + m * (k - ell), i, r - m);
      return sum;
    }
  }
  return 0.0;
}

enum class Route { automatic, direct, dual };

/// Tabulates P(W = n) from support_min until the accumulated mass reaches
/// 1 - tail_eps or n reaches n_cap. The automatic route is dual where the
/// scheme has one and direct otherwise; the dual route differences the CDF.
inline PmfTable build_pmf_table(const RunSpec& spec, const ModelParams& params, double tail_eps, int n_cap,
                                Route route = Route::automatic) {
  spec.validate();
  params.validate();
  if (!(tail_eps > 0.0 && tail_eps < 0.1)) throw parameter_error("tail_eps must lie in (0, 0.1)");
  const int sm = support_min(spec);
  if (n_cap < sm) throw parameter_error("n_cap must be >= support_min");
  if (route == Route::automatic) route = DistContext::has_dual(spec.scheme) ? Route::dual : Route::direct;
  if (route == Route::dual && !DistContext::has_dual(spec.scheme)) throw unsupported_scheme("no dual route for Type IV");

  DistContext ctx(params);
  PmfTable table;
  table.spec = spec;
  table.params = params;
  table.support_min = sm;
  double mass = 0.0;
  double prev_cdf = route == Route::dual ? ctx.cdf_dual(spec, sm - 1) : 0.0;
  for (int n = sm; n <= n_cap; ++n) {
    double p;
    if (route == Route::dual) {
      const double cdf = ctx.cdf_dual(spec, n);
      p = cdf - prev_cdf;
      prev_cdf = cdf;
    } else {
      p = ctx.pmf_direct(spec, n);
    }
    // differencing the CDF can leave round-off below zero
    if (p < 0.0 && p > -1e-14) p = 0.0;
    table.probs.push_back(p);
    mass += p;
    if (mass >= 1.0 - tail_eps) break;
  }
  table.tail_bound = 1.0 - mass;
  table.truncated = mass < 1.0 - tail_eps;
  return table;
}

}  // namespace qnb
