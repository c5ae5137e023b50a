// qnb/kernels.hpp - weighted composition kernels A_q .. E_q and their memo cache
//
// Every kernel sums q^{y_2 + 2 y_3 + ... + (r-1) y_r} over weak compositions
// (y_1, ..., y_r) of s whose per-cell run counts add up to t. Families differ
// only in the per-cell count:
//   A  floor(y / k)                         non-overlapping
//   B  [y >= k]                             at least k
//   C  max(y - k + 1, 0)                    overlapping
//   D  [y == k]                             exactly k
//   E  floor((y - ell) / (k - ell)), y >= k ell-overlapping
// Dcap is D restricted to compositions in which every cell after the last
// exact cell holds fewer than k balls; it is what the first passage of the
// exact-run count needs.
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "qnb/error.hpp"

namespace qnb {

enum class Family { A, B, C, D, E, Dcap };

inline std::string family_name(Family f) {
  switch (f) {
    case Family::A: return "A";
    case Family::B: return "B";
    case Family::C: return "C";
    case Family::D: return "D";
    case Family::E: return "E";
    case Family::Dcap: return "Dcap";
  }
  return "?";
}

inline Family parse_family(std::string_view name) {
  if (name == "A") return Family::A;
  if (name == "B") return Family::B;
  if (name == "C") return Family::C;
  if (name == "D") return Family::D;
  if (name == "E") return Family::E;
  if (name == "Dcap") return Family::Dcap;
  throw parameter_error("unknown kernel family '" + std::string(name) + "'");
}

struct KernelKey {
  Family family = Family::A;
  int k = 1;
  int ell = 0;  // family E only
  int r = 1;
  int s = 0;
  int t = 0;

  void validate() const {
    if (k < 1) throw parameter_error("kernel: k must be >= 1");
    if (family == Family::E) {
      if (ell < 0 || ell >= k) throw parameter_error("kernel E: ell must satisfy 0 <= ell < k");
    } else if (ell != 0) {
      throw parameter_error("kernel: ell is only meaningful for family E");
    }
  }

  friend bool operator==(const KernelKey&, const KernelKey&) = default;
};

/// Count contributed by a single cell holding y balls.
inline int cell_count(Family family, int k, int ell, int y) {
  switch (family) {
    case Family::A: return y / k;
    case Family::B: return y >= k ? 1 : 0;
    case Family::C: return y >= k ? y - k + 1 : 0;
    case Family::D:
    case Family::Dcap: return y == k ? 1 : 0;
    case Family::E: return y >= k ? (y - ell) / (k - ell) : 0;
  }
  return 0;
}

/// Stored value is alpha^s beta^{r-1} K(r, s, t); unit by default.
struct KernelScale {
  double alpha = 1.0;
  double beta = 1.0;
  bool unit() const noexcept { return alpha == 1.0 && beta == 1.0; }
};

/// Memo store for kernel values at one fixed q.
///
/// Values live in one dense table per (family, k, ell), stored as layers
/// indexed by the number of cells r. Layer r covers s = 0..S_r and t = 0..T;
/// S_r is non-increasing in r, so a request (r, s, t) only extends the top
/// layers that are too short, bottom-up, and each new entry reads the
/// already complete layer below it.
///
/// The j-sum of the recurrence is split into the cells j < k, read directly,
/// and a tail that every layer keeps as a running sum (`acc`) over its own
/// values, so one entry costs O(k) instead of O(s). The running sums are
/// fixed functions of (s, t), so values do not depend on the order in which
/// a table was grown.
///
/// An optional scale stores alpha^s beta^{r-1} K(r, s, t) instead of K;
/// the recurrence stays geometric, and with alpha = theta, beta = 1 - theta
/// the stored values are probabilities, which keeps q = 1 tables finite
/// long after the raw composition counts overflow a double.
///
/// A cache must not be shared between threads without external locking.
class KernelCache {
 public:
  explicit KernelCache(double q, KernelScale scale = {}) : q_(q), scale_(scale) {
    if (!(q > 0.0 && q <= 1.0)) throw parameter_error("KernelCache: q must lie in (0, 1]");
    if (!(scale.alpha > 0.0 && scale.beta > 0.0)) throw parameter_error("KernelCache: scale must be positive");
  }

  double q() const noexcept { return q_; }
  const KernelScale& scale() const noexcept { return scale_; }
  std::size_t hits() const noexcept { return hits_; }
  std::size_t misses() const noexcept { return misses_; }

  /// Number of kernel values currently stored.
  std::size_t size() const noexcept {
    std::size_t n = 0;
    for (const auto& [id, table] : tables_)
      for (const auto& layer : table.layers) n += layer.v.size();
    return n;
  }

  void clear() {
    tables_.clear();
    hits_ = misses_ = 0;
  }

  double value(const KernelKey& key) {
    key.validate();
    if (key.r < 1 || key.s < 0 || key.t < 0) return 0.0;
    Table& table = table_for(key.family, key.k, key.ell);
    const bool covered = key.r <= table.depth() && key.t <= table.max_t && key.s < table.len(key.r);
    if (covered) {
      ++hits_;
    } else {
      ++misses_;
      extend(table, key.r, key.s, key.t);
    }
    return table.at(key.r, key.s, key.t);
  }

 private:
  struct Layer {
    std::vector<double> v;    // kernel values, [s * stride + t]
    std::vector<double> acc;  // running tail sums read by the layer above
    std::vector<double> pw;   // pw[j] = (alpha q^r)^j, j = 0..k+1, weights for layer r + 1
  };

  struct Table {
    Family family;
    int k;
    int ell;
    int max_t = -1;
    std::vector<Layer> layers;

    int stride() const { return max_t + 1; }
    int depth() const { return static_cast<int>(layers.size()); }
    int len(int r) const {
      return max_t < 0 ? 0 : static_cast<int>(layers[static_cast<std::size_t>(r - 1)].v.size()) / stride();
    }
    std::size_t idx(int s, int t) const { return static_cast<std::size_t>(s * stride() + t); }
    double at(int r, int s, int t) const { return layers[static_cast<std::size_t>(r - 1)].v[idx(s, t)]; }
    // Zero outside the stored box; callers guarantee the box covers every
    // in-domain dependency.
    double get(int r, int s, int t) const {
      if (r < 1 || s < 0 || t < 0 || t > max_t || r > depth() || s >= len(r)) return 0.0;
      return at(r, s, t);
    }
    double acc(int r, int s, int t) const {
      if (r < 1 || s < 0 || t < 0 || t > max_t || r > depth() || s >= len(r)) return 0.0;
      return layers[static_cast<std::size_t>(r - 1)].acc[idx(s, t)];
    }
  };

  using TableId = std::tuple<int, int, int>;

  Table& table_for(Family family, int k, int ell) {
    TableId id{static_cast<int>(family), k, ell};
    auto it = tables_.find(id);
    if (it == tables_.end()) it = tables_.emplace(id, Table{family, k, ell, -1, {}}).first;
    return it->second;
  }

  void add_layers(Table& table, int r) {
    while (table.depth() < r) {
      Layer layer;
      const double w = table.layers.empty() ? q_ * scale_.alpha : table.layers.back().pw[1] * q_;
      layer.pw.resize(static_cast<std::size_t>(table.k + 2));
      layer.pw[0] = 1.0;
      for (std::size_t j = 1; j < layer.pw.size(); ++j) layer.pw[j] = layer.pw[j - 1] * w;
      table.layers.push_back(std::move(layer));
    }
  }

  // Dcap reads D one layer down and one count lower.
  void require_exact(const Table& table, int r, int len, int t) {
    if (table.family != Family::Dcap || r < 2 || len - 1 - table.k < 0 || t < 1) return;
    value({Family::D, table.k, 0, r - 1, len - 1 - table.k, t - 1});
  }

  void fill(Table& table, int r, int s, int t) {
    const Table* exact = table.family == Family::Dcap ? &table_for(Family::D, table.k, 0) : nullptr;
    Layer& layer = table.layers[static_cast<std::size_t>(r - 1)];
    layer.v[table.idx(s, t)] = compute(table, exact, r, s, t);
  }

  void fill_acc(Table& table, int r, int s, int t) {
    Layer& layer = table.layers[static_cast<std::size_t>(r - 1)];
    double a = 0.0;
    switch (table.family) {
      case Family::B:
      case Family::D:
        // sum_{m >= 0} w^m v(s - m, t)
        a = table.get(r, s, t) + layer.pw[1] * table.acc(r, s - 1, t);
        break;
      case Family::A:
      case Family::C:
      case Family::E: {
        // sum_{d >= 1} w^{dm} v(s - dm, t - d), m = k - ell
        const int m = table.k - tail_ell(table);
        double wm = 1.0;
        for (int i = 0; i < m; ++i) wm *= layer.pw[1];
        a = wm * (table.get(r, s - m, t - 1) + table.acc(r, s - m, t - 1));
        break;
      }
      case Family::Dcap:
        return;
    }
    layer.acc[table.idx(s, t)] = a;
  }

  void extend(Table& table, int r, int s, int t) {
    const int old_t = table.max_t;
    const int new_t = std::max(old_t, t);
    add_layers(table, r);

    if (new_t != old_t) {
      const int old_stride = old_t + 1;
      const int new_stride = new_t + 1;
      for (auto& layer : table.layers) {
        const int len = old_t < 0 ? 0 : static_cast<int>(layer.v.size()) / old_stride;
        for (auto* vec : {&layer.v, &layer.acc}) {
          std::vector<double> wider(static_cast<std::size_t>(len * new_stride), 0.0);
          for (int si = 0; si < len && !vec->empty(); ++si)
            for (int ti = 0; ti <= old_t; ++ti)
              wider[static_cast<std::size_t>(si * new_stride + ti)] =
                  (*vec)[static_cast<std::size_t>(si * old_stride + ti)];
          *vec = std::move(wider);
        }
      }
      table.max_t = new_t;
      // Fresh t columns over every stored row, bottom layer first.
      for (int ri = 1; ri <= table.depth(); ++ri) {
        const int len = table.len(ri);
        require_exact(table, ri, len, new_t);
        for (int ti = old_t + 1; ti <= new_t; ++ti)
          for (int si = 0; si < len; ++si) fill(table, ri, si, ti);
        for (int ti = old_t + 1; ti <= new_t; ++ti)
          for (int si = 0; si < len; ++si) fill_acc(table, ri, si, ti);
      }
    }

    // Rows: layers lo..r are shorter than s + 1; everything below already is long enough.
    int lo = r;
    while (lo >= 1 && table.len(lo) < s + 1) --lo;
    for (int ri = lo + 1; ri <= r; ++ri) {
      Layer& layer = table.layers[static_cast<std::size_t>(ri - 1)];
      const int old_len = table.len(ri);
      layer.v.resize(static_cast<std::size_t>((s + 1) * table.stride()), 0.0);
      layer.acc.resize(layer.v.size(), 0.0);
      require_exact(table, ri, s + 1, new_t);
      for (int si = old_len; si <= s; ++si) {
        for (int ti = 0; ti <= new_t; ++ti) fill(table, ri, si, ti);
        for (int ti = 0; ti <= new_t; ++ti) fill_acc(table, ri, si, ti);
      }
    }
  }

  static int tail_ell(const Table& table) {
    switch (table.family) {
      case Family::A: return 0;
      case Family::C: return table.k - 1;
      default: return table.ell;
    }
  }

  static bool base_case(Family family, int k, int ell, int s, int t) {
    switch (family) {
      case Family::A: return t == s / k;
      case Family::B: return (s >= k && t == 1) || (s < k && t == 0);
      case Family::C: return (s >= k && t == s - k + 1) || (s < k && t == 0);
      case Family::D: return (s == k && t == 1) || (s != k && t == 0);
      case Family::Dcap: return (s == k && t == 1) || (s < k && t == 0);
      case Family::E: return (s >= k && t == (s - ell) / (k - ell)) || (s < k && t == 0);
    }
    return false;
  }

  double compute(const Table& table, const Table* exact, int r, int s, int t) const {
    const Family family = table.family;
    const int k = table.k;
    if (r == 1) return base_case(family, k, table.ell, s, t) ? (scale_.alpha == 1.0 ? 1.0 : std::pow(scale_.alpha, s)) : 0.0;

    // At-least and exact families vanish unless t cells of size >= k fit.
    if ((family == Family::B || family == Family::D) && (s < t * k || t > r)) return 0.0;

    const auto& pw = table.layers[static_cast<std::size_t>(r - 2)].pw;  // powers of q^{r-1}
    double sum = 0.0;
    for (int j = 0; j < k && j <= s; ++j) sum += pw[static_cast<std::size_t>(j)] * table.get(r - 1, s - j, t);

    const auto K = static_cast<std::size_t>(k);
    switch (family) {
      case Family::B:
        sum += pw[K] * table.acc(r - 1, s - k, t - 1);
        break;
      case Family::D:
        sum += pw[K] * table.get(r - 1, s - k, t - 1);
        sum += pw[K + 1] * table.acc(r - 1, s - k - 1, t);
        break;
      case Family::Dcap:
        sum += pw[K] * exact->get(r - 1, s - k, t - 1);
        break;
      case Family::A:
      case Family::C:
      case Family::E: {
        // cell j = ell + d (k - ell) + u with d >= 1 carries d runs
        const int ell = tail_ell(table);
        for (int u = 0; u < k - ell; ++u)
          sum += pw[static_cast<std::size_t>(ell + u)] * table.acc(r - 1, s - ell - u, t);
        break;
      }
    }
    return scale_.beta == 1.0 ? sum : scale_.beta * sum;
  }

  double q_;
  KernelScale scale_;
  std::map<TableId, Table> tables_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

namespace detail {
inline void check_cache(double q, const KernelCache& cache) {
  if (q != cache.q()) throw parameter_error("kernel: q does not match the cache's q");
  if (!cache.scale().unit()) throw parameter_error("kernel: cache stores scaled values");
}
}  // namespace detail

/// Kernel value through the cache (scaled if the cache is); zero outside
/// the domain r >= 1, s >= 0, t >= 0.
inline double kernel(const KernelKey& key, KernelCache& cache) { return cache.value(key); }

inline double aq(int k, int r, int s, int t, double q, KernelCache& cache) {
  detail::check_cache(q, cache);
  return cache.value({Family::A, k, 0, r, s, t});
}

inline double bq(int k, int r, int s, int t, double q, KernelCache& cache) {
  detail::check_cache(q, cache);
  return cache.value({Family::B, k, 0, r, s, t});
}

inline double cq(int k, int r, int s, int t, double q, KernelCache& cache) {
  detail::check_cache(q, cache);
  return cache.value({Family::C, k, 0, r, s, t});
}

inline double dq(int k, int r, int s, int t, double q, KernelCache& cache) {
  detail::check_cache(q, cache);
  return cache.value({Family::D, k, 0, r, s, t});
}

inline double eq(int k, int ell, int r, int s, int t, double q, KernelCache& cache) {
  detail::check_cache(q, cache);
  return cache.value({Family::E, k, ell, r, s, t});
}

inline double dcap_q(int k, int r, int s, int t, double q, KernelCache& cache) {
  detail::check_cache(q, cache);
  return cache.value({Family::Dcap, k, 0, r, s, t});
}

}  // namespace qnb
