// qnb/runcount.hpp - run counting and pathwise waiting times on concrete 0/1 sequences
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qnb/error.hpp"

namespace qnb {

/// Finite sequence of failures (0) and successes (1).
class BinarySeq {
 public:
  BinarySeq() = default;

  explicit BinarySeq(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto b : bits_)
      if (b > 1) throw parameter_error("BinarySeq: elements must be 0 or 1");
  }

  /// Parses an ASCII string of '0'/'1' characters.
  static BinarySeq parse(std::string_view text) {
    std::vector<std::uint8_t> bits;
    bits.reserve(text.size());
    for (char c : text) {
      if (c != '0' && c != '1')
        throw parameter_error("BinarySeq: unexpected character '" + std::string(1, c) + "'");
      bits.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return BinarySeq(std::move(bits));
  }

  /// Bit i of `mask` is trial i + 1.
  static BinarySeq from_mask(std::uint64_t mask, int n) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) bits[static_cast<std::size_t>(i)] = (mask >> i) & 1U;
    return BinarySeq(std::move(bits));
  }

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  /// F_j for j = 0..n: number of failures among the first j trials.
  std::vector<int> failure_prefix() const {
    std::vector<int> f(bits_.size() + 1, 0);
    for (std::size_t j = 0; j < bits_.size(); ++j) f[j + 1] = f[j] + (bits_[j] == 0 ? 1 : 0);
    return f;
  }

  /// Lengths of the maximal runs of ones, left to right.
  std::vector<int> maximal_runs() const {
    std::vector<int> runs;
    int m = 0;
    for (auto b : bits_) {
      if (b) {
        ++m;
      } else if (m > 0) {
        runs.push_back(m);
        m = 0;
      }
    }
    if (m > 0) runs.push_back(m);
    return runs;
  }

  std::string to_string() const {
    std::string s;
    s.reserve(bits_.size());
    for (auto b : bits_) s.push_back(b ? '1' : '0');
    return s;
  }

  friend bool operator==(const BinarySeq&, const BinarySeq&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

enum class SchemeKind { non_overlapping, at_least, overlapping, exact, ell_overlapping };

/// Enumeration scheme for runs of k successes. `ell` is meaningful only for
/// ell-overlapping counting, where 0 <= ell < k.
struct Scheme {
  SchemeKind kind = SchemeKind::non_overlapping;
  int ell = 0;

  static constexpr Scheme non_overlapping() { return {SchemeKind::non_overlapping, 0}; }
  static constexpr Scheme at_least() { return {SchemeKind::at_least, 0}; }
  static constexpr Scheme overlapping() { return {SchemeKind::overlapping, 0}; }
  static constexpr Scheme exact() { return {SchemeKind::exact, 0}; }
  static constexpr Scheme ell_overlapping(int ell) { return {SchemeKind::ell_overlapping, ell}; }

  void validate(int k) const {
    if (k < 1) throw parameter_error("run length k must be >= 1");
    if (kind == SchemeKind::ell_overlapping && (ell < 0 || ell >= k))
      throw parameter_error("ell must satisfy 0 <= ell < k");
  }

  /// CLI spelling: type1, type2, type3, type4, loverlap.
  std::string name() const {
    switch (kind) {
      case SchemeKind::non_overlapping: return "type1";
      case SchemeKind::at_least: return "type2";
      case SchemeKind::overlapping: return "type3";
      case SchemeKind::exact: return "type4";
      case SchemeKind::ell_overlapping: return "loverlap";
    }
    return "?";
  }

  static Scheme parse(std::string_view name, int ell = 0) {
    if (name == "type1") return non_overlapping();
    if (name == "type2") return at_least();
    if (name == "type3") return overlapping();
    if (name == "type4") return exact();
    if (name == "loverlap") return ell_overlapping(ell);
    throw parameter_error("unknown scheme '" + std::string(name) + "'");
  }

  friend bool operator==(const Scheme&, const Scheme&) = default;
};

/// Occurrences contributed by one maximal run of m ones.
inline int run_contribution(int m, int k, Scheme scheme) {
  switch (scheme.kind) {
    case SchemeKind::non_overlapping: return m / k;
    case SchemeKind::at_least: return m >= k ? 1 : 0;
    case SchemeKind::overlapping: return m >= k ? m - k + 1 : 0;
    case SchemeKind::exact: return m == k ? 1 : 0;
    case SchemeKind::ell_overlapping:
      return m >= k ? (m - scheme.ell) / (k - scheme.ell) : 0;
  }
  return 0;
}

/// Number of runs of order k in `seq` under `scheme`, from the maximal-run decomposition.
inline int count_runs(const BinarySeq& seq, int k, Scheme scheme) {
  scheme.validate(k);
  int total = 0;
  for (int m : seq.maximal_runs()) total += run_contribution(m, k, scheme);
  return total;
}

/// Largest count any sequence of n trials can reach (the all-ones sequence
/// for every scheme but exact-length, which packs 1^k 0 blocks).
inline int max_count(Scheme scheme, int n, int k) {
  scheme.validate(k);
  if (n < k) return 0;
  switch (scheme.kind) {
    case SchemeKind::non_overlapping: return n / k;
    case SchemeKind::at_least:
    case SchemeKind::exact: return (n + 1) / (k + 1);
    case SchemeKind::overlapping: return n - k + 1;
    case SchemeKind::ell_overlapping: return (n - scheme.ell) / (k - scheme.ell);
  }
  return 0;
}

/// Left-to-right automaton that tracks the occurrence count of a prefix as
/// trials arrive. For exact-length counting the ongoing run counts iff its
/// current length is exactly k, so that count can drop when the run grows.
class RunCounter {
 public:
  RunCounter(int k, Scheme scheme) : k_(k), scheme_(scheme) { scheme.validate(k); }

  void push(bool success) {
    if (!success) {
      if (scheme_.kind == SchemeKind::exact && run_ == k_) ++settled_;
      run_ = 0;
      since_ = 0;
      return;
    }
    ++run_;
    switch (scheme_.kind) {
      case SchemeKind::non_overlapping:
        if (++since_ == k_) {
          ++settled_;
          since_ = 0;
        }
        break;
      case SchemeKind::at_least:
        if (run_ == k_) ++settled_;
        break;
      case SchemeKind::overlapping:
        if (run_ >= k_) ++settled_;
        break;
      case SchemeKind::exact:
        break;
      case SchemeKind::ell_overlapping:
        if (run_ == k_) {
          ++settled_;
          since_ = 0;
        } else if (run_ > k_ && ++since_ == k_ - scheme_.ell) {
          ++settled_;
          since_ = 0;
        }
        break;
    }
  }

  int count() const noexcept {
    if (scheme_.kind == SchemeKind::exact) return settled_ + (run_ == k_ ? 1 : 0);
    return settled_;
  }

  int current_run() const noexcept { return run_; }

 private:
  int k_;
  Scheme scheme_;
  int run_ = 0;
  int since_ = 0;
  int settled_ = 0;
};

/// Same count as count_runs, computed by the online automaton.
inline int count_runs_online(const BinarySeq& seq, int k, Scheme scheme) {
  RunCounter counter(k, scheme);
  for (auto b : seq.bits()) counter.push(b != 0);
  return counter.count();
}

/// Smallest prefix length at which the online count first equals r, or
/// nullopt when no prefix of `seq` gets there.
inline std::optional<int> waiting_time(const BinarySeq& seq, int k, int r, Scheme scheme) {
  if (r < 1) throw parameter_error("r must be >= 1");
  RunCounter counter(k, scheme);
  int n = 0;
  for (auto b : seq.bits()) {
    counter.push(b != 0);
    ++n;
    if (counter.count() == r) return n;
  }
  return std::nullopt;
}

}  // namespace qnb
