// qnb/closed_forms.hpp - exact q = 1 allocation counts for the kernel families
#pragma once

#include <algorithm>

#include <boost/multiprecision/cpp_int.hpp>

#include "qnb/error.hpp"
#include "qnb/kernels.hpp"

namespace qnb {

using BigInt = boost::multiprecision::cpp_int;

namespace combinatorics {

/// C(n, m), zero when m < 0, n < 0 or m > n.
inline BigInt binomial(long n, long m) {
  if (m < 0 || n < 0 || m > n) return 0;
  m = std::min(m, n - m);
  BigInt c = 1;
  for (long i = 0; i < m; ++i) {
    c *= n - i;
    c /= i + 1;
  }
  return c;
}

/// Weak compositions of m into c parts; 1 for m = c = 0.
inline BigInt weak_compositions(long m, long c) {
  if (m < 0 || c < 0) return 0;
  if (c == 0) return m == 0 ? 1 : 0;
  return binomial(m + c - 1, m);
}

/// Compositions of t into a positive parts; 1 for t = a = 0.
inline BigInt positive_compositions(long t, long a) {
  if (a == 0) return t == 0 ? 1 : 0;
  return binomial(t - 1, a - 1);
}

/// S(a, b, c): solutions of x_1 + ... + x_a = c with 0 < x_i < b,
/// by the alternating sum sum_j (-1)^j C(a, j) C(c - j(b-1) - 1, a - 1).
inline BigInt bounded_solutions(long a, long b, long c) {
  if (a == 0) return c == 0 ? 1 : 0;
  BigInt total = 0;
  for (long j = 0; j <= a; ++j) {
    BigInt term = binomial(a, j) * binomial(c - j * (b - 1) - 1, a - 1);
    if (j % 2) total -= term; else total += term;
  }
  return total;
}

/// H_m(alpha, r, k): alpha balls into r cells, m specified cells holding at most k.
inline BigInt capped_allocations(long m, long alpha, long r, long k) {
  if (alpha < 0) return 0;
  BigInt total = 0;
  for (long j = 0; j <= alpha / (k + 1); ++j) {
    const long rest = alpha - (k + 1) * j;
    BigInt term = binomial(m, j) * weak_compositions(rest, r);
    if (j % 2) total -= term; else total += term;
  }
  return total;
}

/// A(alpha, r, k): alpha balls into r cells with no cell holding exactly k.
inline BigInt no_exact_allocations(long alpha, long r, long k) {
  if (alpha < 0 || r < 0) return 0;
  BigInt total = 0;
  for (long j = 0; j <= std::min(alpha / k, r); ++j) {
    BigInt term = binomial(r, j) * weak_compositions(alpha - j * k, r - j);
    if (j % 2) total -= term; else total += term;
  }
  return total;
}

/// C(alpha; i, r - i; m, n): alpha balls into r cells, i specified cells of
/// capacity m - 1 and the other r - i of capacity n - 1.
inline BigInt two_capacity_allocations(long alpha, long i, long r, long m, long n) {
  if (alpha < 0) return 0;
  if (r == 0) return alpha == 0 ? 1 : 0;
  BigInt total = 0;
  for (long j1 = 0; j1 <= alpha / m; ++j1) {
    for (long j2 = 0; j2 <= (alpha - m * j1) / n; ++j2) {
      BigInt term = binomial(i, j1) * binomial(r - i, j2) *
                    binomial(alpha - m * j1 - n * j2 + r - 1, r - 1);
      if ((j1 + j2) % 2) total -= term; else total += term;
    }
  }
  return total;
}

/// Cells in [0, k-1] summing to m, c of them.
inline BigInt below_k(long c, long k, long m) { return bounded_solutions(c, k + 1, m + c); }

}  // namespace combinatorics

namespace detail {

inline BigInt a1(long k, long r, long s, long t) {
  if (s - k * t < 0) return 0;
  return combinatorics::binomial(r + t - 1, t) * combinatorics::below_k(r, k, s - k * t);
}

inline BigInt b1(long k, long r, long s, long t) {
  if (t > r) return 0;
  return combinatorics::binomial(r, t) * combinatorics::capped_allocations(r - t, s - t * k, r, k - 1);
}

inline BigInt c1(long k, long r, long s, long t) {
  BigInt total = 0;
  for (long a = 0; a <= std::min(r, t); ++a)
    total += combinatorics::binomial(r, a) * combinatorics::positive_compositions(t, a) *
             combinatorics::bounded_solutions(r - a, k + 1, s + r - t - a * k);
  return total;
}

inline BigInt d1(long k, long r, long s, long t) {
  if (r == 0) return s == 0 && t == 0 ? 1 : 0;
  if (t > r) return 0;
  return combinatorics::binomial(r, t) * combinatorics::no_exact_allocations(s - t * k, r - t, k);
}

inline BigInt e1(long k, long ell, long r, long s, long t) {
  BigInt total = 0;
  for (long a = 0; a <= std::min(r, t); ++a)
    total += combinatorics::binomial(r, a) * combinatorics::positive_compositions(t, a) *
             combinatorics::two_capacity_allocations(s - a * ell - (k - ell) * t, a, r, k - ell, k);
  return total;
}

// Position p of the last exact cell splits the composition into a D-count
// prefix and a tail of cells below k.
inline BigInt dcap1(long k, long r, long s, long t) {
  if (t == 0) return combinatorics::below_k(r, k, s);
  BigInt total = 0;
  for (long p = t; p <= r; ++p)
    for (long head = 0; head <= s - k; ++head)
      total += d1(k, p - 1, head, t - 1) * combinatorics::below_k(r - p, k, s - k - head);
  return total;
}

}  // namespace detail

/// Kernel value at q = 1 from the allocation-count closed forms.
inline BigInt closed_form_q1(Family family, int k, int ell, int r, int s, int t) {
  KernelKey{family, k, ell, 1, 0, 0}.validate();
  if (r < 1 || s < 0 || t < 0) return 0;
  switch (family) {
    case Family::A: return detail::a1(k, r, s, t);
    case Family::B: return detail::b1(k, r, s, t);
    case Family::C: return detail::c1(k, r, s, t);
    case Family::D: return detail::d1(k, r, s, t);
    case Family::E: return detail::e1(k, ell, r, s, t);
    case Family::Dcap: return detail::dcap1(k, r, s, t);
  }
  return 0;
}

}  // namespace qnb
