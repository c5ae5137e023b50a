// qnb/qmath.hpp - q-shifted factorials, q-numbers and Gaussian binomial coefficients
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "qnb/error.hpp"

namespace qnb {

/// Geometric rate of the trial model. Admits (0, 1]; q = 1 is the IID limit
/// and every q-expression below takes its limiting value there.
class QValue {
 public:
  explicit QValue(double q) : q_(q) {
    if (!(q > 0.0 && q <= 1.0)) throw parameter_error("q must lie in (0, 1]");
  }
  double value() const noexcept { return q_; }
  bool classical() const noexcept { return q_ == 1.0; }

 private:
  double q_;
};

/// (a; q)_n = prod_{i=0}^{n-1} (1 - a q^i); equals 1 for n = 0.
inline double q_shifted_factorial(double a, double q, int n) {
  if (n < 0) throw parameter_error("q_shifted_factorial: n must be non-negative");
  double result = 1.0;
  double aqi = a;
  for (int i = 0; i < n; ++i) {
    result *= 1.0 - aqi;
    aqi *= q;
  }
  return result;
}

/// [z]_q = (1 - q^z) / (1 - q), and z itself at q = 1.
/// Positive z is summed as 1 + q + ... + q^{z-1}, which stays accurate as q -> 1.
inline double q_number(int z, double q) {
  if (q == 1.0) return static_cast<double>(z);
  if (z >= 0) {
    double sum = 0.0;
    double term = 1.0;
    for (int i = 0; i < z; ++i) {
      sum += term;
      term *= q;
    }
    return sum;
  }
  return (1.0 - std::pow(q, z)) / (1.0 - q);
}

/// [z]_{m,q} = [z]_q [z-1]_q ... [z-m+1]_q, the q-factorial of z of order m.
inline double q_factorial(int z, int m, double q) {
  if (m < 0) throw parameter_error("q_factorial: order must be non-negative");
  double result = 1.0;
  for (int i = 0; i < m; ++i) result *= q_number(z - i, q);
  return result;
}

/// [m]_q! = [1]_q [2]_q ... [m]_q
inline double q_factorial(int m, double q) { return q_factorial(m, m, q); }

namespace detail {

// Exact C(n, m) while it fits in 64 bits; the 128-bit intermediate keeps
// c * (n - i) from overflowing before the division.
inline double classical_binomial(int n, int m) {
  m = std::min(m, n - m);
  unsigned __int128 c = 1;
  for (int i = 0; i < m; ++i) {
    c = c * static_cast<unsigned>(n - i) / static_cast<unsigned>(i + 1);
    if (c > (static_cast<unsigned __int128>(1) << 100)) {
      double d = static_cast<double>(c);
      for (int j = i + 1; j < m; ++j) d = d * (n - j) / (j + 1);
      return d;
    }
  }
  return static_cast<double>(c);
}

}  // namespace detail

/// Gaussian polynomial [n m]_q evaluated factor by factor as
/// prod_{i<m} [n-i]_q / [i+1]_q. Returns 0 when m > n or m < 0.
inline double q_binomial_coeff(int n, int m, double q) {
  if (n < 0) throw parameter_error("q_binomial_coeff: n must be non-negative");
  if (m < 0 || m > n) return 0.0;
  if (q == 1.0) return detail::classical_binomial(n, m);
  m = std::min(m, n - m);
  double result = 1.0;
  for (int i = 0; i < m; ++i) result *= q_number(n - i, q) / q_number(i + 1, q);
  return result;
}

/// |prod_{i=1}^{n} (1 + z q^{i-1}) - sum_k q^{k(k-1)/2} [n k]_q z^k|.
/// Self-test of q_binomial_coeff through the q-Newton binomial formula.
inline double q_newton_identity_residual(double z, double q, int n) {
  if (n < 1) throw parameter_error("q_newton_identity_residual: n must be positive");
  double lhs = 1.0;
  double zq = z;
  for (int i = 1; i <= n; ++i) {
    lhs *= 1.0 + zq;
    zq *= q;
  }
  double rhs = 0.0;
  double zk = 1.0;
  double qtri = 1.0;  // q^{k(k-1)/2}
  double qk = 1.0;    // q^k
  for (int k = 0; k <= n; ++k) {
    rhs += qtri * q_binomial_coeff(n, k, q) * zk;
    zk *= z;
    qtri *= qk;
    qk *= q;
  }
  return std::abs(lhs - rhs);
}

}  // namespace qnb
