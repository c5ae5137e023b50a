// qnb/brute_force.hpp - direct summation over weak compositions (kernel oracle)
#pragma once

#include <cmath>
#include <vector>

#include "qnb/error.hpp"
#include "qnb/kernels.hpp"

namespace qnb {

/// Number of weak compositions of s into r parts, C(s + r - 1, r - 1), as a double.
inline double composition_count(int r, int s) {
  if (r <= 0) return s == 0 ? 1.0 : 0.0;
  double c = 1.0;
  for (int i = 1; i < r; ++i) c = c * (s + i) / i;
  return c;
}

inline constexpr double kMaxBruteForceCompositions = 1e7;

/// Sums the kernel weight over every weak composition of s into r cells that
/// satisfies the family's side condition. Independent of KernelCache.
inline double brute_force_kernel(Family family, int k, int ell, int r, int s, int t, double q) {
  KernelKey{family, k, ell, 1, 0, 0}.validate();
  if (r < 1 || s < 0 || t < 0) return 0.0;
  if (composition_count(r, s) > kMaxBruteForceCompositions)
    throw size_guard_error("brute_force_kernel: too many compositions to enumerate");

  std::vector<int> y(static_cast<std::size_t>(r), 0);
  double total = 0.0;

  auto visit = [&] {
    int count = 0;
    int exponent = 0;
    bool admissible = true;
    int exact_seen = 0;
    for (int j = 0; j < r; ++j) {
      const int yj = y[static_cast<std::size_t>(j)];
      count += cell_count(family, k, ell, yj);
      exponent += j * yj;
      if (family == Family::Dcap) {
        if (yj == k) ++exact_seen;
        // Once all t exact cells are placed, no later cell may reach k.
        if (exact_seen == t && yj > k) admissible = false;
      }
    }
    if (admissible && count == t) total += std::pow(q, exponent);
  };

  // Odometer over compositions: cells 0..r-2 free, last cell takes the remainder.
  auto recurse = [&](auto&& self, int cell, int remaining) -> void {
    if (cell == r - 1) {
      y[static_cast<std::size_t>(cell)] = remaining;
      visit();
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      y[static_cast<std::size_t>(cell)] = v;
      self(self, cell + 1, remaining - v);
    }
  };
  recurse(recurse, 0, s);
  return total;
}

}  // namespace qnb
