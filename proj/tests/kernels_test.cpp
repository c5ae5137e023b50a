#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "qnb/brute_force.hpp"
#include "qnb/closed_forms.hpp"
#include "qnb/kernels.hpp"

using qnb::Family;

namespace {

struct FamilyPoint {
  Family family;
  int ell;
};

// Every (family, ell) combination for run length k.
std::vector<FamilyPoint> families_for(int k) {
  std::vector<FamilyPoint> out = {{Family::A, 0}, {Family::B, 0}, {Family::C, 0}, {Family::D, 0}, {Family::Dcap, 0}};
  for (int ell = 0; ell < k; ++ell) out.push_back({Family::E, ell});
  return out;
}

}  // namespace

TEST(Kernels, BaseCases) {
  qnb::KernelCache cache(0.5);
  EXPECT_EQ(qnb::aq(2, 1, 5, 2, 0.5, cache), 1.0);
  EXPECT_EQ(qnb::aq(2, 1, 5, 1, 0.5, cache), 0.0);
  EXPECT_EQ(qnb::bq(3, 1, 3, 1, 0.5, cache), 1.0);
  EXPECT_EQ(qnb::cq(2, 1, 5, 4, 0.5, cache), 1.0);
  EXPECT_EQ(qnb::cq(2, 1, 1, 0, 0.5, cache), 1.0);
  EXPECT_EQ(qnb::dq(3, 1, 3, 1, 0.5, cache), 1.0);
  EXPECT_EQ(qnb::dq(3, 1, 5, 0, 0.5, cache), 1.0);
  EXPECT_EQ(qnb::eq(3, 1, 1, 5, 2, 0.5, cache), 1.0);
  EXPECT_EQ(qnb::eq(3, 1, 1, 2, 0, 0.5, cache), 1.0);
  EXPECT_EQ(qnb::aq(2, 1, 0, 0, 0.5, cache), 1.0);
}

// One cell holding fewer than k balls carries zero at-least runs; the value
// is 1 by definition even though the printed base case leaves it out.
TEST(Kernels, AtLeastSingleShortCell) {
  qnb::KernelCache cache(0.7);
  EXPECT_EQ(qnb::bq(3, 1, 2, 0, 0.7, cache), 1.0);
  EXPECT_EQ(qnb::brute_force_kernel(Family::B, 3, 0, 1, 2, 0, 0.7), 1.0);
}

// Frozen from an exact rational enumeration.
TEST(Kernels, FrozenCompositionSums) {
  qnb::KernelCache c5(0.5), c7(0.7), c3(0.3), c6(0.6);
  EXPECT_NEAR(qnb::aq(2, 3, 4, 1, 0.5, c5), 147.0 / 128.0, 1e-15);
  EXPECT_NEAR(qnb::bq(2, 2, 4, 1, 0.7, c7), 2.2831, 1e-14);
  EXPECT_NEAR(qnb::cq(2, 2, 4, 2, 0.3, c3), 0.417, 1e-14);
  EXPECT_EQ(qnb::dq(2, 3, 6, 2, 0.6, c6), 0.0);  // only 2+2+2, which has three exact cells
}

TEST(Kernels, OutOfDomainIsZero) {
  qnb::KernelCache cache(0.5);
  EXPECT_EQ(qnb::aq(2, 0, 3, 1, 0.5, cache), 0.0);
  EXPECT_EQ(qnb::aq(2, 2, -1, 0, 0.5, cache), 0.0);
  EXPECT_EQ(qnb::aq(2, 2, 3, -1, 0.5, cache), 0.0);
  EXPECT_THROW(qnb::eq(3, 3, 1, 2, 0, 0.5, cache), qnb::parameter_error);
  EXPECT_THROW(qnb::aq(2, 1, 2, 1, 0.4, cache), qnb::parameter_error);
}

TEST(Kernels, MatchBruteForceOnGrid) {
  for (double q : {0.25, 0.75, 1.0}) {
    qnb::KernelCache cache(q);
    for (int k = 1; k <= 4; ++k)
      for (auto [family, ell] : families_for(k))
        for (int r = 1; r <= 4; ++r)
          for (int s = 0; s <= 12; ++s)
            for (int t = 0; t <= 4; ++t) {
              const double expect = qnb::brute_force_kernel(family, k, ell, r, s, t, q);
              const double got = qnb::kernel({family, k, ell, r, s, t}, cache);
              ASSERT_NEAR(got, expect, 1e-10 * std::max(1.0, expect))
                  << qnb::family_name(family) << " k=" << k << " ell=" << ell << " r=" << r << " s=" << s
                  << " t=" << t << " q=" << q;
              ASSERT_GE(got, 0.0);
            }
  }
}

TEST(Kernels, ClosedFormsExactAtOne) {
  qnb::KernelCache cache(1.0);
  for (int k = 1; k <= 4; ++k)
    for (auto [family, ell] : families_for(k))
      for (int r = 1; r <= 4; ++r)
        for (int s = 0; s <= 12; ++s)
          for (int t = 0; t <= 4; ++t) {
            const double v = qnb::kernel({family, k, ell, r, s, t}, cache);
            const qnb::BigInt exact = qnb::closed_form_q1(family, k, ell, r, s, t);
            ASSERT_LE(std::abs(v - std::round(v)), 1e-6);
            ASSERT_EQ(qnb::BigInt(static_cast<long long>(std::llround(v))), exact)
                << qnb::family_name(family) << " k=" << k << " ell=" << ell << " r=" << r << " s=" << s
                << " t=" << t;
          }
}

TEST(Kernels, ClosedFormSpecExamples) {
  EXPECT_EQ(qnb::closed_form_q1(Family::A, 2, 0, 1, 5, 2), 1);
  EXPECT_EQ(qnb::closed_form_q1(Family::D, 2, 0, 3, 6, 2),
            qnb::BigInt(static_cast<long long>(qnb::brute_force_kernel(Family::D, 2, 0, 3, 6, 2, 1.0))));
  EXPECT_EQ(qnb::closed_form_q1(Family::B, 2, 0, 2, 4, 1),
            qnb::BigInt(static_cast<long long>(qnb::brute_force_kernel(Family::B, 2, 0, 2, 4, 1, 1.0))));
}

TEST(Kernels, EllCoincidences) {
  for (double q : {0.25, 0.75, 1.0}) {
    qnb::KernelCache cache(q);
    for (int k = 1; k <= 4; ++k)
      for (int r = 1; r <= 4; ++r)
        for (int s = 0; s <= 10; ++s)
          for (int t = 0; t <= 3; ++t) {
            EXPECT_NEAR(qnb::eq(k, 0, r, s, t, q, cache), qnb::aq(k, r, s, t, q, cache), 1e-12);
            EXPECT_NEAR(qnb::eq(k, k - 1, r, s, t, q, cache), qnb::cq(k, r, s, t, q, cache), 1e-12);
          }
  }
}

// Each composition lands in exactly one t, so summing over t counts them all.
TEST(Kernels, TelescopeToCompositionCount) {
  qnb::KernelCache cache(1.0);
  for (int k = 1; k <= 3; ++k)
    for (auto [family, ell] : families_for(k)) {
      if (family == Family::Dcap) continue;
      for (int r = 1; r <= 4; ++r)
        for (int s = 0; s <= 10; ++s) {
          double total = 0.0;
          for (int t = 0; t <= s + 1; ++t) total += qnb::kernel({family, k, ell, r, s, t}, cache);
          EXPECT_EQ(total, qnb::composition_count(r, s));
        }
    }
}

TEST(Kernels, ColdCacheBitIdentical) {
  qnb::KernelCache warm(0.75);
  // warm it up in an awkward order so the tables grow in several steps
  for (int s = 12; s >= 0; s -= 3)
    for (int t = 0; t <= 4; ++t) qnb::kernel({Family::Dcap, 3, 0, 4, s, t}, warm);
  qnb::kernel({Family::E, 3, 1, 2, 20, 7}, warm);
  for (int r = 1; r <= 6; ++r)
    for (int s = 0; s <= 14; ++s)
      for (int t = 0; t <= 5; ++t)
        for (auto [family, ell] : families_for(3)) {
          qnb::KernelCache cold(0.75);
          const double v = qnb::kernel({family, 3, ell, r, s, t}, cold);
          ASSERT_EQ(v, qnb::kernel({family, 3, ell, r, s, t}, warm));
        }
  EXPECT_GT(warm.hits(), 0u);
  EXPECT_GT(warm.size(), 0u);
}

TEST(BruteForce, SizeGuard) {
  EXPECT_THROW(qnb::brute_force_kernel(Family::A, 2, 0, 12, 60, 3, 0.5), qnb::size_guard_error);
}

TEST(Kernels, ScaledCacheMatchesScaledBruteForce) {
  const double theta = 0.3;
  for (double q : {0.5, 1.0}) {
    qnb::KernelCache cache(q, {theta, 1.0 - theta});
    for (int k = 1; k <= 3; ++k)
      for (auto [family, ell] : families_for(k))
        for (int r = 1; r <= 4; ++r)
          for (int s = 0; s <= 10; ++s)
            for (int t = 0; t <= 3; ++t) {
              const double expect = qnb::brute_force_kernel(family, k, ell, r, s, t, q) * std::pow(theta, s) *
                                    std::pow(1.0 - theta, r - 1);
              ASSERT_NEAR(qnb::kernel({family, k, ell, r, s, t}, cache), expect, 1e-13);
            }
    EXPECT_THROW(qnb::aq(2, 1, 2, 1, q, cache), qnb::parameter_error);
  }
}

// Stored values stay finite where raw q = 1 counts would overflow.
TEST(Kernels, ScaledCacheStaysFinite) {
  qnb::KernelCache cache(1.0, {0.5, 0.5});
  // raw value is about C(2199, 1099) ~ 1e660
  const double v = qnb::kernel({Family::D, 50, 0, 1100, 1100, 0}, cache);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_GT(v, 0.0);
  EXPECT_LE(v, 1.0);
}
