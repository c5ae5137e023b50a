#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

#include "qnb/oracle.hpp"

using qnb::BinarySeq;
using qnb::ModelParams;
using qnb::RunSpec;
using qnb::Scheme;

TEST(SequenceProbability, SpecExamples) {
  EXPECT_DOUBLE_EQ(qnb::sequence_probability(BinarySeq::parse("111"), {0.5, 0.3}), 0.125);
  EXPECT_DOUBLE_EQ(qnb::sequence_probability(BinarySeq::parse("01"), {0.5, 0.5}), 0.125);
  EXPECT_EQ(qnb::sequence_probability(BinarySeq(), {0.5, 0.5}), 1.0);
}

TEST(SequenceProbability, TotalIsOne) {
  for (double theta : {0.3, 0.5, 0.8})
    for (double q : {0.5, 0.9, 1.0})
      for (int n = 0; n <= 14; ++n) {
        double total = 0.0;
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask)
          total += qnb::sequence_probability(BinarySeq::from_mask(mask, n), {theta, q});
        ASSERT_NEAR(total, 1.0, 1e-12);
      }
}

TEST(EnumerateWaiting, SpecExamples) {
  EXPECT_DOUBLE_EQ(qnb::enumerate_waiting_pmf({2, 2, Scheme::non_overlapping()}, {0.5, 1.0}, 4).pmf(4), 0.0625);
  EXPECT_DOUBLE_EQ(qnb::enumerate_waiting_pmf({2, 1, Scheme::at_least()}, {0.7, 0.4}, 2).pmf(2), 0.49);
  EXPECT_THROW(qnb::enumerate_waiting_pmf({2, 1, Scheme::at_least()}, {0.7, 0.4}, 23), qnb::size_guard_error);
}

// {W = n} depends only on the first n trials: summing full-length paths by
// their waiting time gives the same numbers as the per-n enumeration.
TEST(EnumerateWaiting, PrefixMeasurable) {
  const int n_max = 12;
  for (auto scheme : {Scheme::non_overlapping(), Scheme::at_least(), Scheme::overlapping(), Scheme::exact(),
                      Scheme::ell_overlapping(1)}) {
    const RunSpec spec{3, 2, scheme};
    const ModelParams params{0.6, 0.8};
    const auto table = qnb::enumerate_waiting_pmf(spec, params, n_max);
    std::vector<double> by_w(n_max + 1, 0.0);
    for (std::uint64_t mask = 0; mask < (1u << n_max); ++mask) {
      const BinarySeq seq = BinarySeq::from_mask(mask, n_max);
      if (auto w = qnb::waiting_time(seq, spec.k, spec.r, scheme))
        by_w[static_cast<std::size_t>(*w)] += qnb::sequence_probability(seq, params);
    }
    for (int n = 1; n <= n_max; ++n) EXPECT_NEAR(table.pmf(n), by_w[static_cast<std::size_t>(n)], 1e-13);
  }
}

TEST(EnumerateWaiting, ThreadCountDoesNotChangeBits) {
  const RunSpec spec{2, 2, Scheme::exact()};
  const ModelParams params{0.6, 0.8};
  setenv("QNB_THREADS", "1", 1);
  const auto one = qnb::enumerate_waiting_pmf(spec, params, 16);
  setenv("QNB_THREADS", "3", 1);
  const auto three = qnb::enumerate_waiting_pmf(spec, params, 16);
  unsetenv("QNB_THREADS");
  EXPECT_EQ(one.probs, three.probs);
}

TEST(EnumerateCounts, SpecExamples) {
  const auto f = qnb::enumerate_count_pmf(Scheme::non_overlapping(), 12, 2, {0.5, 1.0});
  double total = 0.0;
  for (double p : f) total += p;
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_EQ(f.size(), 7u);  // 111111111111 holds six
  // P(N >= 3) at q = 1 counts 011111000111 among its 2^-12 atoms
  double at_least_three = 0.0;
  for (std::size_t x = 3; x < f.size(); ++x) at_least_three += f[x];
  EXPECT_GE(at_least_three, std::pow(2.0, -12));
  EXPECT_EQ(qnb::count_runs(BinarySeq::parse("011111000111"), 2, Scheme::non_overlapping()), 3);
}

TEST(Sampler, Deterministic) {
  qnb::TrialSampler a({0.4, 0.7}, 42, 3);
  qnb::TrialSampler b({0.4, 0.7}, 42, 3);
  qnb::TrialSampler c({0.4, 0.7}, 42, 4);
  const auto sa = qnb::sample_sequence(a, 200);
  EXPECT_EQ(sa, qnb::sample_sequence(b, 200));
  EXPECT_NE(sa, qnb::sample_sequence(c, 200));
}

TEST(Sampler, IidFrequency) {
  const double theta = 0.9;
  qnb::TrialSampler s({theta, 1.0}, 7);
  const int n = 100000;
  const auto seq = qnb::sample_sequence(s, n);
  double ones = 0.0;
  for (auto b : seq.bits()) ones += b;
  const double sigma = std::sqrt(n * theta * (1.0 - theta));
  EXPECT_NEAR(ones, n * theta, 3.0 * sigma);
}

TEST(Sampler, FirstTrialMarginal) {
  const double theta = 0.35;
  qnb::TrialSampler s({theta, 0.5}, 11);
  const int reps = 100000;
  int ones = 0;
  for (int i = 0; i < reps; ++i) ones += s.trial(0) ? 1 : 0;
  EXPECT_NEAR(ones, reps * theta, 3.0 * std::sqrt(reps * theta * (1.0 - theta)));
}

// After exactly i - 1 failures the next trial fails with probability 1 - theta q^{i-1}.
TEST(Sampler, ConditionalFailureRate) {
  const ModelParams p{0.6, 0.7};
  qnb::TrialSampler s(p, 5);
  const int reps = 100000;
  const int watch = 3;  // observe the trial following the third failure
  int fails = 0;
  for (int rep = 0; rep < reps; ++rep) {
    int failures = 0;
    while (failures < watch)
      if (!s.trial(failures)) ++failures;
    if (!s.trial(failures)) ++fails;
  }
  const double expect = 1.0 - p.theta * std::pow(p.q, watch);
  EXPECT_NEAR(fails, reps * expect, 3.0 * std::sqrt(reps * expect * (1.0 - expect)));
}

TEST(MonteCarlo, AgreesWithEnumeration) {
  const RunSpec spec{2, 2, Scheme::exact()};
  const ModelParams params{0.6, 0.8};
  const long reps = 100000;
  const auto mc = qnb::monte_carlo_waiting_pmf(spec, qnb::TrialSampler(params, 42), reps, 16);
  const auto exact = qnb::enumerate_waiting_pmf(spec, params, 16);
  int beyond_two = 0;
  for (int n = 1; n <= 16; ++n) {
    const double p = exact.pmf(n);
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
    if (p == 0.0) {
      EXPECT_EQ(mc.pmf(n), 0.0);
      continue;
    }
    EXPECT_LE(std::abs(mc.pmf(n) - p), 4.0 * se) << n;
    if (std::abs(mc.pmf(n) - p) > 2.0 * se) ++beyond_two;
  }
  EXPECT_LE(beyond_two, 1);
  ASSERT_TRUE(mc.std_errors.has_value());
  EXPECT_EQ(mc.std_errors->size(), mc.probs.size());
  EXPECT_NEAR(mc.mass() + mc.tail_bound, 1.0, 1e-12);
  EXPECT_NEAR(mc.pmf(qnb::support_min(spec)), exact.pmf(qnb::support_min(spec)), 0.01);
}

TEST(MonteCarlo, Reproducible) {
  const RunSpec spec{2, 1, Scheme::overlapping()};
  const qnb::TrialSampler s({0.5, 0.9}, 42);
  setenv("QNB_THREADS", "1", 1);
  const auto a = qnb::monte_carlo_waiting_pmf(spec, s, 20000, 30);
  setenv("QNB_THREADS", "4", 1);
  const auto b = qnb::monte_carlo_waiting_pmf(spec, s, 20000, 30);
  unsetenv("QNB_THREADS");
  EXPECT_EQ(a.probs, b.probs);
  EXPECT_EQ(a.tail_bound, b.tail_bound);
  EXPECT_THROW(qnb::monte_carlo_waiting_pmf(spec, s, 999, 30), qnb::parameter_error);
}
