#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "qnb/table_io.hpp"

using qnb::ModelParams;
using qnb::RunSpec;
using qnb::Scheme;

TEST(TableCsv, GoldenGeometric) {
  // k = r = 1 at q = 1 is Geometric(1/2); 4 rows leave 1/16 of the mass
  const auto t = qnb::build_pmf_table({1, 1, Scheme::non_overlapping()}, {0.5, 1.0}, 1e-8, 4);
  EXPECT_EQ(qnb::to_csv(t), "n,pmf,cdf\n1,0.5,0.5\n2,0.25,0.75\n3,0.125,0.875\n4,0.0625,0.9375\n");
  EXPECT_TRUE(t.truncated);
  EXPECT_DOUBLE_EQ(t.tail_bound, 0.0625);
}

TEST(TableCsv, StderrColumn) {
  qnb::PmfTable t;
  t.spec = {1, 1, Scheme::non_overlapping()};
  t.params = {0.5, 1.0};
  t.probs = {0.5, 0.5};
  t.std_errors = std::vector<double>{0.01, 0.02};
  EXPECT_EQ(qnb::to_csv(t), "n,pmf,cdf,stderr\n1,0.5,0.5,0.01\n2,0.5,1,0.02\n");
}

TEST(TableCsv, TwelveSignificantDigits) {
  EXPECT_EQ(qnb::io::csv_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(qnb::io::json_number(0.1), "0.10000000000000001");
}

TEST(TableJson, RoundTripIsBitEqual) {
  for (const RunSpec spec : {RunSpec{2, 2, Scheme::non_overlapping()}, RunSpec{3, 2, Scheme::ell_overlapping(1)},
                             RunSpec{2, 3, Scheme::exact()}}) {
    const auto t = qnb::build_pmf_table(spec, {0.55, 0.9}, 1e-8, 200);
    const auto back = qnb::pmf_table_from_json(qnb::to_json(t));
    EXPECT_EQ(back.spec.k, t.spec.k);
    EXPECT_EQ(back.spec.r, t.spec.r);
    EXPECT_EQ(back.spec.scheme.kind, t.spec.scheme.kind);
    EXPECT_EQ(back.spec.scheme.ell, t.spec.scheme.ell);
    EXPECT_EQ(back.params.theta, t.params.theta);
    EXPECT_EQ(back.params.q, t.params.q);
    EXPECT_EQ(back.support_min, t.support_min);
    EXPECT_EQ(back.probs, t.probs);  // exact double equality
    EXPECT_EQ(back.tail_bound, t.tail_bound);
    EXPECT_EQ(back.truncated, t.truncated);
    EXPECT_EQ(qnb::to_json(back), qnb::to_json(t));
  }
}

TEST(TableJson, MalformedInput) {
  EXPECT_THROW(qnb::pmf_table_from_json("{\"spec\":1}"), qnb::parameter_error);
  EXPECT_THROW(qnb::pmf_table_from_json("not json"), qnb::parameter_error);
}

TEST(CountTable, NormalizedAndSized) {
  const ModelParams p{0.4, 0.8};
  for (const Scheme s : {Scheme::non_overlapping(), Scheme::at_least(), Scheme::overlapping(), Scheme::exact(),
                         Scheme::ell_overlapping(1)}) {
    const auto t = qnb::build_count_table(s, 10, 2, p);
    EXPECT_EQ(static_cast<int>(t.probs.size()), qnb::max_count(s, 10, 2) + 1) << s.name();
    EXPECT_NEAR(std::accumulate(t.probs.begin(), t.probs.end(), 0.0), 1.0, 1e-9) << s.name();
  }
  // overlapping counting: n - k + 1 + 1 values
  EXPECT_EQ(qnb::build_count_table(Scheme::overlapping(), 10, 2, p).probs.size(), 10u);
}

TEST(CountTable, SizeGuard) {
  EXPECT_THROW(qnb::build_count_table(Scheme::non_overlapping(), 301, 2, {0.5, 1.0}), qnb::size_guard_error);
  EXPECT_THROW(qnb::build_count_table(Scheme::ell_overlapping(2), 10, 2, {0.5, 1.0}), qnb::parameter_error);
}

TEST(CountTable, CsvShape) {
  const auto t = qnb::build_count_table(Scheme::non_overlapping(), 2, 1, {0.5, 1.0});
  EXPECT_EQ(qnb::to_csv(t), "x,pmf\n0,0.25\n1,0.5\n2,0.25\n");
}
