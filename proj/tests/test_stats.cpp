#include <gtest/gtest.h>

#include <sstream>

#include "swcp/config.hpp"
#include "swcp/rng.hpp"
#include "swcp/stats.hpp"

using namespace swcp;

TEST(Rng, StreamsAreReproducible) {
  auto a = trial_stream(1, 2, 3, 0), b = trial_stream(1, 2, 3, 0), c = trial_stream(1, 2, 3, 1);
  for (int i = 0; i < 10; ++i) {
    const auto x = a(), y = b(), z = c();
    EXPECT_EQ(x, y);
    EXPECT_NE(x, z);
  }
  EXPECT_EQ(a.draws(), 10u);
  EXPECT_NE(replicate_seed(1, "a", 0), replicate_seed(1, "b", 0));
  EXPECT_NE(replicate_seed(1, "a", 0), replicate_seed(1, "a", 1));
  EXPECT_EQ(replicate_seed(1, "a", 5), replicate_seed(1, "a", 5));
}

TEST(Rng, UniformMoments) {
  counter_stream s(42);
  running_stats acc;
  for (int i = 0; i < 200000; ++i) acc.add(s.uniform());
  EXPECT_NEAR(acc.mean(), 0.5, 3.0 * std::sqrt(1.0 / 12 / 200000));
  std::vector<int> bins(7, 0);
  for (int i = 0; i < 70000; ++i) ++bins[s.below(7)];
  for (int b : bins) EXPECT_NEAR(b, 10000, 400);
  EXPECT_FALSE(s.bernoulli(0.0));
  EXPECT_TRUE(s.bernoulli(1.0));
}

TEST(Wilson, Interval) {
  const auto e = wilson(0, 100);
  EXPECT_EQ(e.value, 0.0);
  EXPECT_EQ(e.ci_low, 0.0);
  EXPECT_GT(e.ci_high, 0.0);
  const auto f = wilson(50, 100);
  EXPECT_NEAR(f.ci_low, 0.4038, 1e-3);
  EXPECT_NEAR(f.ci_high, 0.5962, 1e-3);
  EXPECT_EQ(wilson(100, 100).ci_high, 1.0);
}

TEST(Ecdf, CountsAndDistance) {
  const auto c = ecdf({1, 1, 2, 5, 9}, 4);
  ASSERT_EQ(c.size(), 5u);
  EXPECT_DOUBLE_EQ(c[0], 0.0);
  EXPECT_DOUBLE_EQ(c[1], 0.4);
  EXPECT_DOUBLE_EQ(c[2], 0.6);
  EXPECT_DOUBLE_EQ(c[4], 0.6);
  EXPECT_DOUBLE_EQ(sup_distance(c, {0, 0.5, 0.5, 0.9, 0.6}), 0.3);
}

TEST(LeastSquares, ExactLine) {
  const auto f = least_squares({1, 2, 3, 4}, {3, 5, 7, 9});
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  EXPECT_NEAR(f.intercept, 1.0, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  EXPECT_THROW(least_squares({1}, {1}), invalid_parameter);
}

TEST(LeastSquares, WeightedStandardError) {
  // Weights 1/sigma^2 with sigma = 0.5 at x = 0, 1: slope SE = sqrt(0.5).
  const auto f = least_squares({0, 1}, {0, 1}, {4, 4});
  EXPECT_NEAR(f.slope_stderr, std::sqrt(0.5), 1e-12);
}

TEST(Quantile, Type7) {
  EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(quantile({7}, 0.9), 7.0);
}

TEST(Bootstrap, LogMedianSe) {
  std::vector<double> v;
  counter_stream s(3);
  for (int i = 0; i < 200; ++i) v.push_back(std::exp(s.uniform() * 4));
  const double se = bootstrap_log_median_se(v, 11);
  EXPECT_GT(se, 0.05);
  EXPECT_LT(se, 0.5);
  EXPECT_EQ(se, bootstrap_log_median_se(v, 11));
}

TEST(Config, ParseAndOverride) {
  std::istringstream in("# comment\nlambda = 1.2\nR = 8, 4096 # trailing\nn = 1e6\nflag = yes\n\n");
  auto c = config::parse(in);
  EXPECT_DOUBLE_EQ(c.get_double("lambda", 0), 1.2);
  EXPECT_EQ(c.get_ints("R", {}), (std::vector<std::int64_t>{8, 4096}));
  EXPECT_EQ(c.get_uint("n", 0), 1000000u);
  EXPECT_TRUE(c.get_bool("flag", false));
  EXPECT_EQ(c.get_string("missing", "x"), "x");
  c.set("lambda", "1.5");
  EXPECT_DOUBLE_EQ(c.get_double("lambda", 0), 1.5);
  EXPECT_EQ(c.canonical(), "R = 8, 4096\nflag = yes\nlambda = 1.5\nn = 1e6\n");
}

TEST(Config, Errors) {
  std::istringstream bad("just words\n");
  EXPECT_THROW(config::parse(bad), invalid_parameter);
  std::istringstream in("x = abc\ny = 1.5\nz = -1\n");
  auto c = config::parse(in);
  EXPECT_THROW(c.get_double("x", 0), invalid_parameter);
  EXPECT_THROW(c.get_int("y", 0), invalid_parameter);
  EXPECT_THROW(c.get_uint("z", 0), invalid_parameter);
  EXPECT_THROW(c.get_bool("x", false), invalid_parameter);
  EXPECT_THROW(config::load("/nonexistent/file.conf"), invalid_parameter);
}
