#include <gtest/gtest.h>

#include <cmath>

#include "swcp/chain.hpp"
#include "swcp/estimators.hpp"

using namespace swcp;

namespace {

model_params raw(double alpha, double beta, int m = 1, int d = 1) {
  model_params p;
  p.alpha = alpha;
  p.beta = beta;
  p.m = m;
  p.d = d;
  p.require_ordering = false;
  return p;
}

}  // namespace

TEST(Survival, Trivial) {
  graph_spec spec;
  EXPECT_EQ(estimate_survival_probability(spec, raw(0, 0), 20, 200, 1).value, 0.0);
  EXPECT_EQ(estimate_survival_probability(spec, raw(3, 1), 8, 200, 1).value, 1.0);
}

TEST(Survival, AboveWeakBoundary) {
  graph_spec spec;
  const auto e = estimate_survival_probability(spec, raw(0.9, 0.45, 5), 100, 1000, 7, 0, 5000);
  EXPECT_GT(e.value, 0.05);
  EXPECT_EQ(e.replicates, 1000u);
}

TEST(Survival, WorkerCountDoesNotMatter) {
  graph_spec spec;
  const auto p = model_params::from_lambda(1.1, 2.0, 3, 1);
  const auto a = estimate_survival_probability(spec, p, 60, 300, 3, 1, 2000);
  const auto b = estimate_survival_probability(spec, p, 60, 300, 3, 3, 2000);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.censored, b.censored);
}

TEST(Return, Trivial) {
  graph_spec spec;
  EXPECT_EQ(estimate_return_probability(spec, raw(3, 0), 20, 5, 200, 1).value, 1.0);
  EXPECT_EQ(estimate_return_probability(spec, raw(0, 0), 20, 5, 200, 1).value, 0.0);
  EXPECT_THROW(estimate_return_probability(spec, raw(1, 0.5), 20, 30, 10, 1), invalid_parameter);
}

TEST(Return, StrongBoundaryContrast) {
  graph_spec spec;
  spec.depth_cap = 3;
  const auto below = estimate_return_probability(spec, raw(0.9, 0.3, 5), 200, 40, 1000, 5, 0, 2000);
  const auto above = estimate_return_probability(spec, raw(1.3, 0.5, 5), 200, 40, 1000, 5, 0, 2000);
  EXPECT_LT(below.ci_high, 0.02);
  EXPECT_GT(above.ci_low, 0.2);
}

TEST(Bisection, DegenerateBracket) {
  graph_spec spec;
  bisection_config cfg;
  cfg.lambda_low = cfg.lambda_high = 1.0;
  EXPECT_THROW(bisect_critical(spec, cfg), invalid_parameter);
}

TEST(Bisection, WrongSideBracket) {
  graph_spec spec;
  bisection_config cfg;
  cfg.m = 3;
  cfg.T = 50;
  cfg.replicates = cfg.max_replicates = 400;
  cfg.lambda_low = 0.3;
  cfg.lambda_high = 0.5;
  cfg.alive_cap = 2000;
  EXPECT_THROW(bisect_critical(spec, cfg), domain_error);
}

TEST(Bisection, TinyBudgetIsUnresolved) {
  graph_spec spec;
  bisection_config cfg;
  cfg.m = 10;
  cfg.T = 100;
  cfg.replicates = cfg.max_replicates = 10;
  cfg.lambda_low = 0.8;
  cfg.lambda_high = 1.6;
  cfg.alive_cap = 2000;
  const auto res = bisect_critical(spec, cfg);
  EXPECT_FALSE(res.resolved);
  EXPECT_LT(res.lambda_low, 1.0);
  EXPECT_GT(res.lambda_high, 1.2);
}

TEST(Bisection, CombBranchingReturnThreshold) {
  // On a spine truncated at |z| <= 20 the local threshold sits within 0.002 of
  // the comb value, and below it the truncated process dies out.
  graph_spec spec;
  spec.family = graph_family::comb;
  spec.dynamics = dynamics_kind::branching;
  spec.radius_cap = 20;
  bisection_config cfg;
  cfg.classifier = classifier_kind::return_to_origin;
  cfg.ratio = 1.0;
  cfg.m = 1;
  cfg.T = 300;
  cfg.window = 60;
  cfg.replicates = 4000;
  cfg.max_replicates = 4000;
  cfg.lambda_low = 1.0;
  cfg.lambda_high = 1.6;
  cfg.tolerance = 0.02;
  cfg.saturation_cap = 2000;
  cfg.seed = 31;
  const auto res = bisect_critical(spec, cfg);
  const double target = comb_brw_critical(1.0);
  EXPECT_LT(std::abs(0.5 * (res.lambda_low + res.lambda_high) - target), 0.05)
      << res.lambda_low << ' ' << res.lambda_high;
}

TEST(Bisection, WeakThresholdNearOne) {
  graph_spec spec;
  bisection_config cfg;
  cfg.m = 10;
  cfg.T = 300;
  cfg.replicates = 2000;
  cfg.max_replicates = 2000;
  cfg.lambda_low = 0.8;
  cfg.lambda_high = 1.6;
  cfg.alive_cap = 2000;
  cfg.tolerance = 0.05;
  const auto res = bisect_critical(spec, cfg);
  EXPECT_GE(res.lambda_low, 0.95);
  EXPECT_LE(res.lambda_high, 1.1);
}

TEST(GrowthRate, BranchingSlopeIsLogLambda) {
  graph_spec spec;
  spec.dynamics = dynamics_kind::branching;
  const auto p = model_params::from_lambda(1.2, 2.0, 1, 1);
  const auto g = estimate_growth_rate(spec, p, 1, 10, 20000, 4, 0, {});
  EXPECT_NEAR(g.c2_hat, std::log(1.2), 3.0 * g.slope_stderr);
}

TEST(GrowthRate, SignsFarFromCritical) {
  graph_spec spec;
  const auto sub = estimate_growth_rate(spec, model_params::from_lambda(0.5, 2.0, 1, 1), 1, 8, 50000, 5);
  EXPECT_LT(sub.z(), -3.0);
  const auto sup = estimate_growth_rate(spec, model_params::from_lambda(2.0, 2.0, 3, 1), 1, 10, 3000, 6);
  EXPECT_GT(sup.z(), 3.0);
  for (const auto& r : sup.residuals) EXPECT_LE(r.residual, 3.0 * r.stderr_);
}

TEST(GrowthRate, Validation) {
  graph_spec spec;
  const auto p = model_params::from_lambda(1.2, 2.0, 1, 1);
  EXPECT_THROW(estimate_growth_rate(spec, p, 5, 5, 100, 1), invalid_parameter);
  EXPECT_THROW(estimate_growth_rate(spec, p, 1, 5, 1, 1), invalid_parameter);
}
