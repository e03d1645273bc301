#ifndef SWCP_ESTIMATORS_HPP_
#define SWCP_ESTIMATORS_HPP_

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "swcp/dynamics.hpp"
#include "swcp/lazy_tree.hpp"
#include "swcp/parallel.hpp"
#include "swcp/params.hpp"
#include "swcp/rng.hpp"
#include "swcp/small_world.hpp"
#include "swcp/stats.hpp"

namespace swcp {

enum class graph_family { small_world, big_world, comb, km };

inline std::string to_string(graph_family f) {
  switch (f) {
    case graph_family::small_world: return "small_world";
    case graph_family::big_world: return "big_world";
    case graph_family::comb: return "comb";
    case graph_family::km: return "km";
  }
  return "?";
}

inline graph_family parse_graph_family(const std::string& s) {
  if (s == "small_world" || s == "small-world") return graph_family::small_world;
  if (s == "big_world" || s == "big-world") return graph_family::big_world;
  if (s == "comb") return graph_family::comb;
  if (s == "km" || s == "K_M") return graph_family::km;
  throw invalid_parameter("unknown graph family: " + s);
}

/// Which graph a Monte Carlo estimator runs on, and with which dynamics.
struct graph_spec {
  graph_family family = graph_family::big_world;
  std::int64_t R = 0;                       // small world side length
  std::optional<std::uint64_t> graph_seed;  // fixed small world; resampled per replicate if unset
  std::uint64_t M = 0;                      // K_M copy size
  std::optional<std::uint32_t> depth_cap;   // tree families: discard births below this depth
  std::optional<std::int64_t> radius_cap;   // tree families: discard births with |z_i| beyond this
  dynamics_kind dynamics = dynamics_kind::contact;
  std::size_t population_cap = default_population_cap;  // hard guard, throws resource_error
};

/// Builds the topology for one replicate and passes it to fn.
template <class Fn>
decltype(auto) with_topology(const graph_spec& spec, const model_params& p,
                             std::uint64_t replicate, Fn&& fn) {
  if (spec.family == graph_family::small_world) {
    const auto gseed = spec.graph_seed ? *spec.graph_seed : hash_combine(replicate, 0x6a09e667ULL);
    const auto g = make_small_world(spec.R, p.m, p.d, gseed);
    small_world_topology topo(g);
    return fn(topo);
  }
  tree_family f = spec.family == graph_family::comb  ? tree_family::comb
                  : spec.family == graph_family::km ? tree_family::km
                                                    : tree_family::big_world;
  tree_topology topo(f, p.m, p.d, spec.M);
  topo.set_depth_cap(spec.depth_cap);
  topo.set_radius_cap(spec.radius_cap);
  return fn(topo);
}

/// Runs the chosen dynamics from the origin alone.
template <class Topology, class Observer>
void evolve_from_origin(const graph_spec& spec, Topology& topo, const model_params& p,
                        std::uint64_t horizon, std::uint64_t seed, Observer&& obs) {
  using V = typename Topology::vertex;
  if (spec.dynamics == dynamics_kind::contact) {
    infection_state<V> s{topo.origin()};
    evolve(std::move(s), topo, p, horizon, seed, obs, spec.population_cap);
  } else {
    brw_state<V> s{{topo.origin(), 1}};
    evolve(std::move(s), topo, p, horizon, seed, obs, spec.population_cap);
  }
}

/// P(alive at T) from a single infected origin, Wilson interval. A replicate
/// whose population reaches `alive_cap` is stopped and counted alive; those
/// are reported in `censored`.
inline estimate estimate_survival_probability(const graph_spec& spec, const model_params& p,
                                              std::uint64_t T, std::uint64_t n,
                                              std::uint64_t seed, unsigned workers = 0,
                                              std::uint64_t alive_cap = 0) {
  p.validate();
  if (n < 1) throw invalid_parameter("need at least one replicate");
  struct rep {
    std::uint8_t alive = 0;
    std::uint8_t capped = 0;
  };
  auto runs = parallel_replicates(n, workers, [&](std::uint64_t i) {
    const auto rs = replicate_seed(seed, "survival", i);
    return with_topology(spec, p, rs, [&](auto& topo) {
      rep out;
      evolve_from_origin(spec, topo, p, T, rs, [&](std::uint64_t t, const auto& s) {
        if (s.empty()) return true;
        if (alive_cap > 0 && population(s) >= alive_cap) {
          out.alive = out.capped = 1;
          return true;
        }
        if (t == T) out.alive = 1;
        return false;
      });
      return out;
    });
  });
  std::uint64_t alive = 0, capped = 0;
  for (const auto& r : runs) {
    alive += r.alive;
    capped += r.capped;
  }
  auto e = wilson(alive, n);
  e.censored = capped;
  e.seed = seed;
  return e;
}

/// Fraction of replicates with the origin infected at some t in
/// [T - window, T], Wilson interval. A replicate whose population reaches
/// `saturation_cap` is stopped and counted as returning; those are reported in
/// `censored`.
inline estimate estimate_return_probability(const graph_spec& spec, const model_params& p,
                                            std::uint64_t T, std::uint64_t window,
                                            std::uint64_t n, std::uint64_t seed,
                                            unsigned workers = 0,
                                            std::uint64_t saturation_cap = 0) {
  p.validate();
  if (window > T) throw invalid_parameter("window must not exceed T");
  if (n < 1) throw invalid_parameter("need at least one replicate");
  auto hits = parallel_replicates(n, workers, [&](std::uint64_t i) -> std::uint8_t {
    const auto rs = replicate_seed(seed, "return", i);
    return with_topology(spec, p, rs, [&](auto& topo) -> std::uint8_t {
      std::uint8_t hit = 0;
      evolve_from_origin(spec, topo, p, T, rs, [&](std::uint64_t t, const auto& s) {
        if (s.empty()) return true;
        if (saturation_cap > 0 && population(s) >= saturation_cap) {
          hit = 3;
          return true;
        }
        if (t >= T - window && contains(s, topo.origin())) {
          hit = 1;
          return true;
        }
        return false;
      });
      return hit;
    });
  });
  std::uint64_t k = 0, capped = 0;
  for (auto h : hits) {
    k += h != 0;
    capped += h == 3;
  }
  auto e = wilson(k, n);
  e.censored = capped;
  e.seed = seed;
  return e;
}

enum class classifier_kind { survival, return_to_origin };

inline std::string to_string(classifier_kind c) {
  return c == classifier_kind::survival ? "survival" : "return";
}

struct bisection_step {
  int iteration = 0;
  double lambda = 0;
  estimate est;
  std::string decision;  // above | below | ambiguous
};

struct bisection_result {
  double lambda_low = 0;
  double lambda_high = 0;
  bool resolved = false;  // false if an ambiguous midpoint stopped the search
  std::vector<bisection_step> trace;
};

struct bisection_config {
  classifier_kind classifier = classifier_kind::survival;
  double ratio = 2.0;
  double gamma = 0.0;
  int m = 1;
  int d = 1;
  double lambda_low = 0.5;
  double lambda_high = 2.0;
  std::uint64_t T = 300;
  std::uint64_t window = 60;
  std::uint64_t replicates = 4000;
  std::uint64_t max_replicates = 16000;
  double threshold = 0.02;
  double tolerance = 0.02;
  std::uint64_t alive_cap = 0;       // survival: population counted as alive
  std::uint64_t saturation_cap = 0;  // return: population counted as returning
  std::uint64_t seed = 1;
  unsigned workers = 0;
};

/// Brackets the lambda at which the classifier crosses its threshold, for a
/// fixed ratio r. Each probe compares the Wilson interval with the threshold;
/// a probe whose interval straddles it is retried with doubled replicates up
/// to max_replicates. Replicate seeds do not depend on lambda, so estimates
/// at different lambda are monotonically coupled.
inline bisection_result bisect_critical(const graph_spec& spec, const bisection_config& cfg) {
  if (!(cfg.lambda_low < cfg.lambda_high))
    throw invalid_parameter("degenerate bisection bracket");
  bisection_result res;
  int iteration = 0;
  auto probe = [&](double lambda) -> std::string {
    auto p = model_params::from_lambda(lambda, cfg.ratio, cfg.m, cfg.d, cfg.gamma);
    std::uint64_t n = cfg.replicates;
    while (true) {
      estimate e = cfg.classifier == classifier_kind::survival
                       ? estimate_survival_probability(spec, p, cfg.T, n, cfg.seed, cfg.workers,
                                                       cfg.alive_cap)
                       : estimate_return_probability(spec, p, cfg.T, cfg.window, n, cfg.seed,
                                                     cfg.workers, cfg.saturation_cap);
      std::string decision = e.ci_low > cfg.threshold    ? "above"
                             : e.ci_high < cfg.threshold ? "below"
                                                         : "ambiguous";
      if (decision != "ambiguous" || n * 2 > cfg.max_replicates) {
        res.trace.push_back({iteration++, lambda, e, decision});
        return decision;
      }
      n *= 2;
    }
  };
  const auto lo_decision = probe(cfg.lambda_low);
  const auto hi_decision = probe(cfg.lambda_high);
  if (lo_decision == "above" || hi_decision == "below")
    throw domain_error("bracket does not straddle the threshold (low: " + lo_decision +
                       ", high: " + hi_decision + ")");
  double lo = cfg.lambda_low, hi = cfg.lambda_high;
  res.lambda_low = lo;
  res.lambda_high = hi;
  // An ambiguous end point leaves the whole bracket as the answer.
  if (lo_decision != "below" || hi_decision != "above") return res;
  res.resolved = true;
  while (hi - lo > cfg.tolerance) {
    const double mid = 0.5 * (lo + hi);
    const auto decision = probe(mid);
    if (decision == "above") {
      hi = mid;
    } else if (decision == "below") {
      lo = mid;
    } else {
      res.resolved = false;
      break;
    }
  }
  res.lambda_low = lo;
  res.lambda_high = hi;
  return res;
}

struct log_mean_point {
  std::uint64_t t;
  double mean;
  double log_mean;
  double log_mean_stderr;
};

struct multiplicativity_residual {
  std::uint64_t t, s;
  double residual;  // log E|B_{t+s}| - log E|B_t| - log E|B_s|
  double stderr_;
};

/// Exponential growth rate of E|B_t| from a single origin.
struct growth_rate_estimate {
  double c2_hat = 0;
  double slope_stderr = 0;
  double intercept = 0;
  std::uint64_t t_min = 0, t_max = 0;
  bool deep_subcritical = false;  // some mean in range was zero
  std::vector<log_mean_point> log_means;
  std::vector<multiplicativity_residual> residuals;
  std::uint64_t replicates = 0;
  std::uint64_t seed = 0;
  double z() const { return slope_stderr > 0 ? c2_hat / slope_stderr : 0.0; }
};

/// Least-squares slope of log mean population over [t_min, t_max]. Standard
/// errors use the delta method with the full sample covariance of the means,
/// since all times come from the same replicates.
inline growth_rate_estimate estimate_growth_rate(
    const graph_spec& spec, const model_params& p, std::uint64_t t_min, std::uint64_t t_max,
    std::uint64_t n, std::uint64_t seed, unsigned workers = 0,
    const std::vector<std::pair<std::uint64_t, std::uint64_t>>& pairs = {{5, 5}, {5, 10}}) {
  p.validate();
  if (t_max <= t_min) throw invalid_parameter("need t_min < t_max");
  if (n < 2) throw invalid_parameter("need at least two replicates");
  std::uint64_t horizon = t_max;
  for (auto [t, s] : pairs) horizon = std::max(horizon, t + s);
  const std::size_t L = horizon + 1;

  auto runs = parallel_replicates(n, workers, [&](std::uint64_t i) {
    const auto rs = replicate_seed(seed, "growth", i);
    std::vector<double> pop(L, 0.0);
    with_topology(spec, p, rs, [&](auto& topo) {
      evolve_from_origin(spec, topo, p, horizon, rs, [&](std::uint64_t t, const auto& s) {
        pop[t] = static_cast<double>(population(s));
        return s.empty();
      });
      return 0;
    });
    return pop;
  });

  std::vector<double> mean(L, 0.0);
  for (const auto& r : runs)
    for (std::size_t t = 0; t < L; ++t) mean[t] += r[t];
  for (auto& x : mean) x /= static_cast<double>(n);
  std::vector<double> cov(L * L, 0.0);
  for (const auto& r : runs)
    for (std::size_t a = 0; a < L; ++a)
      for (std::size_t b = a; b < L; ++b) cov[a * L + b] += (r[a] - mean[a]) * (r[b] - mean[b]);
  for (std::size_t a = 0; a < L; ++a)
    for (std::size_t b = a; b < L; ++b) {
      cov[a * L + b] /= static_cast<double>(n - 1);
      cov[b * L + a] = cov[a * L + b];
    }
  const double nn = static_cast<double>(n);
  // Variance of sum_t g_t X_t-bar.
  auto quad = [&](const std::vector<double>& g) {
    double v = 0;
    for (std::size_t a = 0; a < L; ++a)
      for (std::size_t b = 0; b < L; ++b) v += g[a] * g[b] * cov[a * L + b];
    return v / nn;
  };

  growth_rate_estimate out;
  out.t_min = t_min;
  out.t_max = t_max;
  out.replicates = n;
  out.seed = seed;
  for (std::size_t t = 0; t < L; ++t) {
    const double lm = mean[t] > 0 ? std::log(mean[t]) : -std::numeric_limits<double>::infinity();
    const double se = mean[t] > 0 ? std::sqrt(cov[t * L + t] / nn) / mean[t] : 0.0;
    out.log_means.push_back({t, mean[t], lm, se});
  }

  bool zero = false;
  for (auto t = t_min; t <= t_max; ++t) zero |= !(mean[t] > 0);
  if (zero) {
    out.deep_subcritical = true;
    out.c2_hat = -std::numeric_limits<double>::infinity();
  } else {
    std::vector<double> xs, ys;
    for (auto t = t_min; t <= t_max; ++t) {
      xs.push_back(static_cast<double>(t));
      ys.push_back(std::log(mean[t]));
    }
    const auto fit = least_squares(xs, ys);
    out.c2_hat = fit.slope;
    out.intercept = fit.intercept;
    double tbar = 0, sxx = 0;
    for (double x : xs) tbar += x;
    tbar /= static_cast<double>(xs.size());
    for (double x : xs) sxx += (x - tbar) * (x - tbar);
    std::vector<double> g(L, 0.0);
    for (auto t = t_min; t <= t_max; ++t)
      g[t] = (static_cast<double>(t) - tbar) / sxx / mean[t];
    out.slope_stderr = std::sqrt(quad(g));
  }

  for (auto [t, s] : pairs) {
    multiplicativity_residual r{t, s, 0, 0};
    if (mean[t] > 0 && mean[s] > 0 && mean[t + s] > 0) {
      r.residual = std::log(mean[t + s]) - std::log(mean[t]) - std::log(mean[s]);
      std::vector<double> g(L, 0.0);
      g[t + s] += 1.0 / mean[t + s];
      g[t] -= 1.0 / mean[t];
      g[s] -= 1.0 / mean[s];
      r.stderr_ = std::sqrt(quad(g));
    } else if (mean[t] > 0 && mean[s] > 0) {
      r.residual = -std::numeric_limits<double>::infinity();
    } else {
      r.residual = std::numeric_limits<double>::quiet_NaN();
    }
    out.residuals.push_back(r);
  }
  return out;
}

}  // namespace swcp

#endif  // SWCP_ESTIMATORS_HPP_
