#ifndef SWCP_EXPERIMENTS_HPP_
#define SWCP_EXPERIMENTS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "swcp/chain.hpp"
#include "swcp/config.hpp"
#include "swcp/coupling.hpp"
#include "swcp/dynamics.hpp"
#include "swcp/estimators.hpp"
#include "swcp/parallel.hpp"
#include "swcp/stats.hpp"

#ifndef SWCP_VERSION
#define SWCP_VERSION "0.1.0"
#endif

namespace swcp {

using json = nlohmann::json;

inline constexpr const char* code_version = SWCP_VERSION;

// Fixed-format number for CSV output.
inline std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

struct run_options {
  unsigned workers = 0;
  std::filesystem::path out = "out";
  bool stamp = false;  // add a wall-clock timestamp to the manifest
};

/// Output directory of one command. The manifest (config, config hash, code
/// version, seed rule, planned outputs) is written on construction, before
/// any computation; only listed files may be opened afterwards.
class run_output {
 public:
  run_output(const run_options& opts, const std::string& command, const config& cfg,
             std::vector<std::string> files)
      : dir_(opts.out), files_(files.begin(), files.end()) {
    std::filesystem::create_directories(dir_);
    json m;
    m["command"] = command;
    m["code_version"] = code_version;
    m["config"] = json::object();
    for (const auto& [k, v] : cfg.values()) m["config"][k] = v;
    char hash[20];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(hash_string(command + "\n" + cfg.canonical())));
    config_hash_ = hash;
    m["config_hash"] = config_hash_;
    m["seed"] = cfg.get_uint("seed", 1);
    m["seed_rule"] =
        "replicate i of experiment E uses hash_combine(hash_combine(seed, fnv1a(E)), i)";
    files.push_back("manifest.json");
    m["outputs"] = files;
    if (opts.stamp) {
      const std::time_t now = std::time(nullptr);
      char ts[32];
      std::strftime(ts, sizeof ts, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
      m["timestamp"] = ts;
    }
    std::ofstream(dir_ / "manifest.json") << m.dump(2) << '\n';
  }

  const std::string& config_hash() const { return config_hash_; }
  std::filesystem::path dir() const { return dir_; }

  std::ofstream open(const std::string& name) const {
    if (!files_.count(name)) throw std::logic_error("output not listed in manifest: " + name);
    std::ofstream os(dir_ / name);
    if (!os) throw resource_error("cannot write " + (dir_ / name).string());
    return os;
  }

  void write_json(const std::string& name, json j) const {
    j["config_hash"] = config_hash_;
    open(name) << j.dump(2) << '\n';
  }

 private:
  std::filesystem::path dir_;
  std::set<std::string> files_;
  std::string config_hash_;
};

/// Model parameters from either (alpha, beta) or (lambda, r).
inline model_params params_from(const config& cfg) {
  model_params p;
  const int m = static_cast<int>(cfg.get_int("m", 1));
  const int d = static_cast<int>(cfg.get_int("d", 1));
  const double gamma = cfg.get_double("gamma", 0.0);
  if (cfg.has("lambda")) {
    p = model_params::from_lambda(cfg.get_double("lambda", 1.0), cfg.get_double("r", 2.0), m, d,
                                  gamma);
  } else {
    p.alpha = cfg.get_double("alpha", 0.0);
    p.beta = cfg.get_double("beta", 0.0);
    p.gamma = gamma;
    p.m = m;
    p.d = d;
  }
  if (cfg.get_bool("allow_degenerate", false)) p.require_ordering = false;
  p.validate();
  return p;
}

inline json params_json(const model_params& p) {
  return {{"alpha", p.alpha}, {"beta", p.beta}, {"gamma", p.gamma}, {"m", p.m}, {"d", p.d}};
}

/// Estimator record: {operation, params, horizon, replicates, censored, value,
/// stderr, ci, seed}.
inline json estimate_json(const std::string& operation, const model_params& p,
                          const graph_spec& spec, std::uint64_t horizon, const estimate& e) {
  json params = params_json(p);
  if (spec.family == graph_family::small_world) params["R"] = spec.R;
  if (spec.family == graph_family::km) params["M"] = spec.M;
  return {{"operation", operation},
          {"params", params},
          {"horizon", horizon},
          {"replicates", e.replicates},
          {"censored", e.censored},
          {"value", e.value},
          {"stderr", e.stderr_},
          {"ci", {e.ci_low, e.ci_high}},
          {"seed", e.seed}};
}

// ---------------------------------------------------------------------------
// critical-values

inline json cmd_critical_values(const config& cfg, const run_options& opts) {
  const auto rs = cfg.get_doubles("r", {0.5, 1, 2, 4, 10});
  const auto Ms = cfg.get_doubles("M", {1e2, 1e3, 1e4, 1e5, 1e6});
  run_output out(opts, "critical-values", cfg,
                 {"critical_values.csv", "strong_boundary.csv", "summary.json"});

  auto csv = out.open("critical_values.csv");
  csv << "r,M,comb_closed_form,quadratic_root,km_lower_bound,gap_to_limit,status\n";
  json rows = json::array();
  json monotone = json::object();
  for (double r : rs) {
    double closed = 0, quad = 0;
    std::string status = "ok";
    try {
      closed = comb_brw_critical(r);
      quad = comb_quadratic_root(r);
    } catch (const std::exception& e) {
      csv << num(r) << ",,,,,," << e.what() << '\n';
      rows.push_back({{"r", r}, {"error", e.what()}});
      continue;
    }
    if (Ms.empty()) {
      csv << num(r) << ",," << num(closed) << ',' << num(quad) << ",,,ok\n";
      rows.push_back({{"r", r}, {"comb_closed_form", closed}, {"quadratic_root", quad}});
      continue;
    }
    bool mono = true;
    double prev_gap = std::numeric_limits<double>::infinity();
    for (double M : Ms) {
      json row{{"r", r}, {"M", M}, {"comb_closed_form", closed}, {"quadratic_root", quad}};
      try {
        const double bound = lambda2_brw_lower_bound(r, M);
        const double gap = std::abs(closed - bound);
        mono = mono && gap < prev_gap;
        prev_gap = gap;
        csv << num(r) << ',' << num(M) << ',' << num(closed) << ',' << num(quad) << ','
            << num(bound) << ',' << num(gap) << ",ok\n";
        row["km_lower_bound"] = bound;
        row["gap_to_limit"] = gap;
      } catch (const std::exception& e) {
        mono = false;
        csv << num(r) << ',' << num(M) << ',' << num(closed) << ',' << num(quad) << ",,,"
            << e.what() << '\n';
        row["error"] = e.what();
      }
      rows.push_back(row);
    }
    monotone[num(r)] = mono;
  }

  auto boundary = out.open("strong_boundary.csv");
  boundary << "beta,alpha,lambda,r\n";
  for (int i = 1; i < 100; ++i) {
    const double beta = i / 100.0;
    const double alpha = 1.0 - beta * beta;
    boundary << num(beta) << ',' << num(alpha) << ',' << num(alpha + beta) << ','
             << num(alpha / beta) << '\n';
  }

  json summary{{"command", "critical-values"}, {"rows", rows}, {"monotone_toward_limit", monotone}};
  out.write_json("summary.json", summary);
  return summary;
}

// ---------------------------------------------------------------------------
// phase-gap

inline void write_trace(std::ofstream& os, const bisection_result& res) {
  os << "iteration,lambda,estimate,ci_low,ci_high,decision\n";
  for (const auto& s : res.trace)
    os << s.iteration << ',' << num(s.lambda) << ',' << num(s.est.value) << ','
       << num(s.est.ci_low) << ',' << num(s.est.ci_high) << ',' << s.decision << '\n';
}

inline json bisection_json(const bisection_result& res) {
  json trace = json::array();
  for (const auto& s : res.trace)
    trace.push_back({{"lambda", s.lambda},
                     {"estimate", s.est.value},
                     {"ci", {s.est.ci_low, s.est.ci_high}},
                     {"replicates", s.est.replicates},
                     {"censored", s.est.censored},
                     {"decision", s.decision}});
  return {{"interval", {res.lambda_low, res.lambda_high}},
          {"resolved", res.resolved},
          {"trace", trace}};
}

inline json cmd_phase_gap(const config& cfg, const run_options& opts) {
  bisection_config base;
  base.ratio = cfg.get_double("r", 2.0);
  base.m = static_cast<int>(cfg.get_int("m", 10));
  base.d = static_cast<int>(cfg.get_int("d", 1));
  base.T = cfg.get_uint("T", 300);
  base.window = cfg.get_uint("window", base.T / 5);
  base.replicates = cfg.get_uint("replicates", 4000);
  base.max_replicates = cfg.get_uint("max_replicates", 4 * base.replicates);
  base.tolerance = cfg.get_double("tolerance", 0.02);
  base.lambda_low = cfg.get_double("bracket_low", 0.8);
  base.lambda_high = cfg.get_double("bracket_high", 1.6);
  base.alive_cap = cfg.get_uint("alive_cap", 2000);
  base.saturation_cap = cfg.get_uint("saturation_cap", 2000);
  base.seed = cfg.get_uint("seed", 1);
  base.workers = opts.workers;
  graph_spec spec;
  spec.family = parse_graph_family(cfg.get_string("family", "big_world"));
  spec.R = cfg.get_int("R", 0);
  spec.population_cap = cfg.get_uint("population_cap", default_population_cap);

  run_output out(opts, "phase-gap", cfg,
                 {"survival_trace.csv", "return_trace.csv", "summary.json"});
  json summary{{"command", "phase-gap"},
               {"r", base.ratio},
               {"m", base.m},
               {"d", base.d},
               {"T", base.T},
               {"window", base.window},
               {"replicates", base.replicates},
               {"weak_boundary_lambda", 1.0},
               {"strong_boundary_lambda", comb_quadratic_root(base.ratio)}};

  auto run = [&](classifier_kind kind, double threshold, graph_spec s, const std::string& file,
                 const std::string& key) -> std::optional<bisection_result> {
    auto c = base;
    c.classifier = kind;
    c.threshold = threshold;
    auto os = out.open(file);
    try {
      auto res = bisect_critical(s, c);
      write_trace(os, res);
      summary[key] = bisection_json(res);
      summary[key]["threshold"] = threshold;
      return res;
    } catch (const domain_error& e) {
      os << "iteration,lambda,estimate,ci_low,ci_high,decision\n";
      summary[key] = {{"error", e.what()}};
      return std::nullopt;
    }
  };

  auto survival_spec = spec;
  const auto weak = run(classifier_kind::survival, cfg.get_double("threshold_survival", 0.02),
                        survival_spec, "survival_trace.csv", "lambda1");
  auto return_spec = spec;
  if (spec.family != graph_family::small_world) {
    const auto cap = cfg.get_int("return_depth_cap", 3);
    if (cap >= 0) return_spec.depth_cap = static_cast<std::uint32_t>(cap);
  }
  summary["return_depth_cap"] =
      return_spec.depth_cap ? json(*return_spec.depth_cap) : json(nullptr);
  const auto strong = run(classifier_kind::return_to_origin,
                          cfg.get_double("threshold_return", 0.02), return_spec,
                          "return_trace.csv", "lambda2");

  if (weak && strong) {
    const bool disjoint = weak->lambda_high < strong->lambda_low;
    summary["disjoint"] = disjoint;
    summary["gap"] = {strong->lambda_low - weak->lambda_high,
                      strong->lambda_high - weak->lambda_low};
    summary["status"] = disjoint ? "gap resolved" : "gap not resolved at this budget";
  } else {
    summary["disjoint"] = false;
    summary["status"] = "gap not resolved at this budget";
  }
  out.write_json("summary.json", summary);
  return summary;
}

// ---------------------------------------------------------------------------
// tau-convergence

struct cdf_comparison {
  double sup_distance = 0;
  bool dominated = true;   // CDF_S(t) >= CDF_B(t) - 3 SE for all t
  double worst_margin = 0;  // min_t (CDF_S - CDF_B + 3 SE)
};

inline cdf_comparison compare_cdfs(const std::vector<double>& small, std::uint64_t n_small,
                                   const std::vector<double>& big, std::uint64_t n_big) {
  cdf_comparison c;
  c.sup_distance = sup_distance(small, big);
  c.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < std::min(small.size(), big.size()); ++t) {
    const double se = std::sqrt(small[t] * (1 - small[t]) / static_cast<double>(n_small) +
                                big[t] * (1 - big[t]) / static_cast<double>(n_big));
    const double margin = small[t] - big[t] + 3.0 * se;
    c.worst_margin = std::min(c.worst_margin, margin);
    if (margin < 0) c.dominated = false;
  }
  return c;
}

inline json cmd_tau_convergence(const config& cfg, const run_options& opts) {
  const auto p = params_from(cfg);
  const auto Rs = cfg.get_ints("R", {8, 4096});
  const auto T = cfg.get_uint("T", 50);
  const auto n = cfg.get_uint("replicates", 10000);
  const auto seed = cfg.get_uint("seed", 1);
  const auto coupling = cfg.get_string("coupling", "covering");
  if (coupling != "covering" && coupling != "independent")
    throw invalid_parameter("coupling must be covering or independent");
  const bool coupled = coupling == "covering";
  for (auto R : Rs) small_world_graph::check_shape(R, p.m, p.d);

  std::vector<std::string> graphs{"big_world"};
  for (auto R : Rs) graphs.push_back("R" + std::to_string(R));
  std::vector<std::string> files{"cdf.csv", "summary.json"};
  for (const char* stat : {"tau", "sigma"})
    for (const auto& g : graphs) files.push_back(std::string("outcomes_") + stat + "_" + g + ".csv");
  run_output out(opts, "tau-convergence", cfg, files);

  auto cdf_csv = out.open("cdf.csv");
  cdf_csv << "statistic,graph,t,cdf,stderr\n";
  json summary{{"command", "tau-convergence"}, {"params", params_json(p)}, {"T", T},
               {"replicates", n}, {"coupling", coupling}};

  for (const std::string stat : {"tau", "sigma"}) {
    std::vector<std::vector<double>> cdfs;
    json per_graph = json::object();
    for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
      graph_spec spec;
      if (gi == 0) {
        spec.family = graph_family::big_world;
      } else {
        spec.family = graph_family::small_world;
        spec.R = Rs[gi - 1];
      }
      const std::string exp_id = coupled ? stat : stat + "/" + graphs[gi];
      auto outcomes = parallel_replicates(n, opts.workers, [&](std::uint64_t i) {
        const auto rs = replicate_seed(seed, exp_id, i);
        if (coupled && gi > 0) {
          const auto g = make_small_world(spec.R, p.m, p.d, hash_combine(rs, 0x6a09e667ULL));
          return stat == "tau" ? run_tau_covered(g, p, T, rs) : run_sigma_covered(g, p, T, rs);
        }
        return with_topology(spec, p, rs, [&](auto& topo) {
          using V = typename std::decay_t<decltype(topo)>::vertex;
          if (stat == "tau") return run_tau(infection_state<V>{topo.origin()}, topo, p, T, rs);
          return run_sigma(topo, p, T, rs);
        });
      });
      auto os = out.open("outcomes_" + stat + "_" + graphs[gi] + ".csv");
      os << "replicate,seed,kind,time\n";
      std::vector<std::uint64_t> times;
      std::uint64_t censored = 0, returned = 0;
      for (std::uint64_t i = 0; i < n; ++i) {
        const auto& o = outcomes[i];
        os << i << ',' << replicate_seed(seed, exp_id, i) << ',' << to_string(o.kind) << ','
           << o.time << '\n';
        censored += o.kind == stop_kind::censored;
        returned += o.kind == stop_kind::returned;
        times.push_back(o.kind == stop_kind::censored ? T + 1 : o.time);
      }
      auto cdf = ecdf(times, T);
      for (std::uint64_t t = 0; t <= T; ++t)
        cdf_csv << stat << ',' << graphs[gi] << ',' << t << ',' << num(cdf[t]) << ','
                << num(std::sqrt(cdf[t] * (1 - cdf[t]) / static_cast<double>(n))) << '\n';
      per_graph[graphs[gi]] = {{"censored", censored}, {"returned", returned}};
      cdfs.push_back(std::move(cdf));
    }
    json comparisons = json::object();
    std::vector<double> distances;
    for (std::size_t gi = 1; gi < graphs.size(); ++gi) {
      const auto c = compare_cdfs(cdfs[gi], n, cdfs[0], n);
      distances.push_back(c.sup_distance);
      per_graph[graphs[gi]]["sup_distance"] = c.sup_distance;
      per_graph[graphs[gi]]["dominated"] = c.dominated;
      per_graph[graphs[gi]]["worst_margin"] = c.worst_margin;
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < distances.size(); ++i) decreasing &= distances[i] < distances[i - 1];
    summary[stat] = {{"graphs", per_graph}, {"distance_decreasing_in_R", decreasing}};
  }
  out.write_json("summary.json", summary);
  return summary;
}

// ---------------------------------------------------------------------------
// metastability

struct survival_time_summary {
  std::int64_t R = 0;
  double median = 0, q1 = 0, q3 = 0;
  std::uint64_t censored = 0;
  bool median_censored = false;
  double log_median = 0, log_median_se = 0;
};

inline json cmd_metastability(const config& cfg, const run_options& opts) {
  const auto p = params_from(cfg);
  if (!(p.gamma > 0.0) && p.require_ordering) throw invalid_parameter("metastability needs gamma > 0");
  const auto Rs = cfg.get_ints("R", {16, 32, 64});
  const auto cap = cfg.get_uint("horizon", 1'000'000);
  const auto n = cfg.get_uint("replicates", 200);
  const auto seed = cfg.get_uint("seed", 1);
  const double control_lambda = cfg.get_double("control_lambda", 0.5);
  for (auto R : Rs) small_world_graph::check_shape(R, p.m, p.d);

  run_output out(opts, "metastability", cfg, {"survival_times.csv", "summary.json"});
  auto csv = out.open("survival_times.csv");
  csv << "regime,R,replicate,seed,time,censored\n";

  auto run_regime = [&](const std::string& regime, const model_params& q) {
    std::vector<survival_time_summary> rows;
    for (auto R : Rs) {
      const std::string exp_id = "metastability/" + regime + "/R" + std::to_string(R);
      auto outcomes = parallel_replicates(n, opts.workers, [&](std::uint64_t i) {
        const auto rs = replicate_seed(seed, exp_id, i);
        const auto g = make_small_world(R, q.m, q.d, hash_combine(rs, 0x6a09e667ULL));
        return run_all_ones(g, q, cap, rs, cap).outcome;
      });
      std::vector<double> times;
      survival_time_summary s;
      s.R = R;
      for (std::uint64_t i = 0; i < n; ++i) {
        const auto& o = outcomes[i];
        const bool censored = o.kind == stop_kind::censored;
        s.censored += censored;
        times.push_back(static_cast<double>(o.time));
        csv << regime << ',' << R << ',' << i << ',' << replicate_seed(seed, exp_id, i) << ','
            << o.time << ',' << (censored ? 1 : 0) << '\n';
      }
      s.median = quantile(times, 0.5);
      s.q1 = quantile(times, 0.25);
      s.q3 = quantile(times, 0.75);
      s.median_censored = 2 * s.censored >= n;
      s.log_median = std::log(s.median);
      s.log_median_se = bootstrap_log_median_se(times, replicate_seed(seed, exp_id, n));
      rows.push_back(s);
    }
    json jr = json::array();
    std::vector<double> xs, ys, ws;
    bool increasing = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& s = rows[i];
      jr.push_back({{"R", s.R},
                    {"median", s.median},
                    {"q1", s.q1},
                    {"q3", s.q3},
                    {"censored", s.censored},
                    {"median_at_cap", s.median_censored},
                    {"log_median", s.log_median},
                    {"log_median_se", s.log_median_se}});
      if (i > 0) increasing &= s.median > rows[i - 1].median || (s.median_censored && rows[i - 1].median < s.median);
      if (s.median_censored) continue;
      xs.push_back(std::pow(static_cast<double>(s.R), q.d));
      ys.push_back(s.log_median);
      // Floor the bootstrap error so a degenerate resample cannot dominate.
      const double se = std::max(s.log_median_se, 1e-3);
      ws.push_back(1.0 / (se * se));
    }
    json j{{"params", params_json(q)}, {"lambda", q.lambda()}, {"rows", jr},
           {"log_median_strictly_increasing", increasing},
           {"median_ratio", rows.back().median / rows.front().median}};
    if (xs.size() >= 2) {
      const auto fit = least_squares(xs, ys, ws);
      j["fit"] = {{"slope", fit.slope},
                  {"slope_stderr", fit.slope_stderr},
                  {"t_statistic", finite_or_null(fit.t_statistic())},
                  {"intercept", fit.intercept},
                  {"r_squared", fit.r_squared},
                  {"points", xs.size()}};
    } else {
      j["fit"] = nullptr;
    }
    return j;
  };

  json summary{{"command", "metastability"}, {"horizon", cap}, {"replicates", n}};
  summary["supercritical"] = run_regime("supercritical", p);
  if (cfg.has("lambda1_upper")) {
    const double l1 = cfg.get_double("lambda1_upper", 0.0);
    summary["lambda1_upper"] = l1;
    summary["certified_supercritical"] = p.lambda() > l1;
  }
  if (control_lambda > 0) {
    auto q = model_params::from_lambda(control_lambda, p.ratio(), p.m, p.d, p.gamma);
    q.require_ordering = p.require_ordering;
    q.validate();
    summary["control"] = run_regime("control", q);
  }
  out.write_json("summary.json", summary);
  return summary;
}

// ---------------------------------------------------------------------------
// growth-rate

inline json cmd_growth_rate(const config& cfg, const run_options& opts) {
  const auto lambdas = cfg.get_doubles("lambdas", {0.6, 0.8, 1.6, 1.8, 2.0});
  const double r = cfg.get_double("r", 2.0);
  const int m = static_cast<int>(cfg.get_int("m", 5));
  const int d = static_cast<int>(cfg.get_int("d", 1));
  const auto t_min = cfg.get_uint("t_min", 1);
  const auto t_max = cfg.get_uint("t_max", 10);
  const auto seed = cfg.get_uint("seed", 1);
  // Scalar or one entry per lambda.
  auto per_lambda = [&](const std::string& key, std::int64_t fallback) {
    auto v = cfg.get_ints(key, {fallback});
    if (v.size() == 1) v.assign(lambdas.size(), v[0]);
    if (v.size() != lambdas.size())
      throw invalid_parameter(key + " needs one entry or one per lambda");
    for (auto x : v)
      if (x < 2) throw invalid_parameter(key + " must be >= 2");
    return v;
  };
  const auto ns = per_lambda("replicates", 10000);
  const auto ns_brw = per_lambda("brw_replicates", 2000);

  run_output out(opts, "growth-rate", cfg,
                 {"growth_rate.csv", "log_means.csv", "residuals.csv", "summary.json"});
  auto csv = out.open("growth_rate.csv");
  csv << "lambda,c2_hat,stderr,z,brw_c2_hat,brw_stderr,log_lambda\n";
  auto means_csv = out.open("log_means.csv");
  means_csv << "lambda,dynamics,t,mean,log_mean,stderr\n";
  auto res_csv = out.open("residuals.csv");
  res_csv << "lambda,t,s,residual,stderr\n";

  json rows = json::array();
  double last_negative = -1, first_positive = -1;
  bool brw_consistent = true;
  for (std::size_t li = 0; li < lambdas.size(); ++li) {
    const double lambda = lambdas[li];
    const auto n = static_cast<std::uint64_t>(ns[li]);
    const auto n_brw = static_cast<std::uint64_t>(ns_brw[li]);
    const auto p = model_params::from_lambda(lambda, r, m, d);
    p.validate();
    graph_spec cp_spec;
    const auto cp = estimate_growth_rate(cp_spec, p, t_min, t_max, n,
                                         hash_combine(seed, hash_string("cp/" + num(lambda))),
                                         opts.workers);
    graph_spec brw_spec;
    brw_spec.dynamics = dynamics_kind::branching;
    const auto brw = estimate_growth_rate(brw_spec, p, t_min, t_max, n_brw,
                                          hash_combine(seed, hash_string("brw/" + num(lambda))),
                                          opts.workers, {});
    csv << num(lambda) << ',' << num(cp.c2_hat) << ',' << num(cp.slope_stderr) << ','
        << num(cp.z()) << ',' << num(brw.c2_hat) << ',' << num(brw.slope_stderr) << ','
        << num(std::log(lambda)) << '\n';
    for (const auto* g : {&cp, &brw})
      for (const auto& pt : g->log_means)
        means_csv << num(lambda) << ',' << (g == &cp ? "contact" : "branching") << ',' << pt.t
                  << ',' << num(pt.mean) << ',' << num(pt.log_mean) << ','
                  << num(pt.log_mean_stderr) << '\n';
    json residuals = json::array();
    for (const auto& rr : cp.residuals) {
      res_csv << num(lambda) << ',' << rr.t << ',' << rr.s << ',' << num(rr.residual) << ','
              << num(rr.stderr_) << '\n';
      residuals.push_back({{"t", rr.t}, {"s", rr.s}, {"residual", finite_or_null(rr.residual)},
                           {"stderr", rr.stderr_}});
    }
    const double z = cp.deep_subcritical ? -std::numeric_limits<double>::infinity() : cp.z();
    if (z < -3) last_negative = std::max(last_negative, lambda);
    if (z > 3 && (first_positive < 0 || lambda < first_positive)) first_positive = lambda;
    const bool brw_ok = std::abs(brw.c2_hat - std::log(lambda)) <= 3.0 * brw.slope_stderr;
    brw_consistent = brw_consistent && brw_ok;
    rows.push_back({{"lambda", lambda},
                    {"replicates", n},
                    {"brw_within_3se_of_log_lambda", brw_ok},
                    {"c2_hat", finite_or_null(cp.c2_hat)},
                    {"stderr", cp.slope_stderr},
                    {"z", finite_or_null(z)},
                    {"deep_subcritical", cp.deep_subcritical},
                    {"brw_c2_hat", finite_or_null(brw.c2_hat)},
                    {"brw_stderr", brw.slope_stderr},
                    {"log_lambda", std::log(lambda)},
                    {"residuals", residuals}});
  }
  json summary{{"command", "growth-rate"}, {"r", r}, {"m", m}, {"d", d},
               {"t_range", {t_min, t_max}}, {"rows", rows},
               {"brw_control_consistent", brw_consistent}};
  if (last_negative > 0 && first_positive > 0 && last_negative < first_positive) {
    summary["sign_change"] = {last_negative, first_positive};
    if (cfg.has("lambda1_low") && cfg.has("lambda1_high")) {
      const double lo = cfg.get_double("lambda1_low", 0), hi = cfg.get_double("lambda1_high", 0);
      summary["consistent_with_phase_gap"] = !(hi < last_negative || lo > first_positive);
    }
  } else {
    summary["sign_change"] = nullptr;
  }
  out.write_json("summary.json", summary);
  return summary;
}

// ---------------------------------------------------------------------------
// simulate

inline json cmd_simulate(const config& cfg, const run_options& opts) {
  const auto p = params_from(cfg);
  graph_spec spec;
  spec.family = parse_graph_family(cfg.get_string("family", "big_world"));
  spec.dynamics =
      cfg.get_string("dynamics", "contact") == "branching" ? dynamics_kind::branching
                                                           : dynamics_kind::contact;
  spec.R = cfg.get_int("R", 64);
  spec.M = cfg.get_uint("M", p.ball());
  if (cfg.has("graph_seed")) spec.graph_seed = cfg.get_uint("graph_seed", 0);
  spec.population_cap = cfg.get_uint("population_cap", default_population_cap);
  const auto horizon = cfg.get_uint("horizon", 100);
  const auto n = cfg.get_uint("replicates", 1);
  const auto seed = cfg.get_uint("seed", 1);
  const bool all = cfg.get_string("start", "origin") == "all";
  if (horizon < 1) throw invalid_parameter("horizon must be >= 1");
  if (all && spec.family != graph_family::small_world)
    throw invalid_parameter("start = all needs the small world");

  std::vector<std::string> files{"trajectory.csv", "outcomes.csv", "summary.json"};
  const bool save_graph = spec.family == graph_family::small_world && spec.graph_seed &&
                          cfg.get_bool("save_graph", false);
  if (save_graph) files.push_back("graph.txt");
  run_output out(opts, "simulate", cfg, files);

  struct rep_result {
    stop_outcome outcome;
    std::vector<trajectory_point> traj;
  };
  auto results = parallel_replicates(n, opts.workers, [&](std::uint64_t i) {
    const auto rs = replicate_seed(seed, "simulate", i);
    return with_topology(spec, p, rs, [&](auto& topo) {
      using Topo = std::decay_t<decltype(topo)>;
      using V = typename Topo::vertex;
      rep_result res{{stop_kind::censored, horizon}, {}};
      auto observer = [&](std::uint64_t t, const auto& s) {
        if (i == 0) res.traj.push_back({t, population(s), contains(s, topo.origin())});
        if (s.empty()) {
          res.outcome = {stop_kind::extinct, t};
          return true;
        }
        return false;
      };
      if (spec.dynamics == dynamics_kind::contact) {
        infection_state<V> start{topo.origin()};
        if constexpr (Topo::finite) {
          if (all)
            for (std::uint64_t v = 0; v < topo.vertex_count(); ++v) start.insert(v);
        }
        evolve(std::move(start), topo, p, horizon, rs, observer, spec.population_cap);
      } else {
        brw_state<V> start{{topo.origin(), 1}};
        if constexpr (Topo::finite) {
          if (all)
            for (std::uint64_t v = 0; v < topo.vertex_count(); ++v) start[v] = 1;
        }
        evolve(std::move(start), topo, p, horizon, rs, observer, spec.population_cap);
      }
      return res;
    });
  });

  auto traj = out.open("trajectory.csv");
  write_trajectory_csv(traj, results.empty() ? std::vector<trajectory_point>{} : results[0].traj);
  auto oc = out.open("outcomes.csv");
  oc << "replicate,seed,kind,time\n";
  std::uint64_t extinct = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    oc << i << ',' << replicate_seed(seed, "simulate", i) << ','
       << to_string(results[i].outcome.kind) << ',' << results[i].outcome.time << '\n';
    extinct += results[i].outcome.kind == stop_kind::extinct;
  }
  if (save_graph) {
    auto gs = out.open("graph.txt");
    write_small_world(gs, make_small_world(spec.R, p.m, p.d, *spec.graph_seed));
  }
  json summary{{"command", "simulate"},
               {"family", to_string(spec.family)},
               {"dynamics", to_string(spec.dynamics)},
               {"params", params_json(p)},
               {"horizon", horizon},
               {"replicates", n},
               {"extinct", extinct}};
  out.write_json("summary.json", summary);
  return summary;
}

}  // namespace swcp

#endif  // SWCP_EXPERIMENTS_HPP_
