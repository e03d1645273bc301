#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "swcp/chain.hpp"
#include "swcp/experiments.hpp"

using namespace swcp;
namespace fs = std::filesystem;

namespace {

struct outcome {
  bool pass = false;
  std::string detail;
};

config preset(const std::string& name) { return config::load(std::string(SWCP_PRESETS) + "/" + name + ".conf"); }

std::string fmt(double x) { return num(x); }

outcome closed_form() {
  double worst = 0;
  for (double r : {0.5, 1.0, 2.0, 4.0, 10.0})
    worst = std::max(worst, std::abs(comb_brw_critical(r) - comb_quadratic_root(r)));
  const double s5 = std::sqrt(5.0) - 1.0;
  const double r1 = std::max(std::abs(comb_brw_critical(1.0) - s5), std::abs(comb_quadratic_root(1.0) - s5));
  return {worst < 1e-12 && r1 < 1e-12, "max |closed - root| = " + fmt(worst) + ", r=1 vs sqrt5-1: " + fmt(r1)};
}

outcome eigen_boundary() {
  int checked = 0, wrong = 0;
  for (int i = 1; i <= 100; ++i)
    for (int j = 1; j <= 100; ++j) {
      const double a = 2.0 * i / 100.0, b = j / 100.0;
      if (std::abs(a + b * b - 1.0) <= 1e-9) continue;
      ++checked;
      wrong += (level_matrix_eigenvalue(a, b) > 1.0) != (a + b * b > 1.0);
    }
  return {wrong == 0, std::to_string(checked) + " grid points, " + std::to_string(wrong) + " mismatches"};
}

outcome chain_limit() {
  bool ok = true;
  std::ostringstream os;
  for (double r : {1.0, 2.0, 4.0}) {
    const double limit = comb_brw_critical(r);
    double prev_gap = std::numeric_limits<double>::infinity();
    double prev = 0;
    for (double M : {1e3, 1e4, 1e5, 1e6}) {
      const double b = lambda2_brw_lower_bound(r, M);
      const double gap = std::abs(limit - b);
      ok = ok && gap < prev_gap && b > prev;
      prev_gap = gap;
      prev = b;
    }
    ok = ok && prev_gap < 1e-3;
    os << "r=" << r << " gap(1e6)=" << fmt(prev_gap) << ' ';
  }
  return {ok, os.str()};
}

outcome chain_oracle() {
  const double lambda = 1.05, r = 2.0, u = 1.0 / (1.0 + r);
  const std::uint64_t M = 27, n = 100000, kmax = 200;
  const double F = chain_F(lambda, u, static_cast<double>(M)).F;
  // Random walk on K_M: the long edge with probability u, otherwise a uniform
  // member of the current complete copy (itself included).
  struct chain_run {
    double weight = 0;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> moves;
  };
  auto runs = parallel_replicates(n, 0, [&](std::uint64_t i) {
    auto km = tree_topology::km(M);
    counter_stream s(replicate_seed(404, "km-walk", i));
    chain_run out;
    auto v = km.origin();
    std::uint64_t state = 0;
    std::vector<tree_vertex> members;
    for (std::uint64_t k = 1; k <= kmax; ++k) {
      if (s.bernoulli(u)) {
        v = *km.long_partner(v);
      } else {
        members.clear();
        km.for_each_short(v, [&](const tree_vertex& w) { members.push_back(w); });
        v = members[s.below(members.size())];
      }
      const auto next = km_phi(km.km(v));
      out.moves.push_back({state, next});
      state = next;
      if (state == 0) {
        out.weight = std::pow(lambda, static_cast<double>(k));
        break;
      }
    }
    return out;
  });
  running_stats acc;
  std::map<std::uint64_t, std::map<std::uint64_t, std::uint64_t>> counts;
  for (const auto& c : runs) {
    acc.add(c.weight);
    for (auto [a, b] : c.moves) ++counts[a][b];
  }
  const double z = (acc.mean() - F) / acc.stderr_mean();
  bool ok = std::abs(z) <= 3.0;
  int entries = 0, bad = 0;
  for (const auto& [j, row] : counts) {
    std::uint64_t visits = 0;
    for (const auto& [k, c] : row) visits += c;
    if (visits < 1000) continue;
    for (const auto& t : chain_kernel(j, u, static_cast<double>(M))) {
      const double freq = row.count(t.state) ? static_cast<double>(row.at(t.state)) / visits : 0.0;
      const double se = std::sqrt(t.probability * (1 - t.probability) / visits);
      ++entries;
      if (std::abs(freq - t.probability) > 3.0 * se) ++bad;
    }
    for (const auto& [k, c] : row) {
      bool known = false;
      for (const auto& t : chain_kernel(j, u, static_cast<double>(M))) known |= t.state == k;
      if (!known) ++bad;
    }
  }
  ok = ok && bad == 0 && entries > 0;
  return {ok, "MC F = " + fmt(acc.mean()) + " +- " + fmt(acc.stderr_mean()) + " vs chain_F = " + fmt(F) +
                  " (z = " + fmt(z) + "); kernel entries checked " + std::to_string(entries) +
                  ", outside 3 SE " + std::to_string(bad)};
}

outcome brw_mean_law() {
  bool ok = true;
  std::ostringstream os;
  std::uint64_t violations = 0;
  for (double lambda : {0.8, 1.2}) {
    const auto p = model_params::from_lambda(lambda, 2.0, 1, 1);
    struct rep {
      double brw = 0;
      std::uint64_t violations = 0;
    };
    auto runs = parallel_replicates(100000, 0, [&](std::uint64_t i) {
      const auto rs = replicate_seed(505, "brw-mean/" + num(lambda), i);
      auto tree = tree_topology::big_world(p);
      infection_state<tree_vertex> cp{tree.origin()};
      brw_state<tree_vertex> brw{{tree.origin(), 1}};
      rep out;
      for (std::uint64_t t = 0; t < 10; ++t) {
        cp = cp_step(cp, tree, p, rs, t);
        brw = brw_step(brw, tree, p, rs, t);
        if (population(cp) > population(brw)) ++out.violations;
        for (const auto& v : cp) out.violations += brw.count(v) == 0;
      }
      out.brw = static_cast<double>(population(brw));
      return out;
    });
    running_stats acc;
    for (const auto& r : runs) {
      acc.add(r.brw);
      violations += r.violations;
    }
    const double target = std::pow(lambda, 10);
    const double z = (acc.mean() - target) / acc.stderr_mean();
    ok = ok && std::abs(z) <= 3.0;
    os << "lambda=" << lambda << " mean " << fmt(acc.mean()) << " vs " << fmt(target) << " (z = " << fmt(z) << "); ";
  }
  os << "coupling violations " << violations;
  return {ok && violations == 0, os.str()};
}

json phase_gap_summary;

outcome phase_gap(const fs::path& out) {
  run_options opts;
  opts.out = out / "phase-gap";
  phase_gap_summary = cmd_phase_gap(preset("phase-gap"), opts);
  const auto& s = phase_gap_summary;
  if (!s.contains("lambda1") || !s.contains("lambda2") || !s["lambda1"].contains("interval") ||
      !s["lambda2"].contains("interval"))
    return {false, "bisection failed: " + s.dump()};
  const double l1lo = s["lambda1"]["interval"][0], l1hi = s["lambda1"]["interval"][1];
  const double l2lo = s["lambda2"]["interval"][0], l2hi = s["lambda2"]["interval"][1];
  const double boundary = s["strong_boundary_lambda"];
  const bool disjoint = l1hi < l2lo;
  const bool weak_ok = l1lo > 0.9 && l1hi < 1.2;
  const bool strong_ok = l2lo >= boundary - 0.1;
  return {disjoint && weak_ok && strong_ok,
          "lambda1 in [" + fmt(l1lo) + ", " + fmt(l1hi) + "], lambda2 in [" + fmt(l2lo) + ", " + fmt(l2hi) +
              "], strong boundary " + fmt(boundary)};
}

outcome tau_convergence(const fs::path& out) {
  run_options opts;
  opts.out = out / "tau-convergence";
  const auto s = cmd_tau_convergence(preset("tau-convergence"), opts);
  bool ok = true;
  std::ostringstream os;
  for (const char* stat : {"tau", "sigma"}) {
    const auto& g = s[stat]["graphs"];
    const double small = g["R8"]["sup_distance"], large = g["R4096"]["sup_distance"];
    const bool dom = g["R4096"]["dominated"].get<bool>() && g["R8"]["dominated"].get<bool>();
    ok = ok && large < small && dom;
    os << stat << ": d(R=8) " << fmt(small) << ", d(R=4096) " << fmt(large) << ", dominated " << (dom ? "yes" : "no")
       << "; ";
  }
  return {ok, os.str()};
}

outcome metastability(const fs::path& out) {
  run_options opts;
  opts.out = out / "metastability";
  auto cfg = preset("metastability");
  double l1_high = std::numeric_limits<double>::quiet_NaN();
  if (phase_gap_summary.contains("lambda1") && phase_gap_summary["lambda1"].contains("interval")) {
    l1_high = phase_gap_summary["lambda1"]["interval"][1];
    cfg.set("lambda1_upper", num(l1_high));
  }
  const auto s = cmd_metastability(cfg, opts);
  const auto& sup = s["supercritical"];
  const bool certified = s.value("certified_supercritical", false);
  const bool increasing = sup["log_median_strictly_increasing"];
  const bool fit_ok = !sup["fit"].is_null() && sup["fit"]["slope"].get<double>() > 0 &&
                      !sup["fit"]["t_statistic"].is_null() && sup["fit"]["t_statistic"].get<double>() > 3;
  const double control_ratio = s["control"]["median_ratio"];
  const bool control_flat = control_ratio <= 2.0;
  std::ostringstream os;
  os << "lambda " << sup["lambda"].get<double>() << " vs lambda1 upper " << fmt(l1_high) << "; medians";
  for (const auto& row : sup["rows"]) os << ' ' << row["median"].get<double>();
  os << "; slope t = " << (sup["fit"].is_null() ? std::string("n/a") : sup["fit"]["t_statistic"].dump())
     << "; control median ratio " << fmt(control_ratio);
  return {certified && increasing && fit_ok && control_flat, os.str()};
}

outcome growth_rate(const fs::path& out) {
  run_options opts;
  opts.out = out / "growth-rate";
  auto cfg = preset("growth-rate");
  const auto s = cmd_growth_rate(cfg, opts);
  bool ok = true;
  bool seen_low = false, seen_high = false;
  std::ostringstream os;
  for (const auto& row : s["rows"]) {
    const double lambda = row["lambda"];
    if (lambda != 0.6 && lambda != 1.8) continue;
    const double z = row["z"].is_null() ? -std::numeric_limits<double>::infinity() : row["z"].get<double>();
    if (lambda == 0.6) {
      seen_low = true;
      ok = ok && z < -3.0;
    } else {
      seen_high = true;
      ok = ok && z > 3.0;
    }
    os << "lambda=" << lambda << " z=" << fmt(z) << " residuals";
    for (const auto& r : row["residuals"]) {
      const double res = r["residual"].is_null() ? std::numeric_limits<double>::quiet_NaN() : r["residual"].get<double>();
      const double se = r["stderr"];
      ok = ok && res <= 3.0 * se;
      os << " (" << r["t"].get<int>() << ',' << r["s"].get<int>() << "): " << fmt(res) << " <= " << fmt(3 * se);
    }
    os << "; ";
  }
  return {ok && seen_low && seen_high, os.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool same_tree(const fs::path& a, const fs::path& b, std::string& why) {
  std::vector<std::string> na, nb;
  for (const auto& e : fs::directory_iterator(a)) na.push_back(e.path().filename());
  for (const auto& e : fs::directory_iterator(b)) nb.push_back(e.path().filename());
  std::sort(na.begin(), na.end());
  std::sort(nb.begin(), nb.end());
  if (na != nb) {
    why = "file lists differ in " + a.string();
    return false;
  }
  for (const auto& n : na)
    if (slurp(a / n) != slurp(b / n)) {
      why = "differs: " + (a / n).string();
      return false;
    }
  return true;
}

outcome reproducibility(const fs::path& out) {
  using cmd = std::function<json(const config&, const run_options&)>;
  struct job {
    std::string name;
    cmd fn;
    std::map<std::string, std::string> budget;
  };
  const std::vector<job> jobs{
      {"critical-values", cmd_critical_values, {}},
      {"phase-gap", cmd_phase_gap, {{"replicates", "200"}, {"max_replicates", "400"}, {"T", "100"}, {"window", "20"}, {"m", "5"}}},
      {"tau-convergence", cmd_tau_convergence, {{"replicates", "500"}}},
      {"metastability", cmd_metastability, {{"replicates", "10"}, {"R", "16, 32"}, {"horizon", "20000"}}},
      {"growth-rate", cmd_growth_rate, {{"replicates", "500"}, {"brw_replicates", "100"}, {"lambdas", "0.6, 1.8"}}},
      {"simulate", cmd_simulate, {}},
  };
  std::ostringstream os;
  bool ok = true;
  for (const auto& j : jobs) {
    auto cfg = preset(j.name);
    for (const auto& [k, v] : j.budget) cfg.set(k, v);
    fs::path dirs[3] = {out / "repro" / j.name / "a", out / "repro" / j.name / "b", out / "repro" / j.name / "c"};
    for (int i = 0; i < 3; ++i) {
      fs::remove_all(dirs[i]);
      run_options opts;
      opts.out = dirs[i];
      opts.workers = i == 2 ? 3 : 1;
      j.fn(cfg, opts);
    }
    std::string why;
    const bool same = same_tree(dirs[0], dirs[1], why) && same_tree(dirs[0], dirs[2], why);
    ok = ok && same;
    os << j.name << (same ? " identical; " : " DIFFERENT (" + why + "); ");
  }
  return {ok, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path out = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
  fs::create_directories(out);
  const std::vector<std::pair<std::string, std::function<outcome()>>> criteria{
      {"closed-form consistency", closed_form},
      {"eigenvalue boundary", eigen_boundary},
      {"K_M chain limit", chain_limit},
      {"chain oracle equivalence", chain_oracle},
      {"BRW mean law and CP domination", brw_mean_law},
      {"phase gap", [&] { return phase_gap(out); }},
      {"tau convergence", [&] { return tau_convergence(out); }},
      {"metastability trend", [&] { return metastability(out); }},
      {"growth rate signs", [&] { return growth_rate(out); }},
      {"reproducibility", [&] { return reproducibility(out); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first << "): "
              << o.detail << " [" << fmt(std::round(secs * 10) / 10) << " s]" << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
