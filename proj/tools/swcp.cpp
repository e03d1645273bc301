#include <exception>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "swcp/experiments.hpp"

namespace {

using command_fn = std::function<swcp::json(const swcp::config&, const swcp::run_options&)>;

const std::map<std::string, std::pair<command_fn, std::string>>& commands() {
  static const std::map<std::string, std::pair<command_fn, std::string>> table{
      {"critical-values", {swcp::cmd_critical_values, "Closed-form and chain critical values"}},
      {"phase-gap", {swcp::cmd_phase_gap, "Bisect the weak and strong survival thresholds"}},
      {"tau-convergence", {swcp::cmd_tau_convergence, "Compare extinction and return times"}},
      {"metastability", {swcp::cmd_metastability, "Survival time from full occupation"}},
      {"growth-rate", {swcp::cmd_growth_rate, "Exponential growth rate of the mean"}},
      {"simulate", {swcp::cmd_simulate, "Raw runs and a trajectory dump"}},
  };
  return table;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contact process and branching random walk experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  std::string out_dir;
  std::vector<std::string> overrides;
  bool stamp = false;

  for (const auto& [name, entry] : commands()) {
    auto* sub = app.add_subcommand(name, entry.second);
    sub->add_option("--config", config_path, "Key-value config file");
    sub->add_option("--seed", seed, "Master seed");
    sub->add_option("--workers", workers, "Worker threads (0 = hardware concurrency)");
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--set", overrides, "Override a config entry, key=value")->take_all();
    sub->add_flag("--stamp", stamp, "Record a timestamp in the manifest");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const auto* sub = app.get_subcommands().front();
  try {
    swcp::config cfg;
    if (!config_path.empty()) cfg = swcp::config::load(config_path);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0)
        throw swcp::invalid_parameter("--set expects key=value, got " + kv);
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (sub->count("--seed")) cfg.set("seed", std::to_string(seed));
    swcp::run_options opts;
    opts.workers = static_cast<unsigned>(cfg.get_uint("workers", 0));
    if (sub->count("--workers")) opts.workers = workers;
    opts.out = cfg.get_string("out", "out");
    if (sub->count("--out")) opts.out = out_dir;
    opts.stamp = stamp || cfg.get_bool("stamp", false);
    // Run-environment keys do not affect results and stay out of the manifest.
    cfg.erase("workers");
    cfg.erase("out");
    cfg.erase("stamp");

    const auto summary = commands().at(sub->get_name()).first(cfg, opts);
    std::cout << summary.dump(2) << '\n';
    return 0;
  } catch (const swcp::invalid_parameter& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return 2;
  } catch (const swcp::domain_error& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return 2;
  } catch (const swcp::resource_error& e) {
    std::cerr << "resource guard: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
