#ifndef SWCP_COUPLING_HPP_
#define SWCP_COUPLING_HPP_

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "swcp/dynamics.hpp"
#include "swcp/lazy_tree.hpp"
#include "swcp/small_world.hpp"

namespace swcp {

/// Small-world contact process driven through the covering map of the big
/// world. Every infected site x carries a lift in the big world; x uses the
/// trial stream of its lift, and the targets of x are the images of the
/// lift's targets. Each site's stream is fresh at every step, so the law of
/// the small-world process is unchanged, while run on the same seed as a
/// big-world process its infected set stays inside the image of the
/// big-world infected set. On a large torus the two coincide until the
/// infection first wraps around.
class covered_process {
 public:
  covered_process(const small_world_graph& g, const model_params& p)
      : g_(&g), p_(p), tree_(tree_topology::big_world(p)) {
    p_.validate();
    if (p_.gamma > 0.0) throw invalid_parameter("covered process has no gamma channel");
    if (g.range() != p.m || g.dim() != p.d) throw invalid_parameter("graph and parameters disagree");
  }

  using lifted_state = std::unordered_map<std::uint64_t, tree_vertex>;

  lifted_state start() {
    tree_.reset();
    return {{0, tree_.origin()}};
  }

  lifted_state step(const lifted_state& state, std::uint64_t seed, std::uint64_t t,
                    std::size_t cap = default_population_cap) {
    const double short_prob = p_.alpha / static_cast<double>(tree_.short_fanout());
    lifted_state next;
    next.reserve(state.size() * 2 + 1);
    std::vector<std::uint64_t> images;
    auto emit = [&](std::uint64_t y, const tree_vertex& ly) {
      auto [it, fresh] = next.try_emplace(y, ly);
      // Keep the lift with the smallest canonical key so the result does not
      // depend on iteration order.
      if (!fresh && tree_.rng_key(ly) < tree_.rng_key(it->second)) it->second = ly;
    };
    for (const auto& [x, lx] : state) {
      auto s = trial_stream(seed, t, tree_.rng_key(lx), 0);
      images.clear();
      g_->for_each_short(x, true, [&](std::uint64_t y) { images.push_back(y); });
      std::size_t k = 0;
      tree_.for_each_short(lx, [&](const tree_vertex& ly) {
        if (s.bernoulli(short_prob)) emit(images[k], ly);
        ++k;
      });
      if (s.bernoulli(p_.beta)) {
        if (auto ly = tree_.long_partner(lx)) emit(g_->long_partner(x), *ly);
      }
      if (next.size() > cap) throw resource_error("infected set exceeds population cap");
    }
    return next;
  }

  const tree_topology& tree() const { return tree_; }

 private:
  const small_world_graph* g_;
  model_params p_;
  tree_topology tree_;
};

namespace detail {

template <class Stop>
stop_outcome run_covered(const small_world_graph& g, const model_params& p,
                         std::uint64_t horizon, std::uint64_t seed, Stop&& stop) {
  if (horizon < 1) throw invalid_parameter("horizon must be >= 1");
  covered_process proc(g, p);
  if (static_cast<double>(p.m) * static_cast<double>(horizon) >=
      static_cast<double>(proc.tree().packing().limit()))
    throw resource_error("horizon too long for packed lattice coordinates");
  auto s = proc.start();
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    s = proc.step(s, seed, t - 1);
    if (auto kind = stop(s)) return {*kind, t};
  }
  return {stop_kind::censored, horizon};
}

}  // namespace detail

/// Extinction time of the small world from the origin, on the coupled streams.
inline stop_outcome run_tau_covered(const small_world_graph& g, const model_params& p,
                                    std::uint64_t horizon, std::uint64_t seed) {
  return detail::run_covered(g, p, horizon, seed,
                             [](const auto& s) -> std::optional<stop_kind> {
                               if (s.empty()) return stop_kind::extinct;
                               return std::nullopt;
                             });
}

/// Return-or-extinction time of the small world, on the coupled streams.
inline stop_outcome run_sigma_covered(const small_world_graph& g, const model_params& p,
                                      std::uint64_t horizon, std::uint64_t seed) {
  return detail::run_covered(g, p, horizon, seed,
                             [](const auto& s) -> std::optional<stop_kind> {
                               if (s.empty()) return stop_kind::extinct;
                               if (s.count(0)) return stop_kind::returned;
                               return std::nullopt;
                             });
}

}  // namespace swcp

#endif  // SWCP_COUPLING_HPP_
