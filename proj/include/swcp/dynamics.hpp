#ifndef SWCP_DYNAMICS_HPP_
#define SWCP_DYNAMICS_HPP_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "swcp/lazy_tree.hpp"
#include "swcp/params.hpp"
#include "swcp/rng.hpp"
#include "swcp/small_world.hpp"

namespace swcp {

/// Adapts a small_world_graph to the engine's topology interface.
class small_world_topology {
 public:
  using vertex = std::uint64_t;
  static constexpr bool finite = true;

  explicit small_world_topology(const small_world_graph& g)
      : g_(&g), fanout_(ball_volume(g.range(), g.dim())) {}

  const small_world_graph& graph() const { return *g_; }
  vertex origin() const { return 0; }
  bool is_origin(vertex v) const { return v == 0; }
  std::uint64_t short_fanout() const { return fanout_; }
  std::uint64_t vertex_count() const { return g_->vertex_count(); }
  std::uint64_t rng_key(vertex v) const { return v; }
  bool admits(vertex) const { return true; }

  template <class F>
  void for_each_short(vertex v, F&& f) const {
    g_->for_each_short(v, true, std::forward<F>(f));
  }
  std::optional<vertex> long_partner(vertex v) const { return g_->long_partner(v); }

 private:
  const small_world_graph* g_;
  std::uint64_t fanout_;
};

struct u64_hash {
  std::size_t operator()(std::uint64_t v) const { return static_cast<std::size_t>(splitmix64(v)); }
};

template <class V>
struct vertex_hash;
template <>
struct vertex_hash<std::uint64_t> : u64_hash {};
template <>
struct vertex_hash<tree_vertex> : tree_vertex_hash {};

// Set of infected sites (contact process).
template <class V>
using infection_state = std::unordered_set<V, vertex_hash<V>>;

// Site -> particle count, all counts >= 1 (branching random walk).
template <class V>
using brw_state = std::unordered_map<V, std::uint64_t, vertex_hash<V>>;

inline constexpr std::size_t default_population_cap = 10'000'000;

namespace detail {

template <class Topology>
void check_channels(const Topology&, const model_params& p) {
  if constexpr (!Topology::finite) {
    if (p.gamma > 0.0)
      throw invalid_parameter("gamma > 0 needs a finite graph (uniform random neighbour)");
  }
}

/// Runs the trials of one source in canonical order: self and short-range
/// targets, then the long-range partner, then (finite graphs) the gamma
/// channel. emit(w) is called once per successful trial.
template <class Topology, class Emit>
void offspring(Topology& topo, const model_params& p, double short_prob, counter_stream& s,
               const typename Topology::vertex& v, Emit&& emit) {
  topo.for_each_short(v, [&](const typename Topology::vertex& w) {
    if (s.bernoulli(short_prob) && topo.admits(w)) emit(w);
  });
  if (s.bernoulli(p.beta)) {
    if (auto w = topo.long_partner(v)) emit(*w);
  }
  if constexpr (Topology::finite) {
    if (p.gamma > 0.0 && s.bernoulli(p.gamma)) emit(s.below(topo.vertex_count()));
  }
}

}  // namespace detail

/// One step of the discrete-time contact process. Each infected site runs its
/// independent Bernoulli trials; the successor is the union of all successes.
template <class Topology>
infection_state<typename Topology::vertex> cp_step(
    const infection_state<typename Topology::vertex>& state, Topology& topo,
    const model_params& p, std::uint64_t seed, std::uint64_t t,
    std::size_t cap = default_population_cap) {
  detail::check_channels(topo, p);
  const double short_prob = p.alpha / static_cast<double>(topo.short_fanout());
  infection_state<typename Topology::vertex> next;
  next.reserve(state.size() * 2 + 1);
  for (const auto& v : state) {
    auto s = trial_stream(seed, t, topo.rng_key(v), 0);
    detail::offspring(topo, p, short_prob, s, v, [&](const auto& w) { next.insert(w); });
    if (next.size() > cap) throw resource_error("infected set exceeds population cap");
  }
  return next;
}

/// One step of the branching random walk. Particle j at site v uses the trial
/// stream (seed, t, v, j); the contact process uses j = 0, which couples the
/// two so the CP set stays inside the BRW support.
template <class Topology>
brw_state<typename Topology::vertex> brw_step(const brw_state<typename Topology::vertex>& state,
                                              Topology& topo, const model_params& p,
                                              std::uint64_t seed, std::uint64_t t,
                                              std::size_t cap = default_population_cap) {
  detail::check_channels(topo, p);
  const double short_prob = p.alpha / static_cast<double>(topo.short_fanout());
  brw_state<typename Topology::vertex> next;
  next.reserve(state.size() * 2 + 1);
  std::uint64_t total = 0;
  for (const auto& [v, count] : state) {
    const auto key = topo.rng_key(v);
    for (std::uint64_t j = 0; j < count; ++j) {
      auto s = trial_stream(seed, t, key, j);
      detail::offspring(topo, p, short_prob, s, v, [&](const auto& w) {
        ++next[w];
        ++total;
      });
    }
    if (total > cap) throw resource_error("particle count exceeds population cap");
  }
  return next;
}

template <class V>
std::uint64_t population(const infection_state<V>& s) {
  return s.size();
}
template <class V>
std::uint64_t population(const brw_state<V>& s) {
  std::uint64_t n = 0;
  for (const auto& kv : s) n += kv.second;
  return n;
}

template <class V>
bool contains(const infection_state<V>& s, const V& v) {
  return s.count(v) != 0;
}
template <class V>
bool contains(const brw_state<V>& s, const V& v) {
  return s.count(v) != 0;
}

enum class dynamics_kind { contact, branching };

inline std::string to_string(dynamics_kind k) {
  return k == dynamics_kind::contact ? "contact" : "branching";
}

/// Iterates the chosen dynamics from `start`, calling observer(t, state) at
/// t = 0, 1, ... until the observer returns true or `horizon` steps are done.
/// Returns the last observed time.
template <class Topology, class State, class Observer>
std::uint64_t evolve(State state, Topology& topo, const model_params& p, std::uint64_t horizon,
                     std::uint64_t seed, Observer&& observer,
                     std::size_t cap = default_population_cap) {
  if constexpr (!Topology::finite) {
    const auto reach = static_cast<double>(p.m) * static_cast<double>(horizon);
    if (reach >= static_cast<double>(topo.packing().limit()))
      throw resource_error("horizon too long for packed lattice coordinates");
  }
  if (observer(std::uint64_t{0}, std::as_const(state))) return 0;
  for (std::uint64_t t = 0; t < horizon; ++t) {
    if constexpr (requires { state.begin()->second; }) {
      state = brw_step(state, topo, p, seed, t, cap);
    } else {
      state = cp_step(state, topo, p, seed, t, cap);
    }
    if (observer(t + 1, std::as_const(state))) return t + 1;
  }
  return horizon;
}

enum class stop_kind { extinct, returned, censored };

inline std::string to_string(stop_kind k) {
  switch (k) {
    case stop_kind::extinct: return "extinct";
    case stop_kind::returned: return "returned";
    case stop_kind::censored: return "censored";
  }
  return "?";
}

struct stop_outcome {
  stop_kind kind = stop_kind::censored;
  std::uint64_t time = 0;
  friend bool operator==(const stop_outcome&, const stop_outcome&) = default;
};

/// Extinction time tau from `start`, censored at `horizon`.
template <class Topology>
stop_outcome run_tau(const infection_state<typename Topology::vertex>& start, Topology& topo,
                     const model_params& p, std::uint64_t horizon, std::uint64_t seed,
                     std::size_t cap = default_population_cap) {
  if (horizon < 1) throw invalid_parameter("horizon must be >= 1");
  stop_outcome out{stop_kind::censored, horizon};
  evolve(start, topo, p, horizon, seed,
         [&](std::uint64_t t, const auto& s) {
           if (s.empty()) {
             out = {stop_kind::extinct, t};
             return true;
           }
           return false;
         },
         cap);
  return out;
}

/// sigma = first t >= 1 with the state empty or the origin infected, starting
/// from the origin alone.
template <class Topology>
stop_outcome run_sigma(Topology& topo, const model_params& p, std::uint64_t horizon,
                       std::uint64_t seed, std::size_t cap = default_population_cap) {
  if (horizon < 1) throw invalid_parameter("horizon must be >= 1");
  infection_state<typename Topology::vertex> start{topo.origin()};
  stop_outcome out{stop_kind::censored, horizon};
  evolve(start, topo, p, horizon, seed,
         [&](std::uint64_t t, const auto& s) {
           if (t == 0) return false;
           if (s.empty()) {
             out = {stop_kind::extinct, t};
             return true;
           }
           if (contains(s, topo.origin())) {
             out = {stop_kind::returned, t};
             return true;
           }
           return false;
         },
         cap);
  return out;
}

struct trajectory_point {
  std::uint64_t t;
  std::uint64_t population;
  bool origin_infected;
};

struct all_ones_result {
  stop_outcome outcome;
  std::vector<trajectory_point> trajectory;
};

/// Small world started fully infected. Records every `stride`-th population
/// count plus the final one.
inline all_ones_result run_all_ones(const small_world_graph& g, const model_params& p,
                                    std::uint64_t horizon, std::uint64_t seed,
                                    std::uint64_t stride = 1) {
  if (horizon < 1) throw invalid_parameter("horizon must be >= 1");
  if (stride < 1) stride = 1;
  small_world_topology topo(g);
  infection_state<std::uint64_t> start;
  start.reserve(g.vertex_count());
  for (std::uint64_t v = 0; v < g.vertex_count(); ++v) start.insert(v);
  all_ones_result res{{stop_kind::censored, horizon}, {}};
  evolve(std::move(start), topo, p, horizon, seed, [&](std::uint64_t t, const auto& s) {
    const bool done = s.empty();
    if (t % stride == 0 || done || t == horizon)
      res.trajectory.push_back({t, s.size(), contains(s, topo.origin())});
    if (done) res.outcome = {stop_kind::extinct, t};
    return done;
  });
  return res;
}

// CSV: t,population,origin_infected
inline void write_trajectory_csv(std::ostream& os, const std::vector<trajectory_point>& traj) {
  os << "t,population,origin_infected\n";
  for (const auto& pt : traj)
    os << pt.t << ',' << pt.population << ',' << (pt.origin_infected ? 1 : 0) << '\n';
}

}  // namespace swcp

#endif  // SWCP_DYNAMICS_HPP_
