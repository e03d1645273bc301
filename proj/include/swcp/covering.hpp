#ifndef SWCP_COVERING_HPP_
#define SWCP_COVERING_HPP_

#include <cstdint>
#include <deque>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "swcp/address.hpp"
#include "swcp/big_world.hpp"
#include "swcp/small_world.hpp"

namespace swcp {

namespace detail {

// Breadth-first ball of radius K around +(0) in the big world, with each
// vertex's graph distance.
inline std::vector<std::pair<big_world_address, int>> big_world_ball(int m, int d, int K) {
  std::vector<std::pair<big_world_address, int>> order;
  std::unordered_set<big_world_address, address_hash> seen;
  const auto o = big_world_address::origin(d);
  order.push_back({o, 0});
  seen.insert(o);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto [a, dist] = order[i];
    if (dist == K) continue;
    auto nbrs = big_world_short_neighbors(a, m, d);
    nbrs.push_back(big_world_long_neighbor(a));
    for (auto& b : nbrs)
      if (seen.insert(b).second) order.push_back({std::move(b), dist + 1});
  }
  return order;
}

}  // namespace detail

/// Number of big-world vertices within graph distance K of a vertex (N_K).
inline std::uint64_t big_world_ball_size(int m, int d, int K) {
  if (K < 0) throw invalid_parameter("K must be >= 0");
  return detail::big_world_ball(m, d, K).size();
}

/// True iff the radius-K ball around x in the small world is identical to the
/// big-world ball: the covering map sending +(0) to x is injective on the ball
/// and every small-world edge inside the image lifts to a big-world edge.
inline bool is_ball_treelike(const small_world_graph& g, std::uint64_t x, int K) {
  if (x >= g.vertex_count()) throw std::invalid_argument("vertex index out of range");
  if (K < 0) throw invalid_parameter("K must be >= 0");
  if (K == 0) return true;
  const int m = g.range(), d = g.dim();

  std::unordered_map<big_world_address, std::uint64_t, address_hash> image;
  std::unordered_map<std::uint64_t, big_world_address> preimage;
  std::deque<std::pair<big_world_address, int>> queue;
  const auto o = big_world_address::origin(d);
  image.emplace(o, x);
  preimage.emplace(x, o);
  queue.push_back({o, 0});
  while (!queue.empty()) {
    auto [a, dist] = queue.front();
    queue.pop_front();
    if (dist == K) continue;
    const auto v = image.at(a);
    std::vector<std::uint64_t> targets;
    g.for_each_short(v, false, [&](std::uint64_t w) { targets.push_back(w); });
    targets.push_back(g.long_partner(v));
    auto lifts = big_world_short_neighbors(a, m, d);
    lifts.push_back(big_world_long_neighbor(a));
    for (std::size_t i = 0; i < lifts.size(); ++i) {
      auto it = image.find(lifts[i]);
      if (it != image.end()) continue;  // already explored in the big world
      if (!preimage.emplace(targets[i], lifts[i]).second) return false;
      image.emplace(lifts[i], targets[i]);
      queue.push_back({lifts[i], dist + 1});
    }
  }

  for (const auto& [v, a] : preimage) {
    std::vector<std::uint64_t> targets;
    g.for_each_short(v, false, [&](std::uint64_t w) { targets.push_back(w); });
    targets.push_back(g.long_partner(v));
    auto lifts = big_world_short_neighbors(a, m, d);
    lifts.push_back(big_world_long_neighbor(a));
    for (std::size_t i = 0; i < targets.size(); ++i) {
      auto it = preimage.find(targets[i]);
      if (it != preimage.end() && !(it->second == lifts[i])) return false;
    }
  }
  return true;
}

}  // namespace swcp

#endif  // SWCP_COVERING_HPP_
