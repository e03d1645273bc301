#ifndef SWCP_BIG_WORLD_HPP_
#define SWCP_BIG_WORLD_HPP_

#include <cstdint>
#include <vector>

#include "swcp/address.hpp"
#include "swcp/params.hpp"

namespace swcp {

/// Offsets y with ||y||_inf <= m in lexicographic order. The centre is listed
/// first when included, so trial layouts read "self, then neighbours".
inline std::vector<lattice_point> lattice_ball(int m, int d, bool include_centre) {
  ball_volume(m, d);
  std::vector<lattice_point> out;
  if (include_centre) out.emplace_back(d, 0);
  lattice_point y(d, -m);
  while (true) {
    if (!is_zero(y)) out.push_back(y);
    int i = d - 1;
    while (i >= 0 && y[i] == m) y[i--] = -m;
    if (i < 0) break;
    ++y[i];
  }
  return out;
}

inline void require_valid(const big_world_address& a, int d) {
  if (!is_valid(a, d)) throw invalid_parameter("invalid big-world address " + to_string(a));
}

/// The (2m+1)^d - 1 short-range neighbours: same sign and prefix, last offset
/// shifted by every nonzero y in the L-inf ball.
inline std::vector<big_world_address> big_world_short_neighbors(const big_world_address& a,
                                                                int m, int d) {
  require_valid(a, d);
  std::vector<big_world_address> out;
  for (const auto& y : lattice_ball(m, d, false)) {
    big_world_address b = a;
    for (int i = 0; i < d; ++i) b.offsets.back()[i] += y[i];
    out.push_back(std::move(b));
  }
  return out;
}

/// Long-range partner: append 0 if z_n != 0; drop z_n if z_n = 0 and n > 1;
/// flip the sign of (0) otherwise. A fixed-point-free involution.
inline big_world_address big_world_long_neighbor(const big_world_address& a) {
  if (!is_valid(a, a.dim())) throw invalid_parameter("invalid big-world address");
  big_world_address b = a;
  if (!is_zero(a.offsets.back())) {
    b.offsets.emplace_back(a.dim(), 0);
  } else if (a.level() > 1) {
    b.offsets.pop_back();
  } else {
    b.positive = !a.positive;
  }
  return b;
}

// Comb vertices: +(z), +(z,0) with z != 0, and -(0).
inline bool is_comb_vertex(const big_world_address& a, int d) {
  if (!is_valid(a, d)) return false;
  if (!a.positive) return a.level() == 1 && is_zero(a.offsets[0]);
  if (a.level() == 1) return true;
  return a.level() == 2 && is_zero(a.offsets[1]);
}

inline std::vector<big_world_address> comb_neighbors(const big_world_address& a, int m, int d) {
  if (!is_comb_vertex(a, d)) throw invalid_parameter("not a comb vertex: " + to_string(a));
  std::vector<big_world_address> out;
  if (a.positive && a.level() == 1) out = big_world_short_neighbors(a, m, d);
  out.push_back(big_world_long_neighbor(a));
  return out;
}

inline km_address km_long_neighbor(const km_address& a) {
  km_address b = a;
  if (a.level() == 1) {
    b.offsets.push_back(0);
  } else if (a.offsets.back() != 0) {
    b.offsets.push_back(0);
  } else {
    b.offsets.pop_back();
  }
  return b;
}

/// Neighbours in K_M: the other M-1 members of the vertex's complete-graph copy
/// (none for the root), then the long-range partner. The root's partner is
/// (0,0).
inline std::vector<km_address> km_neighbors(const km_address& a, std::int64_t M) {
  if (M < 2 || !is_valid(a, M)) throw invalid_parameter("invalid K_M address " + to_string(a));
  std::vector<km_address> out;
  if (a.level() > 1) {
    for (std::int64_t z = 0; z < M; ++z) {
      if (z == a.offsets.back()) continue;
      km_address b = a;
      b.offsets.back() = z;
      out.push_back(std::move(b));
    }
  }
  out.push_back(km_long_neighbor(a));
  return out;
}

}  // namespace swcp

#endif  // SWCP_BIG_WORLD_HPP_
