#ifndef SWCP_SMALL_WORLD_HPP_
#define SWCP_SMALL_WORLD_HPP_

#include <algorithm>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "swcp/big_world.hpp"
#include "swcp/params.hpp"
#include "swcp/rng.hpp"

namespace swcp {

/// Torus (Z mod R)^d with L-inf range-m short edges plus a perfect matching of
/// the R^d vertices (one long-range partner each). Immutable once built.
///
/// Vertex v has coordinates in mixed radix R, the last coordinate least
/// significant. The short-range structure is never stored.
class small_world_graph {
 public:
  small_world_graph(std::int64_t R, int m, int d, std::uint64_t seed,
                    std::vector<std::uint64_t> partner)
      : R_(R), m_(m), d_(d), seed_(seed), partner_(std::move(partner)) {
    check_shape(R, m, d);
    if (partner_.size() != checked_volume(R, d))
      throw invalid_parameter("matching size differs from R^d");
    for (std::uint64_t v = 0; v < partner_.size(); ++v) {
      const auto w = partner_[v];
      if (w >= partner_.size() || w == v || partner_[w] != v)
        throw invalid_parameter("matching is not a fixed-point-free involution");
    }
    build_offsets();
  }

  std::int64_t side() const { return R_; }
  int range() const { return m_; }
  int dim() const { return d_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t vertex_count() const { return static_cast<std::uint64_t>(partner_.size()); }
  const std::vector<std::uint64_t>& matching() const { return partner_; }

  std::uint64_t long_partner(std::uint64_t v) const { return partner_[v]; }

  /// Calls f(w) for every w in the closed short-range ball of v: v itself
  /// first when include_self, then the neighbours in lexicographic offset order.
  template <class F>
  void for_each_short(std::uint64_t v, bool include_self, F&& f) const {
    if (include_self) f(v);
    if (d_ == 1) {
      const auto x = static_cast<std::int64_t>(v);
      for (const auto& y : offsets_) {
        auto w = x + y[0];
        if (w < 0) w += R_;
        if (w >= R_) w -= R_;
        f(static_cast<std::uint64_t>(w));
      }
      return;
    }
    std::int64_t coords[16];
    decompose(v, coords);
    for (const auto& y : offsets_) {
      std::uint64_t w = 0;
      for (int i = 0; i < d_; ++i) {
        auto c = coords[i] + y[i];
        if (c < 0) c += R_;
        if (c >= R_) c -= R_;
        w = w * static_cast<std::uint64_t>(R_) + static_cast<std::uint64_t>(c);
      }
      f(w);
    }
  }

  std::vector<std::int64_t> coordinates(std::uint64_t v) const {
    std::vector<std::int64_t> c(d_);
    decompose(v, c.data());
    return c;
  }

  std::uint64_t index(const std::vector<std::int64_t>& coords) const {
    std::uint64_t w = 0;
    for (int i = 0; i < d_; ++i) {
      auto c = coords[i] % R_;
      if (c < 0) c += R_;
      w = w * static_cast<std::uint64_t>(R_) + static_cast<std::uint64_t>(c);
    }
    return w;
  }

  // Matched pairs that are also short-range neighbours (parallel edges).
  std::uint64_t parallel_edge_count() const {
    std::uint64_t n = 0;
    for (std::uint64_t v = 0; v < vertex_count(); ++v) {
      if (partner_[v] < v) continue;
      for_each_short(v, false, [&](std::uint64_t w) {
        if (w == partner_[v]) ++n;
      });
    }
    return n;
  }

  static std::uint64_t checked_volume(std::int64_t R, int d) {
    std::uint64_t n = 1;
    for (int i = 0; i < d; ++i) {
      n *= static_cast<std::uint64_t>(R);
      if (n > (std::uint64_t{1} << 32)) throw invalid_parameter("R^d too large");
    }
    return n;
  }

  static void check_shape(std::int64_t R, int m, int d) {
    if (m < 1 || d < 1 || d > 16) throw invalid_parameter("need m >= 1 and 1 <= d <= 16");
    if (R < 2 || R % 2 != 0) throw invalid_parameter("R must be even");
    if (R < 2 * m + 2) throw invalid_parameter("R must be at least 2m+2");
    checked_volume(R, d);
  }

 private:
  void decompose(std::uint64_t v, std::int64_t* coords) const {
    for (int i = d_ - 1; i >= 0; --i) {
      coords[i] = static_cast<std::int64_t>(v % static_cast<std::uint64_t>(R_));
      v /= static_cast<std::uint64_t>(R_);
    }
  }

  void build_offsets() { offsets_ = lattice_ball(m_, d_, false); }

  std::int64_t R_;
  int m_;
  int d_;
  std::uint64_t seed_;
  std::vector<std::uint64_t> partner_;
  std::vector<lattice_point> offsets_;
};

/// Uniformly random perfect matching: Fisher-Yates shuffle of the vertex list,
/// then consecutive entries are paired.
inline small_world_graph make_small_world(std::int64_t R, int m, int d, std::uint64_t seed) {
  small_world_graph::check_shape(R, m, d);
  const auto n = small_world_graph::checked_volume(R, d);
  std::vector<std::uint64_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::uint64_t{0});
  counter_stream rng(hash_combine(seed, hash_string("small-world-matching")));
  for (std::uint64_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
  std::vector<std::uint64_t> partner(n);
  for (std::uint64_t i = 0; i < n; i += 2) {
    partner[perm[i]] = perm[i + 1];
    partner[perm[i + 1]] = perm[i];
  }
  return small_world_graph(R, m, d, seed, std::move(partner));
}

struct small_world_adjacency {
  std::vector<std::uint64_t> short_range;
  std::uint64_t long_range;
};

inline small_world_adjacency small_world_neighbors(const small_world_graph& g, std::uint64_t v) {
  if (v >= g.vertex_count()) throw std::invalid_argument("vertex index out of range");
  small_world_adjacency adj{{}, g.long_partner(v)};
  g.for_each_short(v, false, [&](std::uint64_t w) { adj.short_range.push_back(w); });
  return adj;
}

// Serialized form: header line `R m d seed`, then partner[v] one per line.
inline void write_small_world(std::ostream& os, const small_world_graph& g) {
  os << g.side() << ' ' << g.range() << ' ' << g.dim() << ' ' << g.seed() << '\n';
  for (auto w : g.matching()) os << w << '\n';
}

inline small_world_graph read_small_world(std::istream& is) {
  std::int64_t R = 0;
  int m = 0, d = 0;
  std::uint64_t seed = 0;
  if (!(is >> R >> m >> d >> seed)) throw invalid_parameter("bad small-world header");
  small_world_graph::check_shape(R, m, d);
  const auto n = small_world_graph::checked_volume(R, d);
  std::vector<std::uint64_t> partner(n);
  for (auto& w : partner)
    if (!(is >> w)) throw invalid_parameter("truncated matching");
  return small_world_graph(R, m, d, seed, std::move(partner));
}

}  // namespace swcp

#endif  // SWCP_SMALL_WORLD_HPP_
