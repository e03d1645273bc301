#ifndef SWCP_LAZY_TREE_HPP_
#define SWCP_LAZY_TREE_HPP_

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "swcp/address.hpp"
#include "swcp/big_world.hpp"
#include "swcp/params.hpp"
#include "swcp/rng.hpp"

namespace swcp {

// Packs a d-vector into one 64-bit word, (60/d) bits per coordinate with a
// bias. Adding a packed delta is exact while every coordinate stays in range.
class lattice_packing {
 public:
  explicit lattice_packing(int d) : d_(d) {
    if (d < 1 || d > 6) throw invalid_parameter("lazy big world supports 1 <= d <= 6");
    bits_ = 60 / d;
    bias_ = std::int64_t{1} << (bits_ - 1);
  }

  int dim() const { return d_; }
  // Largest |coordinate| representable.
  std::int64_t limit() const { return bias_ - 1; }

  std::uint64_t pack(const lattice_point& z) const {
    std::uint64_t w = 0;
    for (int i = 0; i < d_; ++i) {
      if (z[i] > limit() || z[i] < -limit())
        throw resource_error("lattice coordinate exceeds packed range");
      w = (w << bits_) | static_cast<std::uint64_t>(z[i] + bias_);
    }
    return w;
  }

  lattice_point unpack(std::uint64_t w) const {
    lattice_point z(d_);
    const std::uint64_t mask = (std::uint64_t{1} << bits_) - 1;
    for (int i = d_ - 1; i >= 0; --i) {
      z[i] = static_cast<std::int64_t>(w & mask) - bias_;
      w >>= bits_;
    }
    return z;
  }

  std::uint64_t delta(const lattice_point& y) const {
    std::uint64_t w = 0;
    for (int i = 0; i < d_; ++i)
      w = (w << bits_) + static_cast<std::uint64_t>(y[i]);  // wraps for y < 0
    return w;
  }

  std::uint64_t zero() const { return pack(lattice_point(d_, 0)); }

 private:
  int d_;
  int bits_;
  std::int64_t bias_;
};

enum class tree_family { big_world, comb, km };

/// Vertex of a lazily materialized tree-like graph: a row (one copy of Z^d, or
/// one complete graph for K_M) and the packed position inside it.
struct tree_vertex {
  std::uint32_t row = 0;
  std::uint64_t offset = 0;
  friend bool operator==(const tree_vertex&, const tree_vertex&) = default;
};

struct tree_vertex_hash {
  std::size_t operator()(const tree_vertex& v) const {
    return static_cast<std::size_t>(hash_combine(v.row, v.offset));
  }
};

/// Big world B_m, comb C_m or comparison graph K_M, materialized on demand.
///
/// Rows are interned: row 0 is the positive root copy (the root of K_M), row 1
/// the negative root copy (big world and comb only); every other row hangs
/// below a parent vertex through a long-range edge. A row's rng key is a
/// structural hash of its address prefix, so two instances that reach the same
/// vertex by different histories draw the same trials for it.
///
/// Holds mutable interning state: one instance per replicate / worker.
class tree_topology {
 public:
  using vertex = tree_vertex;
  static constexpr bool finite = false;
  static constexpr std::uint32_t no_parent = std::numeric_limits<std::uint32_t>::max();

  tree_topology(tree_family family, int m, int d, std::uint64_t km_size = 0)
      : family_(family), m_(m), d_(family == tree_family::km ? 1 : d),
        packing_(family == tree_family::km ? 1 : d) {
    if (family == tree_family::km) {
      if (km_size < 2) throw invalid_parameter("K_M needs M >= 2");
      fanout_ = km_size;
    } else {
      fanout_ = ball_volume(m, d);
      for (const auto& y : lattice_ball(m, d, true)) deltas_.push_back(packing_.delta(y));
    }
    zero_ = packing_.zero();
    reset();
  }

  static tree_topology big_world(const model_params& p) {
    return tree_topology(tree_family::big_world, p.m, p.d);
  }
  static tree_topology comb(const model_params& p) {
    return tree_topology(tree_family::comb, p.m, p.d);
  }
  static tree_topology km(std::uint64_t M) { return tree_topology(tree_family::km, 1, 1, M); }

  tree_family family() const { return family_; }
  const lattice_packing& packing() const { return packing_; }

  // Births into rows deeper than the cap are discarded.
  void set_depth_cap(std::optional<std::uint32_t> cap) { depth_cap_ = cap; }
  std::optional<std::uint32_t> depth_cap() const { return depth_cap_; }

  // Births at a lattice coordinate beyond the radius cap are discarded.
  void set_radius_cap(std::optional<std::int64_t> cap) {
    if (cap && family_ == tree_family::km) throw invalid_parameter("K_M has no lattice radius");
    radius_cap_ = cap;
  }
  std::optional<std::int64_t> radius_cap() const { return radius_cap_; }

  bool admits(const vertex& v) const {
    if (!radius_cap_) return true;
    for (auto c : packing_.unpack(v.offset))
      if (c > *radius_cap_ || c < -*radius_cap_) return false;
    return true;
  }

  void reset() {
    rows_.clear();
    children_.clear();
    rows_.push_back({no_parent, 0, 0, hash_string("+root"), true});
    if (family_ != tree_family::km) rows_.push_back({no_parent, 0, 1, hash_string("-root"), false});
  }

  vertex origin() const { return {0, zero_}; }
  bool is_origin(const vertex& v) const { return v.row == 0 && v.offset == zero_; }

  // Number of short-channel trials of an ordinary vertex; each fires with
  // probability alpha / fanout.
  std::uint64_t short_fanout() const { return fanout_; }

  std::size_t row_count() const { return rows_.size(); }
  std::uint32_t depth(const vertex& v) const { return rows_[v.row].depth; }

  std::uint64_t rng_key(const vertex& v) const { return hash_combine(rows_[v.row].key, v.offset); }

  /// Short-channel targets of v, self first. Comb teeth and -(0) have none; the
  /// K_M root sends all of its short-channel trials to itself.
  template <class F>
  void for_each_short(const vertex& v, F&& f) const {
    switch (family_) {
      case tree_family::comb:
        if (v.row != 0) return;
        [[fallthrough]];
      case tree_family::big_world:
        for (auto delta : deltas_) f(vertex{v.row, v.offset + delta});
        return;
      case tree_family::km:
        if (v.row == 0) {
          for (std::uint64_t i = 0; i < fanout_; ++i) f(v);
          return;
        }
        f(v);
        for (std::uint64_t z = 0; z < fanout_; ++z) {
          const auto w = zero_ + z;
          if (w != v.offset) f(vertex{v.row, w});
        }
        return;
    }
  }

  /// Long-range partner, or nullopt when it lies beyond the depth cap.
  std::optional<vertex> long_partner(const vertex& v) {
    const auto& r = rows_[v.row];
    if (v.offset == zero_) {
      if (r.parent != no_parent) return vertex{r.parent, r.parent_offset};
      if (family_ != tree_family::km) {
        const std::uint32_t other = v.row == 0 ? 1 : 0;
        if (depth_cap_ && rows_[other].depth > *depth_cap_) return std::nullopt;
        return vertex{other, zero_};
      }
    }
    if (depth_cap_ && r.depth + 1 > *depth_cap_) return std::nullopt;
    return vertex{child(v.row, v.offset), zero_};
  }

  big_world_address address(const vertex& v) const {
    if (family_ == tree_family::km) throw invalid_parameter("K_M vertices use km_address");
    big_world_address a;
    std::vector<lattice_point> rev{packing_.unpack(v.offset)};
    std::uint32_t row = v.row;
    while (rows_[row].parent != no_parent) {
      rev.push_back(packing_.unpack(rows_[row].parent_offset));
      row = rows_[row].parent;
    }
    a.positive = rows_[row].positive;
    a.offsets.assign(rev.rbegin(), rev.rend());
    return a;
  }

  km_address km(const vertex& v) const {
    if (family_ != tree_family::km) throw invalid_parameter("not a K_M topology");
    std::vector<std::int64_t> rev{static_cast<std::int64_t>(v.offset - zero_)};
    std::uint32_t row = v.row;
    while (rows_[row].parent != no_parent) {
      rev.push_back(static_cast<std::int64_t>(rows_[row].parent_offset - zero_));
      row = rows_[row].parent;
    }
    return {{rev.rbegin(), rev.rend()}};
  }

  vertex intern(const big_world_address& a) {
    if (family_ == tree_family::km) throw invalid_parameter("K_M vertices use km_address");
    if (!is_valid(a, d_)) throw invalid_parameter("invalid address " + to_string(a));
    if (family_ == tree_family::comb && !is_comb_vertex(a, d_))
      throw invalid_parameter("not a comb vertex " + to_string(a));
    std::uint32_t row = a.positive ? 0 : 1;
    for (std::size_t j = 0; j + 1 < a.offsets.size(); ++j)
      row = child(row, packing_.pack(a.offsets[j]));
    return {row, packing_.pack(a.offsets.back())};
  }

  vertex intern(const km_address& a) {
    if (family_ != tree_family::km) throw invalid_parameter("not a K_M topology");
    if (!is_valid(a, static_cast<std::int64_t>(fanout_)))
      throw invalid_parameter("invalid K_M address " + to_string(a));
    std::uint32_t row = 0;
    for (std::size_t j = 0; j + 1 < a.offsets.size(); ++j)
      row = child(row, zero_ + static_cast<std::uint64_t>(a.offsets[j]));
    return {row, zero_ + static_cast<std::uint64_t>(a.offsets.back())};
  }

 private:
  struct row_info {
    std::uint32_t parent;
    std::uint64_t parent_offset;
    std::uint32_t depth;
    std::uint64_t key;
    bool positive;
  };

  struct child_key {
    std::uint32_t row;
    std::uint64_t offset;
    friend bool operator==(const child_key&, const child_key&) = default;
  };
  struct child_key_hash {
    std::size_t operator()(const child_key& k) const {
      return static_cast<std::size_t>(hash_combine(k.row, k.offset));
    }
  };

  std::uint32_t child(std::uint32_t row, std::uint64_t offset) {
    auto [it, inserted] = children_.try_emplace(child_key{row, offset}, 0);
    if (inserted) {
      if (rows_.size() >= no_parent) throw resource_error("row table exhausted");
      it->second = static_cast<std::uint32_t>(rows_.size());
      const auto& parent = rows_[row];
      rows_.push_back({row, offset, parent.depth + 1, hash_combine(parent.key, offset),
                       parent.positive});
    }
    return it->second;
  }

  tree_family family_;
  int m_;
  int d_;
  lattice_packing packing_;
  std::uint64_t fanout_ = 0;
  std::uint64_t zero_ = 0;
  std::vector<std::uint64_t> deltas_;
  std::optional<std::uint32_t> depth_cap_;
  std::optional<std::int64_t> radius_cap_;
  std::vector<row_info> rows_;
  std::unordered_map<child_key, std::uint32_t, child_key_hash> children_;
};

}  // namespace swcp

#endif  // SWCP_LAZY_TREE_HPP_
