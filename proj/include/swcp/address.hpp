#ifndef SWCP_ADDRESS_HPP_
#define SWCP_ADDRESS_HPP_

#include <charconv>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "swcp/params.hpp"
#include "swcp/rng.hpp"

namespace swcp {

using lattice_point = std::vector<std::int64_t>;

inline bool is_zero(const lattice_point& z) {
  for (auto c : z)
    if (c != 0) return false;
  return true;
}

/// Vertex +-(z_1, ..., z_n) of the big world. Canonical: two addresses are the
/// same vertex iff they compare equal.
struct big_world_address {
  bool positive = true;
  std::vector<lattice_point> offsets;

  std::size_t level() const { return offsets.size(); }
  int dim() const { return offsets.empty() ? 0 : static_cast<int>(offsets.front().size()); }

  static big_world_address origin(int d) { return {true, {lattice_point(d, 0)}}; }

  friend bool operator==(const big_world_address&, const big_world_address&) = default;
};

inline bool is_valid(const big_world_address& a, int d) {
  if (a.offsets.empty()) return false;
  for (std::size_t j = 0; j < a.offsets.size(); ++j) {
    if (static_cast<int>(a.offsets[j].size()) != d) return false;
    if (j + 1 < a.offsets.size() && is_zero(a.offsets[j])) return false;
  }
  return true;
}

/// Vertex (z_1, ..., z_n) of the comparison graph K_M: z_1 = 0, 0 <= z_j < M,
/// z_j != 0 for 1 < j < n.
struct km_address {
  std::vector<std::int64_t> offsets;

  std::size_t level() const { return offsets.size(); }
  static km_address root() { return {{0}}; }

  friend bool operator==(const km_address&, const km_address&) = default;
};

inline bool is_valid(const km_address& a, std::int64_t M) {
  const auto n = a.offsets.size();
  if (n == 0 || a.offsets[0] != 0) return false;
  for (std::size_t j = 0; j < n; ++j) {
    if (a.offsets[j] < 0 || a.offsets[j] >= M) return false;
    if (j > 0 && j + 1 < n && a.offsets[j] == 0) return false;
  }
  return true;
}

/// Projection onto the birth-death chain: (0) -> 0, (..,0) at level n -> 2n-3,
/// (.., z) with z != 0 at level n -> 2n-2.
inline std::uint64_t km_phi(const km_address& a) {
  const auto n = a.offsets.size();
  if (n == 1) return 0;
  return a.offsets.back() == 0 ? 2 * n - 3 : 2 * n - 2;
}

struct address_hash {
  std::size_t operator()(const big_world_address& a) const {
    std::uint64_t h = a.positive ? 1 : 2;
    for (const auto& z : a.offsets) {
      for (auto c : z) h = hash_combine(h, static_cast<std::uint64_t>(c));
      h = hash_combine(h, 0x5bd1e995ULL);
    }
    return static_cast<std::size_t>(h);
  }
  std::size_t operator()(const km_address& a) const {
    std::uint64_t h = 3;
    for (auto c : a.offsets) h = hash_combine(h, static_cast<std::uint64_t>(c));
    return static_cast<std::size_t>(h);
  }
};

// Text form: `+(z1;...;zn)`, each z a comma-separated d-tuple, e.g. +(2,0;1,-1).
inline std::string to_string(const big_world_address& a) {
  std::string out;
  out += a.positive ? "+(" : "-(";
  for (std::size_t j = 0; j < a.offsets.size(); ++j) {
    if (j) out += ';';
    for (std::size_t i = 0; i < a.offsets[j].size(); ++i) {
      if (i) out += ',';
      out += std::to_string(a.offsets[j][i]);
    }
  }
  out += ')';
  return out;
}

inline std::string to_string(const km_address& a) {
  std::string out = "(";
  for (std::size_t j = 0; j < a.offsets.size(); ++j) {
    if (j) out += ';';
    out += std::to_string(a.offsets[j]);
  }
  return out + ")";
}

inline big_world_address parse_address(std::string_view text) {
  auto fail = [&] { throw invalid_parameter("malformed address: " + std::string(text)); };
  if (text.size() < 3 || (text[0] != '+' && text[0] != '-') || text[1] != '(' ||
      text.back() != ')')
    fail();
  big_world_address a;
  a.positive = text[0] == '+';
  std::string_view body = text.substr(2, text.size() - 3);
  std::size_t dim = 0;
  while (true) {
    const auto semi = body.find(';');
    std::string_view part = body.substr(0, semi);
    lattice_point z;
    while (true) {
      const auto comma = part.find(',');
      std::string_view num = part.substr(0, comma);
      std::int64_t v = 0;
      auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
      if (ec != std::errc{} || ptr != num.data() + num.size() || num.empty()) fail();
      z.push_back(v);
      if (comma == std::string_view::npos) break;
      part.remove_prefix(comma + 1);
    }
    if (dim == 0) dim = z.size();
    if (z.size() != dim) fail();
    a.offsets.push_back(std::move(z));
    if (semi == std::string_view::npos) break;
    body.remove_prefix(semi + 1);
  }
  if (!is_valid(a, static_cast<int>(dim))) fail();
  return a;
}

}  // namespace swcp

#endif  // SWCP_ADDRESS_HPP_
