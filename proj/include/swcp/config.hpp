#ifndef SWCP_CONFIG_HPP_
#define SWCP_CONFIG_HPP_

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "swcp/params.hpp"

namespace swcp {

/// Flat `key = value` configuration. Blank lines and `#` comments are
/// ignored; lists are comma-separated. Later assignments override earlier ones,
/// which is how CLI flags take precedence over the file.
class config {
 public:
  static config parse(std::istream& is) {
    config c;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw invalid_parameter("config line " + std::to_string(lineno) + ": expected key = value");
      const auto key = trim(line.substr(0, eq));
      if (key.empty()) throw invalid_parameter("config line " + std::to_string(lineno) + ": empty key");
      c.set(key, trim(line.substr(eq + 1)));
    }
    return c;
  }

  static config load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_parameter("cannot open config file " + path);
    return parse(in);
  }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  void erase(const std::string& key) { values_.erase(key); }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : to_double(key, it->second);
  }

  std::int64_t get_int(const std::string& key, std::int64_t fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : to_int(key, it->second);
  }

  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const {
    const auto v = get_int(key, static_cast<std::int64_t>(fallback));
    if (v < 0) throw invalid_parameter("config key " + key + " must be nonnegative");
    return static_cast<std::uint64_t>(v);
  }

  bool get_bool(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
    if (it->second == "false" || it->second == "0" || it->second == "no") return false;
    throw invalid_parameter("config key " + key + ": expected a boolean");
  }

  std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    for (const auto& item : split(it->second)) out.push_back(to_double(key, item));
    return out;
  }

  std::vector<std::int64_t> get_ints(const std::string& key,
                                     std::vector<std::int64_t> fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<std::int64_t> out;
    for (const auto& item : split(it->second)) out.push_back(to_int(key, item));
    return out;
  }

  // Canonical text: sorted `key = value` lines.
  std::string canonical() const {
    std::ostringstream os;
    for (const auto& [k, v] : values_) os << k << " = " << v << '\n';
    return os.str();
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  static std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) out.push_back(item);
    }
    return out;
  }

  static double to_double(const std::string& key, const std::string& s) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw invalid_parameter("config key " + key + ": not a number: " + s);
    }
  }

  static std::int64_t to_int(const std::string& key, const std::string& s) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc{} && ptr == s.data() + s.size()) return v;
    // Accept integral values written in scientific notation, e.g. 1e6.
    const double d = to_double(key, s);
    if (d != static_cast<double>(static_cast<std::int64_t>(d)))
      throw invalid_parameter("config key " + key + ": not an integer: " + s);
    return static_cast<std::int64_t>(d);
  }

  std::map<std::string, std::string> values_;
};

}  // namespace swcp

#endif  // SWCP_CONFIG_HPP_
