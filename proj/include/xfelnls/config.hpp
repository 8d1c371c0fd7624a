#pragma once

// Flat dotted-key configuration files:
//
//   # comment
//   grid.dim = 3
//   path.e0 = 1, 0, 0
//
// Later assignments override earlier ones. Every key must be consumed by the
// reader; leftovers are reported as unknown.

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"

namespace xfelnls {

class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(std::istream& is, const std::string& source = "<config>") {
    KeyValueConfig cfg;
    cfg.merge(is, source);
    return cfg;
  }

  static KeyValueConfig parse_string(const std::string& text) {
    std::istringstream is(text);
    return parse(is, "<string>");
  }

  static KeyValueConfig load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot read config file " + path);
    return parse(is, path);
  }

  void merge(std::istream& is, const std::string& source) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError(source + ":" + std::to_string(lineno), "expected 'key = value'");
      const std::string key = trim(line.substr(0, eq));
      if (key.empty()) throw ConfigError(source + ":" + std::to_string(lineno), "empty key");
      values_[key] = trim(line.substr(eq + 1));
    }
  }

  void merge(const KeyValueConfig& other) {
    for (const auto& [k, v] : other.values_) values_[k] = v;
  }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  /// Marks a key as known without reading it (e.g. options of an unselected variant).
  void touch(const std::string& key) const { used_.insert(key); }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    used_.insert(key);
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  std::string require_string(const std::string& key) const {
    used_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError(key, "required key is missing");
    return it->second;
  }

  double get_double(const std::string& key, double fallback) const {
    if (!has(key)) {
      used_.insert(key);
      return fallback;
    }
    return parse_double(key, require_string(key));
  }

  std::size_t get_size(const std::string& key, std::size_t fallback) const {
    const double v = get_double(key, static_cast<double>(fallback));
    if (!(v >= 0.0) || v != std::floor(v)) throw ConfigError(key, "expected a nonnegative integer");
    return static_cast<std::size_t>(v);
  }

  bool get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) {
      used_.insert(key);
      return fallback;
    }
    const auto s = require_string(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError(key, "expected true or false, got '" + s + "'");
  }

  /// Comma-separated list of numbers; fractions "a/b" and "inf" are accepted.
  std::vector<double> get_list(const std::string& key, std::vector<double> fallback) const {
    if (!has(key)) {
      used_.insert(key);
      return fallback;
    }
    std::vector<double> out;
    for (const auto& item : split(require_string(key), ',')) out.push_back(parse_double(key, item));
    return out;
  }

  Vec3 get_vec3(const std::string& key, const Vec3& fallback) const {
    if (!has(key)) {
      used_.insert(key);
      return fallback;
    }
    const auto list = get_list(key, {});
    if (list.empty() || list.size() > 3) throw ConfigError(key, "expected 1 to 3 components");
    Vec3 v{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < list.size(); ++i) v[i] = list[i];
    return v;
  }

  std::vector<std::string> unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
      if (!used_.count(k)) out.push_back(k);
    return out;
  }

  /// Sorted "key = value" lines; stable input for hashing and manifests.
  std::string canonical() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
    return out;
  }

  const std::map<std::string, std::string>& entries() const noexcept { return values_; }

  static std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep)) {
      item = trim(item);
      if (!item.empty()) out.push_back(item);
    }
    return out;
  }

  static double parse_double(const std::string& key, const std::string& text) {
    const std::string s = trim(text);
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    if (const auto slash = s.find('/'); slash != std::string::npos) {
      const double num = parse_double(key, s.substr(0, slash));
      const double den = parse_double(key, s.substr(slash + 1));
      if (den == 0.0) throw ConfigError(key, "division by zero in '" + s + "'");
      return num / den;
    }
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (!s.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || s.empty())
      throw ConfigError(key, "expected a number, got '" + s + "'");
    return v;
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

}  // namespace xfelnls
