#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbcg {

struct ConfigError : std::runtime_error {
  ConfigError(const std::string& msg, int line_)
      : std::runtime_error(msg + (line_ > 0 ? " (line " + std::to_string(line_) + ")" : "")),
        line(line_) {}
  int line = 0;
};

// Flat `key = value` configuration. `[section]` headers prefix the keys that
// follow with "section.". Later assignments override earlier ones; every key
// must be consumed by the run, unknown keys are reported with their line.
class Config {
 public:
  struct Entry {
    std::string value;
    int line = 0;
    mutable bool consumed = false;
  };

  void set(const std::string& key, const std::string& value, int line = 0) {
    entries_[key] = Entry{value, line, false};
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    it->second.consumed = true;
    return it->second.value;
  }

  double get_double(const std::string& key, double fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    it->second.consumed = true;
    return parse_double(it->second.value, key, it->second.line);
  }

  long get_long(const std::string& key, long fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    it->second.consumed = true;
    return parse_long(it->second.value, key, it->second.line);
  }

  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    it->second.consumed = true;
    std::uint64_t v = 0;
    const auto& s = it->second.value;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
      throw ConfigError("key '" + key + "': expected unsigned integer, got '" + s + "'",
                        it->second.line);
    return v;
  }

  bool get_bool(const std::string& key, bool fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    it->second.consumed = true;
    const std::string& s = it->second.value;
    if (s == "true" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "no" || s == "0") return false;
    throw ConfigError("key '" + key + "': expected boolean, got '" + s + "'", it->second.line);
  }

  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    it->second.consumed = true;
    std::vector<double> out;
    std::stringstream ss(it->second.value);
    std::string tok;
    while (std::getline(ss, tok, ','))
      out.push_back(parse_double(trim(tok), key, it->second.line));
    if (out.empty())
      throw ConfigError("key '" + key + "': empty list", it->second.line);
    return out;
  }

  std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    it->second.consumed = true;
    std::vector<int> out;
    std::stringstream ss(it->second.value);
    std::string tok;
    while (std::getline(ss, tok, ','))
      out.push_back(static_cast<int>(parse_long(trim(tok), key, it->second.line)));
    if (out.empty()) throw ConfigError("key '" + key + "': empty list", it->second.line);
    return out;
  }

  // Every remaining unconsumed key, for unknown-key rejection.
  std::vector<std::pair<std::string, int>> unconsumed() const {
    std::vector<std::pair<std::string, int>> out;
    for (const auto& [k, e] : entries_)
      if (!e.consumed) out.emplace_back(k, e.line);
    return out;
  }

  void reject_unconsumed() const {
    const auto leftover = unconsumed();
    if (leftover.empty()) return;
    std::ostringstream os;
    os << "unknown configuration key(s):";
    for (const auto& [k, line] : leftover) {
      os << " '" << k << "'";
      if (line > 0) os << " (line " << line << ")";
    }
    throw ConfigError(os.str(), 0);
  }

  // Sorted (key, value) snapshot, used for manifests.
  std::vector<std::pair<std::string, std::string>> items() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [k, e] : entries_) out.emplace_back(k, e.value);
    return out;
  }

  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

 private:
  static double parse_double(const std::string& s, const std::string& key, int line) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
      throw ConfigError("key '" + key + "': expected number, got '" + s + "'", line);
    return v;
  }
  static long parse_long(const std::string& s, const std::string& key, int line) {
    long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
      throw ConfigError("key '" + key + "': expected integer, got '" + s + "'", line);
    return v;
  }

  std::map<std::string, Entry> entries_;
};

inline void parse_config_text(const std::string& text, Config& cfg) {
  std::istringstream is(text);
  std::string line;
  std::string prefix;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = Config::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("unterminated section header '" + line + "'", lineno);
      prefix = Config::trim(line.substr(1, line.size() - 2));
      if (!prefix.empty()) prefix += ".";
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value', got '" + line + "'", lineno);
    const std::string key = Config::trim(line.substr(0, eq));
    const std::string value = Config::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", lineno);
    cfg.set(prefix + key, value, lineno);
  }
}

inline Config parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  Config cfg;
  parse_config_text(ss.str(), cfg);
  return cfg;
}

}  // namespace sbcg
