#ifndef NATF_CONFIG_HPP
#define NATF_CONFIG_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace natf {

struct ConfigError : std::runtime_error {
  ConfigError(const std::string& key_, const std::string& what_)
      : std::runtime_error(key_.empty() ? what_ : what_ + " (key: " + key_ + ")"), key(key_) {}
  std::string key;
};

/// Flat key-value experiment configuration with dotted section names, e.g.
///   system.kind = doubling
///   schedule.n = 50, 60, 70
/// Lines starting with '#' are comments. Lists are comma-separated.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int_or(const std::string& key, long long fallback) const;
  std::uint64_t get_u64(const std::string& key) const;
  std::vector<double> get_double_list(const std::string& key) const;
  std::vector<int> get_int_list(const std::string& key) const;

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  const std::map<std::string, std::string>& values() const { return values_; }

  /// FNV-1a over the canonical sorted "key=value" rendering.
  std::uint64_t hash() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace natf

#endif
