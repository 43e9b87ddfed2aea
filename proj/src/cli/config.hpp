#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mwg/experiments.hpp"
#include "mwg/kernels.hpp"
#include "mwg/targets.hpp"

namespace mwg::cli {

/// A config problem attributable to one key.
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

private:
  std::string key_;
};

/// Flat `section.name = value` configuration.
///
/// Lines are `key = value`; `#` starts a comment. A JSON summary written by
/// this tool is also accepted: its embedded "config" object is read back.
class RunConfig {
public:
  static const std::vector<std::string>& known_keys();

  static RunConfig parse_text(const std::string& text);
  static RunConfig from_file(const std::string& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.contains(key); }
  std::optional<std::string> raw(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  std::optional<double> find_double(const std::string& key) const;
  std::vector<std::size_t> get_size_list(const std::string& key) const;
  std::vector<double> get_double_list(const std::string& key) const;

  TargetSpec target() const;
  Algorithm kernel_kind() const;
  double kernel_c() const;
  unsigned threads() const;

  /// Every resolved key except execution-only settings (run.threads), in key order.
  std::map<std::string, std::string> resolved() const;

private:
  std::map<std::string, std::string> values_;
};

}  // namespace mwg::cli
