#pragma once

// Flat key = value configuration with command-line overrides.
//
//   # comment
//   state = ground
//   mean_n = 100
//
// Keys are [a-z0-9_]+; a key may appear once per file. Overrides replace
// file values. Every diagnostic names the source, the line and the field.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pqslab::sweep {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Config {
 public:
  struct Entry {
    std::string value;
    std::string source;  // file path or "override"
    int line = 0;
  };

  static Config parse(const std::string& text, const std::string& source);
  static Config load(const std::string& path);

  /// "key=value" from the command line; replaces any earlier value.
  void set_override(const std::string& assignment);
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback);
  std::optional<std::string> get_string(const std::string& key);
  double get_double(const std::string& key, double fallback);
  std::optional<double> get_double(const std::string& key);
  long long get_int(const std::string& key, long long fallback);
  bool get_bool(const std::string& key, bool fallback);
  std::vector<double> get_double_list(const std::string& key, const std::vector<double>& fallback);
  /// One of `allowed`.
  std::string get_choice(const std::string& key, const std::string& fallback, const std::vector<std::string>& allowed);

  /// Raises for keys that no getter consumed.
  void reject_unused() const;

  /// Error tagged with the location of `key` (or the key alone if unset).
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

  const std::map<std::string, Entry>& entries() const { return entries_; }

 private:
  const Entry* find(const std::string& key);
  std::map<std::string, Entry> entries_;
  std::map<std::string, bool> used_;
};

}  // namespace pqslab::sweep
