#pragma once

#include <map>
#include <stdexcept>
#include <string>

namespace auv {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat `section.key = value` configuration store. Every key the project
/// understands is present with its documented default; loading a file or
/// applying an override with an unknown key is an error. The resolved
/// configuration can be echoed back out as a parseable file.
class Config {
 public:
  /// All known keys with their built-in defaults.
  static Config defaults();

  /// Parse a config file (`key = value`, `#` comments, blank lines).
  /// Throws ConfigError with a line number on unknown keys or bad syntax.
  void load_file(const std::string& path);

  /// Parse config text (same format as a file). `origin` is used in errors.
  void load_text(const std::string& text, const std::string& origin = "<text>");

  /// Set a single key. Throws ConfigError on unknown keys.
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  const std::string& get_string(const std::string& key) const;

  /// Echo the resolved configuration, keys sorted and grouped by section.
  std::string to_string() const;

  /// Write to_string() to a file.
  void save_file(const std::string& path) const;

 private:
  const std::string& raw(const std::string& key) const;

  std::map<std::string, std::string> values_;
};

}  // namespace auv
