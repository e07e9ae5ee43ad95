// Plain-text key=value configs with [section] headers and '#' comments.
// Values are kept verbatim as strings; typed accessors parse on demand.
#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace fbl {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigFile {
 public:
  static ConfigFile parse(const std::string& text);
  static ConfigFile load(const std::string& path);

  // Canonical form: sections and keys sorted, one "key = value" per line.
  // parse(serialize()) reproduces the same section map.
  std::string serialize() const;

  bool has(const std::string& section, const std::string& key) const;
  const std::string& get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double_or(const std::string& section, const std::string& key,
                       double fallback) const;
  int get_int(const std::string& section, const std::string& key) const;
  int get_int_or(const std::string& section, const std::string& key, int fallback) const;
  // Semicolon-separated list of numbers ("1e-2; 1e-3; 0").
  std::vector<double> get_list(const std::string& section, const std::string& key) const;

  void set(const std::string& section, const std::string& key, const std::string& value);

  using SectionMap = std::map<std::string, std::map<std::string, std::string>>;
  const SectionMap& sections() const { return sections_; }

  bool operator==(const ConfigFile& other) const = default;

 private:
  SectionMap sections_;
};

// Splits on the given separator and trims each piece; empty pieces dropped.
std::vector<std::string> split_trimmed(const std::string& text, char separator);

}  // namespace fbl
