#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace mycelogic {

// Key-value text in a small TOML subset:
//
//   # comment
//   [section]
//   key = value        # value may be "quoted"
//
// Keys are addressed as "section.key". Every lookup records the value it
// resolved to (given or default), which is what the run manifest echoes.
class Config {
 public:
  // Throws ParseError with the offending line.
  static Config parse(std::string_view text);
  // Throws ConfigError if the file cannot be read.
  static Config load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.contains(key); }

  std::string get_string(const std::string& key, const std::string& fallback);
  double get_double(const std::string& key, double fallback);
  std::int64_t get_int(const std::string& key, std::int64_t fallback);
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback);
  bool get_bool(const std::string& key, bool fallback);
  // Comma-separated list; empty string gives an empty list.
  std::vector<std::int64_t> get_int_list(const std::string& key,
                                         const std::vector<std::int64_t>& fallback);

  const std::map<std::string, std::string>& resolved() const { return resolved_; }
  // Keys present in the text but never looked up (typos, stray settings).
  std::vector<std::string> unused() const;

 private:
  std::string raw(const std::string& key, const std::string& fallback);
  std::map<std::string, std::string> values_;
  std::map<std::string, std::string> resolved_;
};

}  // namespace mycelogic
