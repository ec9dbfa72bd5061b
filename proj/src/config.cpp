#include "mycelogic/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mycelogic/error.hpp"

namespace mycelogic {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool valid_key(std::string_view k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) return false;
  return true;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Config Config::parse(std::string_view text) {
  Config c;
  std::string section;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;

    // Strip a comment that is not inside quotes.
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line = line.substr(0, i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
      const auto name = trim(line.substr(1, line.size() - 2));
      if (!valid_key(name)) throw ParseError(line_no, "bad section name");
      section = std::string(name);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected key = value");
    const auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (!valid_key(key)) throw ParseError(line_no, "bad key '" + std::string(key) + "'");
    if (!value.empty() && value.front() == '"') {
      if (value.size() < 2 || value.back() != '"') throw ParseError(line_no, "unterminated string");
      value = value.substr(1, value.size() - 2);
    }
    const std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
    if (c.values_.contains(full)) throw ParseError(line_no, "duplicate key '" + full + "'");
    c.values_[full] = std::string(value);
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse(ss.str());
  } catch (const ParseError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string Config::raw(const std::string& key, const std::string& fallback) {
  const auto it = values_.find(key);
  const std::string v = it == values_.end() ? fallback : it->second;
  resolved_[key] = v;
  return v;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) {
  return raw(key, fallback);
}

double Config::get_double(const std::string& key, double fallback) {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    resolved_[key] = format_double(fallback);
    return fallback;
  }
  const std::string& s = it->second;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError("config key " + key + ": expected a number, got '" + s + "'");
  resolved_[key] = format_double(v);
  return v;
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) {
  const std::string s = raw(key, std::to_string(fallback));
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("config key " + key + ": expected an integer, got '" + s + "'");
  return v;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) {
  const std::string s = raw(key, std::to_string(fallback));
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("config key " + key + ": expected an unsigned integer, got '" + s + "'");
  return v;
}

bool Config::get_bool(const std::string& key, bool fallback) {
  const std::string s = raw(key, fallback ? "true" : "false");
  if (s == "true") return true;
  if (s == "false") return false;
  throw ConfigError("config key " + key + ": expected true or false, got '" + s + "'");
}

std::vector<std::int64_t> Config::get_int_list(const std::string& key,
                                               const std::vector<std::int64_t>& fallback) {
  std::string def;
  for (std::size_t i = 0; i < fallback.size(); ++i) def += (i ? "," : "") + std::to_string(fallback[i]);
  const std::string s = raw(key, def);
  std::vector<std::int64_t> out;
  std::string_view rest = s;
  while (!trim(rest).empty()) {
    const auto comma = rest.find(',');
    const auto item = trim(rest.substr(0, comma));
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size())
      throw ConfigError("config key " + key + ": expected a list of integers, got '" + s + "'");
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

std::vector<std::string> Config::unused() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_)
    if (!resolved_.contains(k)) out.push_back(k);
  return out;
}

}  // namespace mycelogic
