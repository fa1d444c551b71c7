#include "pqslab/sweep/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pqslab::sweep {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool valid_key(const std::string& key) {
  return !key.empty() && std::all_of(key.begin(), key.end(), [](unsigned char c) {
    return std::islower(c) || std::isdigit(c) || c == '_';
  });
}

std::string location(const Config::Entry& e) {
  return e.line > 0 ? e.source + ":" + std::to_string(e.line) : e.source;
}

std::optional<double> parse_double(const std::string& text) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& source) {
  Config cfg;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(line_no);
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_key(key)) throw ConfigError(where + ": invalid key '" + key + "'");
    if (cfg.entries_.count(key) != 0) {
      throw ConfigError(where + ": field '" + key + "' repeats line " + std::to_string(cfg.entries_[key].line));
    }
    cfg.entries_[key] = {value, source, line_no};
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

void Config::set_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "': expected key=value");
  const std::string key = trim(assignment.substr(0, eq));
  if (!valid_key(key)) throw ConfigError("override '" + assignment + "': invalid key '" + key + "'");
  entries_[key] = {trim(assignment.substr(eq + 1)), "override", 0};
}

void Config::set(const std::string& key, const std::string& value) { entries_[key] = {value, "override", 0}; }

bool Config::has(const std::string& key) const { return entries_.count(key) != 0; }

const Config::Entry* Config::find(const std::string& key) {
  auto it = entries_.find(key);
  if (it == entries_.end()) return nullptr;
  used_[key] = true;
  return &it->second;
}

void Config::fail(const std::string& key, const std::string& message) const {
  auto it = entries_.find(key);
  const std::string where = it == entries_.end() ? std::string("config") : location(it->second);
  throw ConfigError(where + ": field '" + key + "': " + message);
}

std::string Config::get_string(const std::string& key, const std::string& fallback) {
  const Entry* e = find(key);
  return e ? e->value : fallback;
}

std::optional<std::string> Config::get_string(const std::string& key) {
  const Entry* e = find(key);
  if (!e) return std::nullopt;
  return e->value;
}

std::optional<double> Config::get_double(const std::string& key) {
  const Entry* e = find(key);
  if (!e) return std::nullopt;
  const auto v = parse_double(e->value);
  if (!v) fail(key, "expected a finite number, got '" + e->value + "'");
  return v;
}

double Config::get_double(const std::string& key, double fallback) {
  const auto v = get_double(key);
  return v ? *v : fallback;
}

long long Config::get_int(const std::string& key, long long fallback) {
  const Entry* e = find(key);
  if (!e) return fallback;
  long long v = 0;
  const char* begin = e->value.data();
  const char* end = begin + e->value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) fail(key, "expected an integer, got '" + e->value + "'");
  return v;
}

bool Config::get_bool(const std::string& key, bool fallback) {
  const Entry* e = find(key);
  if (!e) return fallback;
  if (e->value == "true" || e->value == "1" || e->value == "yes" || e->value == "on") return true;
  if (e->value == "false" || e->value == "0" || e->value == "no" || e->value == "off") return false;
  fail(key, "expected a boolean, got '" + e->value + "'");
}

std::vector<double> Config::get_double_list(const std::string& key, const std::vector<double>& fallback) {
  const Entry* e = find(key);
  if (!e) return fallback;
  std::vector<double> out;
  std::stringstream ss(e->value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto v = parse_double(trim(item));
    if (!v) fail(key, "list item '" + trim(item) + "' is not a finite number");
    out.push_back(*v);
  }
  if (out.empty()) fail(key, "list is empty");
  return out;
}

std::string Config::get_choice(const std::string& key, const std::string& fallback,
                               const std::vector<std::string>& allowed) {
  const std::string v = get_string(key, fallback);
  if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : "|") + a;
    fail(key, "expected one of " + list + ", got '" + v + "'");
  }
  return v;
}

void Config::reject_unused() const {
  for (const auto& [key, entry] : entries_) {
    if (used_.count(key) == 0) throw ConfigError(location(entry) + ": field '" + key + "': unknown key");
  }
}

}  // namespace pqslab::sweep
