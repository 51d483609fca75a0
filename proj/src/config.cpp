#include "pexmap/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pexmap/errors.hpp"

namespace pexmap {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

JobConfig JobConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

JobConfig JobConfig::parse_string(const std::string& text) {
  JobConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": empty key");
    if (cfg.entries_.count(key))
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": duplicate key '" + key + "' (first at line " +
                        std::to_string(cfg.lines_.at(key)) + ")");
    cfg.entries_[key] = value;
    cfg.lines_[key] = lineno;
  }
  return cfg;
}

bool JobConfig::has(const std::string& key) const {
  return entries_.count(key) != 0;
}

const std::string& JobConfig::require(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end())
    throw ConfigError("config: missing required key '" + key + "'");
  return it->second;
}

std::string JobConfig::get(const std::string& key,
                           const std::string& fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double JobConfig::get_double(const std::string& key, double fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  char* end = nullptr;
  double v = std::strtod(it->second.c_str(), &end);
  if (end == it->second.c_str() || *end != '\0')
    throw ConfigError("config line " + std::to_string(lines_.at(key)) +
                      ": key '" + key + "' is not a number");
  return v;
}

int JobConfig::get_int(const std::string& key, int fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  char* end = nullptr;
  long v = std::strtol(it->second.c_str(), &end, 10);
  if (end == it->second.c_str() || *end != '\0')
    throw ConfigError("config line " + std::to_string(lines_.at(key)) +
                      ": key '" + key + "' is not an integer");
  return static_cast<int>(v);
}

void JobConfig::check_known(const std::set<std::string>& allowed) const {
  for (const auto& [key, _] : entries_)
    if (!allowed.count(key))
      throw ConfigError("config line " + std::to_string(lines_.at(key)) +
                        ": unknown key '" + key + "'");
}

std::map<std::string, std::string> JobConfig::subset(
    const std::set<std::string>& keys) const {
  std::map<std::string, std::string> out;
  for (const auto& [key, value] : entries_)
    if (keys.count(key)) out[key] = value;
  return out;
}

}  // namespace pexmap
