#ifndef PEXMAP_CONFIG_HPP
#define PEXMAP_CONFIG_HPP

#include <map>
#include <set>
#include <string>

namespace pexmap {

/// Line-oriented key=value job description.  '#' starts a comment; blank
/// lines are skipped; duplicate keys and malformed lines are ConfigErrors
/// reported with their line number.
class JobConfig {
 public:
  static JobConfig parse_file(const std::string& path);
  static JobConfig parse_string(const std::string& text);

  bool has(const std::string& key) const;
  const std::string& require(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;

  /// Rejects any key outside `allowed` (strict parsing).
  void check_known(const std::set<std::string>& allowed) const;

  /// Subset of entries whose keys are in `keys`, for parse_map_spec.
  std::map<std::string, std::string> subset(
      const std::set<std::string>& keys) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
  std::map<std::string, int> lines_;
};

}  // namespace pexmap

#endif
