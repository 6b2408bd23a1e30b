#pragma once

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

namespace heatlab {

/// Declarative run configuration: "[section]" headers over "key = value"
/// lines, '#' comments. Every key is validated against the published schema
/// before any compute starts; unknown sections or keys are rejected.
class Config {
 public:
  using Section = std::map<std::string, std::string>;

  static Config parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("config: cannot open " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse(buf.str());
  }

  static Config parse(const std::string& text) {
    Config cfg;
    std::istringstream is(text);
    std::string line, section = "global";
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw std::runtime_error("config: malformed section at line " + std::to_string(lineno));
        section = trim(line.substr(1, line.size() - 2));
        cfg.sections_[section];
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error("config: expected key = value at line " + std::to_string(lineno));
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) throw std::runtime_error("config: empty key at line " + std::to_string(lineno));
      cfg.sections_[section][key] = value;
    }
    return cfg;
  }

  bool has_section(const std::string& name) const { return sections_.count(name) > 0; }

  const Section& section(const std::string& name) const {
    static const Section empty;
    auto it = sections_.find(name);
    return it == sections_.end() ? empty : it->second;
  }

  std::string get(const std::string& section_name, const std::string& key,
                  const std::string& fallback) const {
    const Section& s = section(section_name);
    auto it = s.find(key);
    return it == s.end() ? fallback : it->second;
  }

  double get_double(const std::string& section_name, const std::string& key, double fallback) const {
    const Section& s = section(section_name);
    auto it = s.find(key);
    if (it == s.end()) return fallback;
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size())
      throw std::runtime_error("config: bad number for " + section_name + "." + key);
    return v;
  }

  long get_int(const std::string& section_name, const std::string& key, long fallback) const {
    const Section& s = section(section_name);
    auto it = s.find(key);
    if (it == s.end()) return fallback;
    std::size_t pos = 0;
    const long v = std::stol(it->second, &pos);
    if (pos != it->second.size())
      throw std::runtime_error("config: bad integer for " + section_name + "." + key);
    return v;
  }

  bool get_bool(const std::string& section_name, const std::string& key, bool fallback) const {
    const Section& s = section(section_name);
    auto it = s.find(key);
    if (it == s.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw std::runtime_error("config: bad boolean for " + section_name + "." + key);
  }

  /// Reject unknown sections/keys. `schema` maps section name to its key set;
  /// a section named "experiment:*" in the schema covers every experiment
  /// section.
  void validate(const std::map<std::string, std::set<std::string>>& schema) const {
    for (const auto& [name, body] : sections_) {
      std::string schema_name = name;
      if (!schema.count(schema_name) && name.rfind("experiment:", 0) == 0)
        schema_name = "experiment:*";
      auto it = schema.find(schema_name);
      if (it == schema.end()) throw std::runtime_error("config: unknown section [" + name + "]");
      for (const auto& [key, value] : body) {
        (void)value;
        if (!it->second.count(key))
          throw std::runtime_error("config: unknown key '" + key + "' in section [" + name + "]");
      }
    }
  }

  const std::map<std::string, Section>& sections() const { return sections_; }

 private:
  static std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
  }

  std::map<std::string, Section> sections_;
};

}  // namespace heatlab
