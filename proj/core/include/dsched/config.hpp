#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace dsched {

// Flat key=value configuration with dotted sections, e.g.
//   mode=adversarial
//   scenario.p=0.3
//   frame.class.0.user=0
// '#' starts a comment; blank lines are ignored; lists are comma separated
// and integer ranges may be written lo..hi.
class Config {
 public:
  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  bool has(const std::string& key) const;
  std::string get(const std::string& key) const;  // throws if missing
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  int integer(const std::string& key) const;
  int integer_or(const std::string& key, int fallback) const;
  bool flag_or(const std::string& key, bool fallback) const;

  std::vector<std::string> list(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;
  // Comma list of integers with lo..hi range expansion.
  std::vector<std::uint64_t> seeds(const std::string& key) const;

  // Keys under prefix "p.": distinct next components, sorted. Used to
  // enumerate numbered sections like frame.class.<i>.
  std::vector<std::string> children(const std::string& prefix) const;

  const std::map<std::string, std::string>& entries() const { return map_; }
  void set(const std::string& key, const std::string& value);

 private:
  std::map<std::string, std::string> map_;
};

}  // namespace dsched
