#include "dsched/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace dsched {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("Config: cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_string(buffer.str());
}

Config Config::from_string(const std::string& text) {
  Config config;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("Config: missing '=' on line " +
                               std::to_string(line_no));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error("Config: empty key on line " +
                               std::to_string(line_no));
    config.map_[key] = value;
  }
  return config;
}

bool Config::has(const std::string& key) const { return map_.count(key) > 0; }

std::string Config::get(const std::string& key) const {
  const auto it = map_.find(key);
  if (it == map_.end()) throw std::runtime_error("Config: missing key " + key);
  return it->second;
}

std::string Config::get_or(const std::string& key,
                           const std::string& fallback) const {
  const auto it = map_.find(key);
  return it == map_.end() ? fallback : it->second;
}

double Config::number(const std::string& key) const {
  const std::string raw = get(key);
  size_t used = 0;
  const double value = std::stod(raw, &used);
  if (used != raw.size())
    throw std::runtime_error("Config: bad number for " + key + ": " + raw);
  return value;
}

double Config::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

int Config::integer(const std::string& key) const {
  const std::string raw = get(key);
  size_t used = 0;
  const int value = std::stoi(raw, &used);
  if (used != raw.size())
    throw std::runtime_error("Config: bad integer for " + key + ": " + raw);
  return value;
}

int Config::integer_or(const std::string& key, int fallback) const {
  return has(key) ? integer(key) : fallback;
}

bool Config::flag_or(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string raw = get(key);
  if (raw == "true" || raw == "1" || raw == "yes") return true;
  if (raw == "false" || raw == "0" || raw == "no") return false;
  throw std::runtime_error("Config: bad flag for " + key + ": " + raw);
}

std::vector<std::string> Config::list(const std::string& key) const {
  std::vector<std::string> out;
  std::istringstream in(get(key));
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> Config::numbers(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : list(key)) out.push_back(std::stod(item));
  return out;
}

std::vector<std::uint64_t> Config::seeds(const std::string& key) const {
  std::vector<std::uint64_t> out;
  for (const auto& item : list(key)) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(std::stoull(item));
    } else {
      const std::uint64_t lo = std::stoull(item.substr(0, dots));
      const std::uint64_t hi = std::stoull(item.substr(dots + 2));
      if (hi < lo) throw std::runtime_error("Config: bad seed range " + item);
      for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
    }
  }
  return out;
}

std::vector<std::string> Config::children(const std::string& prefix) const {
  std::set<std::string> names;
  const std::string want = prefix + ".";
  for (const auto& [key, value] : map_) {
    if (key.rfind(want, 0) != 0) continue;
    const std::string rest = key.substr(want.size());
    const auto dot = rest.find('.');
    names.insert(dot == std::string::npos ? rest : rest.substr(0, dot));
  }
  return {names.begin(), names.end()};
}

void Config::set(const std::string& key, const std::string& value) {
  map_[key] = value;
}

}  // namespace dsched
