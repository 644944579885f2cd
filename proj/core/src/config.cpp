#include "eprop/config.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <sstream>

#include "eprop/error.hpp"

namespace eprop {

namespace {

Config from_stream(std::istream& is) {
  Config c;
  CLI::ConfigINI parser;
  for (const CLI::ConfigItem& item : parser.from_config(is)) {
    if (item.name == "++" || item.name == "--") continue;
    std::string value;
    for (std::size_t i = 0; i < item.inputs.size(); ++i) {
      if (i) value += ',';
      value += item.inputs[i];
    }
    c.set(item.fullname(), value);
  }
  return c;
}

}  // namespace

Config Config::from_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  return from_stream(is);
}

Config Config::from_string(const std::string& text) {
  std::istringstream is(text);
  return from_stream(is);
}

std::string Config::get_string(const std::string& key, const std::string& def) const {
  auto it = items_.find(key);
  return it == items_.end() ? def : it->second;
}

double Config::get_double(const std::string& key, double def) const {
  auto it = items_.find(key);
  if (it == items_.end()) return def;
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key " + key + " expects a number, got '" + it->second + "'");
  }
}

std::int64_t Config::get_int(const std::string& key, std::int64_t def) const {
  auto it = items_.find(key);
  if (it == items_.end()) return def;
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key " + key + " expects an integer, got '" + it->second + "'");
  }
}

bool Config::get_bool(const std::string& key, bool def) const {
  auto it = items_.find(key);
  if (it == items_.end()) return def;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw ConfigError("key " + key + " expects a boolean, got '" + v + "'");
}

std::vector<std::int64_t> Config::get_int_list(const std::string& key,
                                               const std::vector<std::int64_t>& def) const {
  auto it = items_.find(key);
  if (it == items_.end()) return def;
  std::vector<std::int64_t> out;
  std::istringstream is(it->second);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    if (tok.empty()) continue;
    try {
      out.push_back(std::stoll(tok));
    } catch (const std::exception&) {
      throw ConfigError("key " + key + " expects a list of integers");
    }
  }
  return out;
}

void Config::merge(const Config& other) {
  for (const auto& [k, v] : other.items_) items_[k] = v;
}

std::string Config::to_string() const {
  std::ostringstream os;
  for (const auto& [k, v] : items_) os << k << " = " << v << '\n';
  return os.str();
}

}  // namespace eprop
