#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace eprop {

// Flat dotted-key configuration. Files use "key = value" lines with
// optional [section] headers, which prefix keys as "section.key".
class Config {
 public:
  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  void set(const std::string& key, const std::string& value) { items_[key] = value; }
  bool has(const std::string& key) const { return items_.count(key) != 0; }

  std::string get_string(const std::string& key, const std::string& def) const;
  double get_double(const std::string& key, double def) const;
  std::int64_t get_int(const std::string& key, std::int64_t def) const;
  bool get_bool(const std::string& key, bool def) const;
  std::vector<std::int64_t> get_int_list(const std::string& key,
                                         const std::vector<std::int64_t>& def) const;

  // Keys present in `other` replace ours.
  void merge(const Config& other);

  const std::map<std::string, std::string>& items() const { return items_; }
  std::string to_string() const;

 private:
  std::map<std::string, std::string> items_;
};

}  // namespace eprop
