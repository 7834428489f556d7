#pragma once

// Flat key=value config files with [section] headers, '#'/';' comments.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace vida {

class ConfigFile {
 public:
  static ConfigFile parse(std::string_view text);
  static ConfigFile parse_file(const std::string& path);  // throws on I/O error

  bool has(const std::string& section, const std::string& key) const;
  // Throws std::invalid_argument (with "section.key" in the message) on a
  // missing key without default or an unparsable value.
  std::string get(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback) const;
  std::int64_t get_int(const std::string& section, const std::string& key,
                       std::int64_t fallback) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key,
                        std::uint64_t fallback) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  bool get_bool(const std::string& section, const std::string& key,
                bool fallback) const;
  // Comma-separated unsigned list.
  std::vector<std::uint32_t> get_u32_list(const std::string& section,
                                          const std::string& key) const;

  const std::map<std::string, std::map<std::string, std::string>>& sections() const {
    return sections_;
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

}  // namespace vida
