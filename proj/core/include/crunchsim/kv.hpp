#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace crunchsim {

/// Flat key=value text. '#' starts a comment; blank lines ignored. Keys and
/// values are trimmed. Duplicate keys: last one wins.
std::map<std::string, std::string> parse_kv(const std::string& text);
std::map<std::string, std::string> read_kv_file(const std::string& path);

double kv_double(const std::map<std::string, std::string>& kv, const std::string& key,
                 double fallback);
uint64_t kv_u64(const std::map<std::string, std::string>& kv, const std::string& key,
                uint64_t fallback);
std::string kv_string(const std::map<std::string, std::string>& kv, const std::string& key,
                      const std::string& fallback);

}  // namespace crunchsim
