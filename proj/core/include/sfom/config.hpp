#pragma once

// Flat `key = value` configuration text. One key per line, `#` starts a
// comment, every recognised key must appear once, unknown keys are rejected.
// Doubles are written in shortest round-trip form so parse(format(c)) == c.

#include <cstdint>
#include <stdexcept>
#include <filesystem>
#include <string>
#include <string_view>

#include "sfom/model.hpp"

namespace sfom {

struct RunConfig {
  SystemParams params;
  std::uint64_t seed = 1;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// File could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public InvalidParameter {
 public:
  ConfigError(const std::string& key, const std::string& message);
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// `seed` may be omitted (defaults to 1); all other keys are required.
RunConfig parse_config(std::string_view text);
std::string format_config(const RunConfig& config);

RunConfig load_config(const std::filesystem::path& path);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);
/// Strict parse of the whole string; throws InvalidParameter on trailing junk.
double parse_double(std::string_view text);

}  // namespace sfom
