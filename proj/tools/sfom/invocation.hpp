#pragma once

// A resolved command-line run: subcommand, every option with defaults filled
// in, the configuration text and the seed. Handlers read options through the
// typed getters and write artifacts through OutputDir, which records digests
// of everything read and written for the manifest.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "sfom/config.hpp"

namespace sfom::cli {

using Json = nlohmann::ordered_json;

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kIo = 3,
  kComputation = 4,
  kCheckFailed = 5,
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised after all outputs are written when a reproduction check fails.
class CheckFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Invocation {
  std::string command;
  std::map<std::string, std::string> options;
  std::optional<std::string> config_text;
  std::uint64_t seed = 1;
  std::string format = "csv";

  const std::string& text(const std::string& name) const;
  bool has(const std::string& name) const { return !text(name).empty(); }
  double number(const std::string& name) const;
  std::size_t count(const std::string& name) const;
  std::vector<double> numbers(const std::string& name) const;  // comma separated
  std::pair<double, double> band(const std::string& name) const;  // lo:hi

  /// Parsed configuration; throws UsageError when the subcommand needs one
  /// and none was given.
  RunConfig config() const;
};

std::string sha256_hex(std::string_view data);

struct FileDigest {
  std::string path;
  std::string sha256;
};

class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path dir);

  const std::filesystem::path& path() const { return dir_; }

  /// Reads an input file whole and records its digest.
  std::string read_input(const std::filesystem::path& file);
  void write(const std::string& name, const std::string& content);
  void write_json(const std::string& name, const Json& value);
  void write_table(const std::string& name, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows, const std::string& format);

  const std::vector<FileDigest>& inputs() const { return inputs_; }
  const std::vector<FileDigest>& outputs() const { return outputs_; }

 private:
  std::filesystem::path dir_;
  std::vector<FileDigest> inputs_;
  std::vector<FileDigest> outputs_;
};

/// NaN and infinities become null.
Json number_or_null(double v);

}  // namespace sfom::cli
