#pragma once

// Run manifest written next to every set of outputs, and the replay that
// re-executes a run from it.

#include <filesystem>

#include "invocation.hpp"

namespace sfom::cli {

struct Manifest {
  Invocation invocation;
  std::string version;
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;
  double wall_clock_s = 0.0;
};

Json to_json(const Manifest& m);
/// Throws UsageError on a malformed manifest.
Manifest manifest_from_json(const Json& j);

Manifest read_manifest(const std::filesystem::path& path);

}  // namespace sfom::cli
