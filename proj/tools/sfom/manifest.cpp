#include "manifest.hpp"

#include <fstream>
#include <sstream>

namespace sfom::cli {

namespace {

Json digests(const std::vector<FileDigest>& files, const char* key) {
  Json array = Json::array();
  for (const auto& f : files) array.push_back({{key, f.path}, {"sha256", f.sha256}});
  return array;
}

std::vector<FileDigest> digests_from(const Json& array, const char* key) {
  std::vector<FileDigest> out;
  for (const auto& item : array) out.push_back({item.at(key).get<std::string>(), item.at("sha256").get<std::string>()});
  return out;
}

}  // namespace

Json to_json(const Manifest& m) {
  const auto& inv = m.invocation;
  Json options = Json::object();
  for (const auto& [k, v] : inv.options) options[k] = v;
  Json j;
  j["tool"] = "sfom";
  j["version"] = m.version;
  j["subcommand"] = inv.command;
  j["options"] = std::move(options);
  j["format"] = inv.format;
  j["seed"] = inv.seed;
  j["config"] = inv.config_text ? Json(*inv.config_text) : Json(nullptr);
  j["inputs"] = digests(m.inputs, "path");
  j["outputs"] = digests(m.outputs, "file");
  j["wall_clock_s"] = m.wall_clock_s;
  return j;
}

Manifest manifest_from_json(const Json& j) {
  try {
    Manifest m;
    m.version = j.at("version").get<std::string>();
    m.invocation.command = j.at("subcommand").get<std::string>();
    for (const auto& [k, v] : j.at("options").items()) m.invocation.options[k] = v.get<std::string>();
    m.invocation.format = j.at("format").get<std::string>();
    m.invocation.seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("config").is_null()) m.invocation.config_text = j.at("config").get<std::string>();
    m.inputs = digests_from(j.at("inputs"), "path");
    m.outputs = digests_from(j.at("outputs"), "file");
    m.wall_clock_s = j.at("wall_clock_s").get<double>();
    return m;
  } catch (const Json::exception& e) {
    throw UsageError(std::string("malformed manifest: ") + e.what());
  }
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  Json j;
  try {
    j = Json::parse(s.str());
  } catch (const Json::parse_error& e) {
    throw UsageError(std::string("manifest is not JSON: ") + e.what());
  }
  return manifest_from_json(j);
}

}  // namespace sfom::cli
