// sfom: command-line front end. Every run writes its outputs and a
// manifest.json into --out; `sfom replay --manifest FILE` re-runs a manifest
// and reports whether the outputs are byte-identical.
//
// Exit codes: 0 success, 2 usage, 3 I/O, 4 computation, 5 check failed or
// replay mismatch. Failures print one JSON object on stderr.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "manifest.hpp"
#include "sfom/least_squares.hpp"
#include "sfom/superfluid.hpp"

namespace fs = std::filesystem;
using namespace sfom;
using namespace sfom::cli;

namespace {

#ifndef SFOM_VERSION
#define SFOM_VERSION "0.0.0"
#endif

struct ParsedCommand {
  const CommandSpec* spec = nullptr;
  CLI::App* app = nullptr;
  std::map<std::string, std::string> values;
  std::string config_path;
  std::string seed;
  std::string out = ".";
  std::string format = "csv";
};

int fail(int code, const std::string& kind, const std::string& message, const std::string& command,
         const Json& extra = nullptr) {
  Json j{{"error", kind}, {"message", message}, {"exit_code", code}};
  if (!command.empty()) j["subcommand"] = command;
  if (!extra.is_null()) j["detail"] = extra;
  std::cerr << j.dump() << '\n';
  return code;
}

std::uint64_t parse_seed(const std::string& text) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos || text.size() > 20) {
    throw UsageError("--seed must be a non-negative integer, got '" + text + "'");
  }
  try {
    return std::stoull(text);
  } catch (const std::out_of_range&) {
    throw UsageError("--seed out of range");
  }
}

struct RunResult {
  Manifest manifest;
  bool checks_failed = false;
  std::string check_message;
};

RunResult execute(const Invocation& inv, const fs::path& out_dir) {
  const auto* spec = find_command(inv.command);
  if (!spec) throw UsageError("unknown subcommand '" + inv.command + "'");
  OutputDir out(out_dir);
  RunResult result;
  const auto start = std::chrono::steady_clock::now();
  try {
    spec->run(inv, out);
  } catch (const CheckFailed& e) {
    result.checks_failed = true;
    result.check_message = e.what();
  }
  result.manifest.invocation = inv;
  result.manifest.version = SFOM_VERSION;
  result.manifest.inputs = out.inputs();
  result.manifest.outputs = out.outputs();
  result.manifest.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  // The manifest describes the outputs and is not listed among them.
  std::ofstream(out_dir / "manifest.json", std::ios::binary) << to_json(result.manifest).dump(2) << '\n';
  return result;
}

Invocation from_cli(const ParsedCommand& p) {
  Invocation inv;
  inv.command = p.spec->name;
  inv.options = p.values;
  inv.format = p.format;
  if (inv.options.contains("input") && !inv.options["input"].empty()) {
    inv.options["input"] = fs::absolute(inv.options["input"]).lexically_normal().string();
  }
  if (!p.config_path.empty()) {
    if (p.spec->config == ConfigUse::None) throw UsageError(inv.command + " does not take --config");
    std::ifstream in(p.config_path, std::ios::binary);
    if (!in) throw IoError("cannot open config " + p.config_path);
    std::ostringstream s;
    s << in.rdbuf();
    inv.config_text = s.str();
  }
  if (!p.seed.empty()) {
    inv.seed = parse_seed(p.seed);
  } else if (inv.config_text) {
    inv.seed = parse_config(*inv.config_text).seed;
  }
  return inv;
}

int replay(const fs::path& manifest_path, const std::string& out_arg) {
  const auto recorded = read_manifest(manifest_path);
  for (const auto& input : recorded.inputs) {
    std::ifstream in(input.path, std::ios::binary);
    if (!in) throw IoError("manifest input missing: " + input.path);
    std::ostringstream s;
    s << in.rdbuf();
    if (sha256_hex(s.str()) != input.sha256) throw IoError("manifest input changed since the run: " + input.path);
  }
  const fs::path out_dir = out_arg.empty() ? manifest_path.parent_path() / "replay" : fs::path(out_arg);
  // Only the summary goes to stdout; the handler's console report is dropped.
  std::ostringstream console;
  auto* saved = std::cout.rdbuf(console.rdbuf());
  RunResult again;
  try {
    again = execute(recorded.invocation, out_dir);
  } catch (...) {
    std::cout.rdbuf(saved);
    throw;
  }
  std::cout.rdbuf(saved);

  std::map<std::string, std::string> before;
  for (const auto& f : recorded.outputs) before[f.path] = f.sha256;
  Json mismatched = Json::array();
  std::size_t matched = 0;
  for (const auto& f : again.manifest.outputs) {
    const auto it = before.find(f.path);
    if (it == before.end() || it->second != f.sha256) {
      mismatched.push_back(f.path);
    } else {
      ++matched;
    }
  }
  const bool identical = mismatched.empty() && matched == recorded.outputs.size();
  Json report{{"replayed", recorded.invocation.command},
              {"outputs", recorded.outputs.size()},
              {"identical", identical},
              {"mismatched", mismatched}};
  if (recorded.version != SFOM_VERSION) report["recorded_version"] = recorded.version;
  std::cout << report.dump() << '\n';
  return identical ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optomechanics of a superfluid film: backaction, simulation, spectra, tracking and bath models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SFOM_VERSION);

  std::vector<ParsedCommand> parsed;
  parsed.reserve(commands().size());
  for (const auto& spec : commands()) {
    auto& p = parsed.emplace_back();
    p.spec = &spec;
    p.app = app.add_subcommand(spec.name, spec.help);
    for (const auto& opt : spec.options) {
      p.values[opt.name] = opt.fallback;
    }
    for (const auto& opt : spec.options) {
      auto* o = p.app->add_option(opt.positional ? opt.name : "--" + opt.name, p.values[opt.name], opt.help);
      if (opt.required) o->required();
      if (!opt.fallback.empty()) o->capture_default_str();
    }
    if (spec.config != ConfigUse::None) {
      auto* c = p.app->add_option("--config", p.config_path, "system configuration file");
      if (spec.config == ConfigUse::Required) c->required();
    }
    p.app->add_option("--seed", p.seed, "random seed (default: the config's seed, else 1)");
    p.app->add_option("--out", p.out, "output directory")->capture_default_str();
    p.app->add_option("--format", p.format, "tabular output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  }
  std::string manifest_path, replay_out;
  auto* replay_app = app.add_subcommand("replay", "Re-run a manifest and compare outputs byte for byte");
  replay_app->add_option("--manifest", manifest_path, "manifest.json of an earlier run")->required();
  replay_app->add_option("--out", replay_out, "output directory (default: <manifest dir>/replay)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kUsage, "usage", e.what(), "");
  }

  std::string command = "replay";
  try {
    if (replay_app->parsed()) return replay(manifest_path, replay_out);
    for (auto& p : parsed) {
      if (!p.app->parsed()) continue;
      command = p.spec->name;
      const auto inv = from_cli(p);
      const auto result = execute(inv, p.out);
      if (result.checks_failed) return fail(kCheckFailed, "check_failed", result.check_message, command);
      return kOk;
    }
  } catch (const UsageError& e) {
    return fail(kUsage, "usage", e.what(), command);
  } catch (const ConfigError& e) {
    return fail(kUsage, "config", e.what(), command, Json{{"key", e.key()}});
  } catch (const IoError& e) {
    return fail(kIo, "io", e.what(), command);
  } catch (const FitError& e) {
    return fail(kComputation, std::string("fit_") + to_string(e.kind()), e.what(), command,
                Json{{"best_parameters", e.best_params()}});
  } catch (const InstabilityError& e) {
    return fail(kComputation, "instability", e.what(), command);
  } catch (const InvalidParameter& e) {
    return fail(kComputation, "invalid_parameter", e.what(), command);
  } catch (const std::exception& e) {
    return fail(kComputation, "computation", e.what(), command);
  }
  return fail(kUsage, "usage", "no subcommand", "");
}
