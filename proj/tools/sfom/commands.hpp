#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "invocation.hpp"

namespace sfom::cli {

struct OptionSpec {
  std::string name;
  std::string fallback;  // empty: no default
  std::string help;
  bool required = false;
  bool positional = false;
};

enum class ConfigUse { None, Optional, Required };

struct CommandSpec {
  std::string name;
  std::string help;
  ConfigUse config = ConfigUse::None;
  std::vector<OptionSpec> options;
  std::function<void(const Invocation&, OutputDir&)> run;
};

const std::vector<CommandSpec>& commands();
const CommandSpec* find_command(std::string_view name);

void run_repro(const Invocation& inv, OutputDir& out);

}  // namespace sfom::cli
