#include "sfom/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace sfom {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct Field {
  std::string_view key;
  std::function<double(const RunConfig&)> get;
  std::function<void(RunConfig&, double)> set;
};

// Key order here is the canonical output order.
const std::array<Field, 13>& fields() {
  static const std::array<Field, 13> table = {{
      {"omega_m_hz", [](const RunConfig& c) { return c.params.mode.omega_m.hz(); },
       [](RunConfig& c, double v) { c.params.mode.omega_m = Frequency::from_hz(v); }},
      {"gamma_m_hz", [](const RunConfig& c) { return c.params.mode.gamma_m.hz(); },
       [](RunConfig& c, double v) { c.params.mode.gamma_m = Frequency::from_hz(v); }},
      {"m_eff_kg", [](const RunConfig& c) { return c.params.mode.m_eff; },
       [](RunConfig& c, double v) { c.params.mode.m_eff = v; }},
      {"temperature_k", [](const RunConfig& c) { return c.params.mode.temperature; },
       [](RunConfig& c, double v) { c.params.mode.temperature = v; }},
      {"kappa_in_hz", [](const RunConfig& c) { return c.params.cavity.kappa_in.hz(); },
       [](RunConfig& c, double v) { c.params.cavity.kappa_in = Frequency::from_hz(v); }},
      {"kappa_0_hz", [](const RunConfig& c) { return c.params.cavity.kappa_0.hz(); },
       [](RunConfig& c, double v) { c.params.cavity.kappa_0 = Frequency::from_hz(v); }},
      {"detuning_over_kappa", [](const RunConfig& c) { return c.params.cavity.detuning_over_kappa; },
       [](RunConfig& c, double v) { c.params.cavity.detuning_over_kappa = v; }},
      {"power_w", [](const RunConfig& c) { return c.params.drive.power; },
       [](RunConfig& c, double v) { c.params.drive.power = v; }},
      {"wavelength_m", [](const RunConfig& c) { return c.params.drive.wavelength; },
       [](RunConfig& c, double v) { c.params.drive.wavelength = v; }},
      {"g_hz_per_m", [](const RunConfig& c) { return c.params.coupling.g_hz_per_m; },
       [](RunConfig& c, double v) { c.params.coupling.g_hz_per_m = v; }},
      {"beta", [](const RunConfig& c) { return c.params.coupling.beta; },
       [](RunConfig& c, double v) { c.params.coupling.beta = v; }},
      {"absorption", [](const RunConfig& c) { return c.params.coupling.absorption; },
       [](RunConfig& c, double v) { c.params.coupling.absorption = v; }},
      {"tau_t_s", [](const RunConfig& c) { return c.params.coupling.tau_t; },
       [](RunConfig& c, double v) { c.params.coupling.tau_t = v; }},
  }};
  return table;
}

constexpr std::string_view kSeedKey = "seed";

}  // namespace

ConfigError::ConfigError(const std::string& key, const std::string& message)
    : InvalidParameter("config key '" + key + "': " + message), key_(key) {}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw InvalidParameter("cannot format double");
  return std::string(buf.data(), end);
}

double parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size() || text.empty()) {
    throw InvalidParameter("not a number: '" + std::string(text) + "'");
  }
  return value;
}

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  std::map<std::string, bool, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(std::string(line), "line " + std::to_string(line_no) + " has no '='");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (seen.contains(key)) throw ConfigError(key, "duplicate key");
    seen[key] = true;

    if (key == kSeedKey) {
      std::uint64_t seed = 0;
      const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), seed);
      if (ec != std::errc{} || end != value.data() + value.size() || value.empty()) {
        throw ConfigError(key, "expected an unsigned 64-bit integer");
      }
      config.seed = seed;
      continue;
    }

    const Field* field = nullptr;
    for (const auto& f : fields()) {
      if (f.key == key) field = &f;
    }
    if (field == nullptr) throw ConfigError(key, "unknown key");
    try {
      field->set(config, parse_double(value));
    } catch (const ConfigError&) {
      throw;
    } catch (const InvalidParameter& e) {
      throw ConfigError(key, e.what());
    }
  }

  for (const auto& f : fields()) {
    if (!seen.contains(f.key)) throw ConfigError(std::string(f.key), "missing");
  }
  config.params.validate();
  return config;
}

std::string format_config(const RunConfig& config) {
  std::string out;
  for (const auto& f : fields()) {
    out += f.key;
    out += " = ";
    out += format_double(f.get(config));
    out += '\n';
  }
  out += kSeedKey;
  out += " = ";
  out += std::to_string(config.seed);
  out += '\n';
  return out;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace sfom
