#include "invocation.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "sfom/csv.hpp"

namespace sfom::cli {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

const std::string& Invocation::text(const std::string& name) const {
  const auto it = options.find(name);
  if (it == options.end()) throw std::logic_error("option --" + name + " is not defined for " + command);
  return it->second;
}

double Invocation::number(const std::string& name) const {
  const auto& t = text(name);
  if (t.empty()) throw UsageError("--" + name + " is required");
  try {
    return parse_double(t);
  } catch (const InvalidParameter&) {
    throw UsageError("--" + name + ": '" + t + "' is not a number");
  }
}

std::size_t Invocation::count(const std::string& name) const {
  const double v = number(name);
  if (!(v >= 1.0) || v != std::floor(v) || v > 1e12) throw UsageError("--" + name + " must be a positive integer");
  return static_cast<std::size_t>(v);
}

std::vector<double> Invocation::numbers(const std::string& name) const {
  std::vector<double> out;
  for (const auto& item : split(text(name), ',')) {
    try {
      out.push_back(parse_double(item));
    } catch (const InvalidParameter&) {
      throw UsageError("--" + name + ": '" + item + "' is not a number");
    }
  }
  return out;
}

std::pair<double, double> Invocation::band(const std::string& name) const {
  const auto parts = split(text(name), ':');
  if (parts.size() != 2) throw UsageError("--" + name + " expects lo:hi");
  try {
    const double lo = parse_double(parts[0]), hi = parse_double(parts[1]);
    if (!(hi > lo)) throw UsageError("--" + name + ": hi must exceed lo");
    return {lo, hi};
  } catch (const InvalidParameter&) {
    throw UsageError("--" + name + " expects two numbers lo:hi");
  }
}

RunConfig Invocation::config() const {
  if (!config_text) throw UsageError(command + " needs --config");
  return parse_config(*config_text);
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xF]);
  }
  return out;
}

OutputDir::OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
}

std::string OutputDir::read_input(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open " + file.string());
  std::ostringstream s;
  s << in.rdbuf();
  std::string content = s.str();
  inputs_.push_back({std::filesystem::absolute(file).lexically_normal().string(), sha256_hex(content)});
  return content;
}

void OutputDir::write(const std::string& name, const std::string& content) {
  const auto target = dir_ / name;
  std::ofstream out(target, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + target.string());
  out << content;
  out.close();
  if (!out) throw IoError("error writing " + target.string());
  outputs_.push_back({name, sha256_hex(content)});
}

void OutputDir::write_json(const std::string& name, const Json& value) { write(name, value.dump(2) + "\n"); }

void OutputDir::write_table(const std::string& name, const std::vector<std::string>& header,
                            const std::vector<std::vector<double>>& rows, const std::string& format) {
  if (format == "json") {
    Json array = Json::array();
    for (const auto& row : rows) {
      Json obj = Json::object();
      for (std::size_t i = 0; i < header.size(); ++i) obj[header[i]] = number_or_null(row[i]);
      array.push_back(std::move(obj));
    }
    write_json(name + ".json", array);
    return;
  }
  std::ostringstream s;
  write_csv(s, header, rows);
  write(name + ".csv", s.str());
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace sfom::cli
