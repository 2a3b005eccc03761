#include "roughpde/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace rpde {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

// minimal flat TOML: [section] headers, key = value with string / number /
// boolean values
std::map<std::string, std::string> parse_flat_toml(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("manifest line " + std::to_string(lineno) + ": malformed section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("manifest line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("manifest line " + std::to_string(lineno) + ": empty key or value");
    std::string full = section.empty() ? key : section + "." + key;
    if (out.count(full))
      throw ConfigError("manifest: duplicate key " + full);
    out[full] = value;
  }
  return out;
}

std::string unquote(const std::string& key, const std::string& raw) {
  if (raw.size() < 2 || raw.front() != '"' || raw.back() != '"')
    throw ConfigError("manifest key " + key + ": expected a quoted string");
  return raw.substr(1, raw.size() - 2);
}

double to_number(const std::string& key, const std::string& raw) {
  if (raw == "inf") return INFINITY;
  try {
    std::size_t used = 0;
    double v = std::stod(raw, &used);
    if (used != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("manifest key " + key + ": expected a number, got '" + raw + "'");
  }
}

bool to_bool(const std::string& key, const std::string& raw) {
  if (raw == "true") return true;
  if (raw == "false") return false;
  throw ConfigError("manifest key " + key + ": expected true or false");
}

std::string fmt(double v) {
  char buf[40];
  if (std::isinf(v)) return "inf";
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    std::snprintf(buf, sizeof buf, "%.1f", v);
  } else {
    std::snprintf(buf, sizeof buf, "%.17g", v);
  }
  return buf;
}

}  // namespace

RunManifest RunManifest::parse_string(const std::string& text) {
  auto kv = parse_flat_toml(text);
  RunManifest m;
  m.tolerances.clear();

  auto take = [&kv](const std::string& key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  auto str = [&](const std::string& key, std::string& dst) {
    if (const auto* raw = take(key)) dst = unquote(key, *raw);
  };
  auto num = [&](const std::string& key, auto& dst) {
    if (const auto* raw = take(key)) dst = static_cast<std::decay_t<decltype(dst)>>(to_number(key, *raw));
  };
  auto flag = [&](const std::string& key, bool& dst) {
    if (const auto* raw = take(key)) dst = to_bool(key, *raw);
  };

  str("command", m.command);
  str("scenario", m.scenario);
  str("output_dir", m.output_dir);
  num("grid.d", m.grid_d);
  num("grid.n", m.grid_n);
  num("partition.horizon", m.horizon);
  num("partition.steps", m.steps);
  num("partition.level", m.level);
  str("sheet.kind", m.sheet_kind);
  num("sheet.amplitude", m.amplitude);
  num("sheet.hurst", m.hurst);
  num("sheet.seed", m.seed);
  num("sheet.level", m.sheet_level);
  str("sheet.convention", m.convention);
  num("problem.diffusion", m.diffusion);
  num("problem.velocity", m.velocity);
  num("problem.forcing", m.forcing);
  num("problem.datum_scale", m.datum_scale);
  str("problem.beta", m.beta);
  flag("problem.trivial_case", m.trivial_case);
  flag("problem.smooth_input", m.smooth_input);

  static const std::vector<std::string> known = {
      "command",           "scenario",          "output_dir",       "grid.d",
      "grid.n",            "partition.horizon", "partition.steps",  "partition.level",
      "sheet.kind",        "sheet.amplitude",   "sheet.hurst",      "sheet.seed",
      "sheet.level",       "sheet.convention",  "problem.diffusion", "problem.velocity",
      "problem.forcing",   "problem.datum_scale", "problem.beta",   "problem.trivial_case",
      "problem.smooth_input"};
  for (const auto& [key, raw] : kv) {
    if (key.rfind("tolerances.", 0) == 0) {
      m.tolerances[key.substr(11)] = to_number(key, raw);
      continue;
    }
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("manifest: unknown key " + key);
  }

  if (m.command != "run" && m.command != "audit" && m.command != "sweep")
    throw ConfigError("manifest: command must be run, audit or sweep");
  if (m.scenario.empty()) throw ConfigError("manifest: scenario is required");
  return m;
}

RunManifest RunManifest::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("manifest: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str());
}

std::string RunManifest::to_toml() const {
  std::ostringstream out;
  out << "command = \"" << command << "\"\n";
  out << "scenario = \"" << scenario << "\"\n";
  out << "output_dir = \"" << output_dir << "\"\n\n";
  out << "[grid]\n";
  out << "d = " << grid_d << "\n";
  out << "n = " << grid_n << "\n\n";
  out << "[partition]\n";
  out << "horizon = " << fmt(horizon) << "\n";
  out << "steps = " << steps << "\n";
  out << "level = " << level << "\n\n";
  out << "[sheet]\n";
  out << "kind = \"" << sheet_kind << "\"\n";
  out << "amplitude = " << fmt(amplitude) << "\n";
  out << "hurst = " << fmt(hurst) << "\n";
  out << "seed = " << seed << "\n";
  out << "level = " << sheet_level << "\n";
  out << "convention = \"" << convention << "\"\n\n";
  out << "[problem]\n";
  out << "diffusion = " << fmt(diffusion) << "\n";
  out << "velocity = " << fmt(velocity) << "\n";
  out << "forcing = " << fmt(forcing) << "\n";
  out << "datum_scale = " << fmt(datum_scale) << "\n";
  out << "beta = \"" << beta << "\"\n";
  out << "trivial_case = " << (trivial_case ? "true" : "false") << "\n";
  out << "smooth_input = " << (smooth_input ? "true" : "false") << "\n";
  if (!tolerances.empty()) {
    out << "\n[tolerances]\n";
    for (const auto& [k, v] : tolerances) out << k << " = " << fmt(v) << "\n";
  }
  return out.str();
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::string RunManifest::digest() const { return fnv1a_hex(to_toml()); }

double RunManifest::tolerance(const std::string& name, double fallback) const {
  auto it = tolerances.find(name);
  return it == tolerances.end() ? fallback : it->second;
}

}  // namespace rpde
