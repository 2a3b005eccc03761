#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "roughpde/errors.hpp"

namespace rpde {

/// Flat run manifest.  Serialized as TOML with sections [grid], [partition],
/// [sheet], [problem] and [tolerances]; unknown keys are rejected and the
/// round trip through to_toml()/parse is lossless.
struct RunManifest {
  std::string command = "run";  // run | audit | sweep
  std::string scenario = "heat";
  std::string output_dir = "out";

  int grid_d = 1;
  int grid_n = 128;

  double horizon = 1.0;
  int steps = 256;
  int level = 0;

  std::string sheet_kind = "linear";  // linear | sigma_rp | fbm
  double amplitude = 0.3;
  double hurst = 0.45;
  std::uint64_t seed = 7;
  int sheet_level = 6;
  std::string convention = "half";  // audit-only: half | nohalf

  double diffusion = 1.0;
  double velocity = 0.3;
  double forcing = 0.1;
  double datum_scale = 1.0;
  std::string beta = "square";
  bool trivial_case = false;
  bool smooth_input = false;

  std::map<std::string, double> tolerances;

  static RunManifest parse_file(const std::string& path);
  static RunManifest parse_string(const std::string& text);
  std::string to_toml() const;

  /// FNV-1a of the canonical serialization, as 16 hex digits.
  std::string digest() const;

  double tolerance(const std::string& name, double fallback) const;
};

std::string fnv1a_hex(const std::string& text);

}  // namespace rpde
