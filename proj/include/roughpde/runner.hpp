#pragma once

#include <string>
#include <vector>

#include "roughpde/experiments.hpp"
#include "roughpde/manifest.hpp"

namespace rpde {

struct RunOutcome {
  int status = 0;  // 0 pass, 2 experiment fail; config errors throw
  std::string summary;
  ExperimentReport report;
};

/// Executes a run/audit manifest and writes its artifacts (report CSV,
/// headline CSV, summary.txt, plus trajectory CSV/PGM for field-producing
/// scenarios) under the manifest's output directory.  The ROUGHPDE_OUT
/// environment variable overrides the output root.
RunOutcome run_manifest(const RunManifest& m);

/// Runs one child per axis value in a bounded worker pool and aggregates the
/// headline numbers into sweep.csv keyed by the axis.
RunOutcome sweep_manifest(const RunManifest& base, const std::string& axis,
                          const std::vector<std::string>& values);

/// Resolves the effective output directory (ROUGHPDE_OUT root override).
std::string resolve_output_dir(const RunManifest& m);

/// Sets a manifest key (TOML path like "partition.steps") from a string.
void set_manifest_key(RunManifest& m, const std::string& key, const std::string& value);

}  // namespace rpde
