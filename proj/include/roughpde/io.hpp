#pragma once

#include <string>
#include <vector>

#include "roughpde/experiments.hpp"

namespace rpde {

/// CSV writer; the first line carries the manifest digest and units so every
/// artifact is self-describing.  Formatting is fixed (%.17g), so identical
/// inputs produce byte-identical files.
void write_csv(const std::string& path, const std::string& digest, const std::string& units,
               const Table& table);

/// Trajectory dump: (t_index, x_index, value).
void write_trajectory_csv(const std::string& path, const std::string& digest,
                          const Trajectory& traj);

/// 8-bit PGM of a time-by-space trajectory plus a sidecar CSV with the
/// value range used for quantization.
void write_trajectory_pgm(const std::string& path_pgm, const std::string& path_range_csv,
                          const std::string& digest, const Trajectory& traj);

void write_text(const std::string& path, const std::string& text);

void ensure_directory(const std::string& path);

}  // namespace rpde
