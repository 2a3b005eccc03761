#include "roughpde/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace rpde {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  return out;
}

}  // namespace

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw ConfigError("cannot create output directory " + path);
}

void write_csv(const std::string& path, const std::string& digest, const std::string& units,
               const Table& table) {
  auto out = open_out(path);
  out << "# manifest_digest=" << digest << " units=" << units << "\n";
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    out << table.columns[c] << (c + 1 == table.columns.size() ? "\n" : ",");
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c)
      out << num(row[c]) << (c + 1 == row.size() ? "\n" : ",");
  }
}

void write_trajectory_csv(const std::string& path, const std::string& digest,
                          const Trajectory& traj) {
  auto out = open_out(path);
  out << "# manifest_digest=" << digest << " units=t_index,x_index=grid,value=dimensionless\n";
  out << "t_index,x_index,value\n";
  for (std::size_t k = 0; k < traj.fields.size(); ++k)
    for (std::size_t i = 0; i < traj.fields[k].size(); ++i)
      out << k << "," << i << "," << num(traj.fields[k][i]) << "\n";
}

void write_trajectory_pgm(const std::string& path_pgm, const std::string& path_range_csv,
                          const std::string& digest, const Trajectory& traj) {
  double lo = traj.fields[0][0], hi = lo;
  for (const Field& f : traj.fields)
    for (std::size_t i = 0; i < f.size(); ++i) {
      lo = std::min(lo, f[i]);
      hi = std::max(hi, f[i]);
    }
  double span = hi > lo ? hi - lo : 1.0;

  auto out = open_out(path_pgm);
  std::size_t w = traj.fields[0].size(), h = traj.fields.size();
  out << "P5\n" << w << " " << h << "\n255\n";
  for (const Field& f : traj.fields)
    for (std::size_t i = 0; i < f.size(); ++i) {
      unsigned char byte = static_cast<unsigned char>(255.0 * (f[i] - lo) / span);
      out.put(static_cast<char>(byte));
    }

  Table range;
  range.columns = {"min", "max"};
  range.add_row({lo, hi});
  write_csv(path_range_csv, digest, "value=dimensionless", range);
}

void write_text(const std::string& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

}  // namespace rpde
