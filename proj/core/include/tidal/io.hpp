#pragma once

// Shortest round-trip number formatting and the trajectory CSV format.

#include <iosfwd>
#include <string>
#include <vector>

#include "tidal/curvature.hpp"
#include "tidal/dynamics.hpp"

namespace tidal {

/// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

/// Header row, numeric rows, then trailing "# ..." comment lines.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> comments;  // without the leading "# "
};

void write_csv(std::ostream& os, const CsvTable& table);
std::string to_csv(const CsvTable& table);
/// Throws ValidationError on a malformed table.
CsvTable parse_csv(const std::string& text);

CsvTable trajectory_table(const Trajectory& traj);
CsvTable deviation_table(const DeviationTrajectory& traj);

/// Connection data, curvature and tidal tensors at one phase point, as indented JSON.
std::string packet_to_json(const TidalPacket& packet);

}  // namespace tidal
