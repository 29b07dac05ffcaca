#pragma once

#include <stdexcept>
#include <string>

#include "affmed/geometry.hpp"

namespace affmed {

// Parse/read failure with a 1-based line number for CLI reporting.
struct IoError : std::runtime_error {
  IoError(const std::string& what, int line_in) : std::runtime_error(what), line(line_in) {}
  int line = 0;
};

// One point per row, comma separated, optional header row (detected by a
// non-numeric first token). LF or CRLF. Dimension is inferred from the first
// data row and enforced on the rest.
PointSet read_points_csv(const std::string& path);

void write_points_csv(const std::string& path, const PointSet& pts);

}  // namespace affmed
