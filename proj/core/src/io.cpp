#include "affmed/io.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace affmed {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

bool parse_double(const std::string& tok, double* out) {
  const char* s = tok.c_str();
  char* end = nullptr;
  *out = std::strtod(s, &end);
  if (end == s) return false;
  while (*end == ' ' || *end == '\t') ++end;
  return *end == '\0';
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

}  // namespace

PointSet read_points_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path, 0);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  int dim = -1;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const std::vector<std::string> toks = split_csv_line(line);
    double v;
    if (first_content && !parse_double(trim(toks[0]), &v)) {
      // Header row.
      first_content = false;
      continue;
    }
    first_content = false;
    std::vector<double> row;
    row.reserve(toks.size());
    for (const std::string& t : toks) {
      const std::string tt = trim(t);
      if (!parse_double(tt, &v)) {
        throw IoError("line " + std::to_string(lineno) + ": not a number: '" + tt + "'", lineno);
      }
      if (!std::isfinite(v)) {
        throw IoError("line " + std::to_string(lineno) + ": non-finite value", lineno);
      }
      row.push_back(v);
    }
    if (dim < 0) {
      dim = static_cast<int>(row.size());
    } else if (static_cast<int>(row.size()) != dim) {
      throw IoError("line " + std::to_string(lineno) + ": expected " + std::to_string(dim) +
                        " columns, got " + std::to_string(row.size()),
                    lineno);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("no data rows in " + path, lineno);
  Matrix m(static_cast<int>(rows.size()), dim);
  for (size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < dim; ++j) m(static_cast<int>(i), j) = rows[i][j];
  }
  return PointSet(m);
}

void write_points_csv(const std::string& path, const PointSet& pts) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open file for writing: " + path, 0);
  out.precision(17);
  for (int i = 0; i < pts.n(); ++i) {
    for (int j = 0; j < pts.dim(); ++j) {
      if (j) out << ',';
      out << pts.matrix()(i, j);
    }
    out << '\n';
  }
}

}  // namespace affmed
