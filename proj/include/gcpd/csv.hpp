#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gcpd/numstats.hpp"

namespace gcpd {

/// Comma-separated table with a header row. Fields may be double-quoted.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header name, or -1.
  int column(const std::string& name) const;
};

CsvTable parse_csv(std::istream& in);
CsvTable read_csv(const std::string& path);

/// Parses a whole field as a finite double; throws InvalidArgument otherwise.
double parse_number(const std::string& field);

/// Shortest decimal representation that round-trips to the same double.
std::string format_number(double x);

struct LabeledMatrix {
  std::vector<std::string> names;
  Matrix values;
};

/// Numeric CSV: header of column names, one row per observation.
LabeledMatrix read_matrix_csv(const std::string& path);
void write_matrix_csv(std::ostream& out, const std::vector<std::string>& names,
                      const Matrix& values);
void write_matrix_csv(const std::string& path, const std::vector<std::string>& names,
                      const Matrix& values);

}  // namespace gcpd
