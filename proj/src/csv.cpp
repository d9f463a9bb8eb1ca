#include "gcpd/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "gcpd/error.hpp"

namespace gcpd {
namespace {

std::vector<std::string> split_record(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted)
    fail(ErrorKind::InvalidArgument, "csv line " + std::to_string(line_no) + ": unterminated quote");
  fields.push_back(std::move(field));
  return fields;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "' for reading");
  return in;
}

}  // namespace

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

CsvTable parse_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (line.empty()) continue;
    auto fields = split_record(line, line_no);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size())
      fail(ErrorKind::InvalidArgument, "csv line " + std::to_string(line_no) + ": expected " +
                                           std::to_string(table.header.size()) + " fields, got " +
                                           std::to_string(fields.size()));
    table.rows.push_back(std::move(fields));
  }
  if (!have_header) fail(ErrorKind::InvalidArgument, "csv input has no header row");
  return table;
}

CsvTable read_csv(const std::string& path) {
  auto in = open_input(path);
  return parse_csv(in);
}

double parse_number(const std::string& field) {
  std::size_t begin = field.find_first_not_of(" \t");
  std::size_t end = field.find_last_not_of(" \t");
  if (begin == std::string::npos) fail(ErrorKind::InvalidArgument, "empty numeric field");
  const char* first = field.data() + begin;
  const char* last = field.data() + end + 1;
  if (*first == '+') ++first;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value))
    fail(ErrorKind::InvalidArgument, "not a finite number: '" + field + "'");
  return value;
}

std::string format_number(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) fail(ErrorKind::InvalidArgument, "cannot format number");
  return std::string(buf, ptr);
}

LabeledMatrix read_matrix_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  if (table.rows.empty()) fail(ErrorKind::EmptySample, "'" + path + "' has no data rows");
  LabeledMatrix out;
  out.names = table.header;
  out.values.resize(static_cast<Eigen::Index>(table.rows.size()),
                    static_cast<Eigen::Index>(table.header.size()));
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    for (std::size_t j = 0; j < table.header.size(); ++j)
      out.values(i, j) = parse_number(table.rows[i][j]);
  return out;
}

void write_matrix_csv(std::ostream& out, const std::vector<std::string>& names,
                      const Matrix& values) {
  if (static_cast<Eigen::Index>(names.size()) != values.cols())
    fail(ErrorKind::DimensionMismatch, "column names do not match the matrix width");
  for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << names[j];
  out << '\n';
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j)
      out << (j ? "," : "") << format_number(values(i, j));
    out << '\n';
  }
}

void write_matrix_csv(const std::string& path, const std::vector<std::string>& names,
                      const Matrix& values) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path + "' for writing");
  write_matrix_csv(out, names, values);
  if (!out) fail(ErrorKind::Io, "failed writing '" + path + "'");
}

}  // namespace gcpd
