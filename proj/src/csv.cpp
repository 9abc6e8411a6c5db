#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "oscal/dataio.hpp"
#include "oscal/error.hpp"

namespace oscal {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw DataError("write failed: " + path.string());
}

// Lines split on '\n'; a trailing '\r' (CRLF input) is tolerated.
std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

double parse_field(const std::string& field, std::size_t line_no, std::size_t col_no) {
  const auto where = "line " + std::to_string(line_no + 1) + ", field " +
                     std::to_string(col_no + 1);
  if (field.empty()) throw DataError("empty CSV field at " + where);
  const char* s = field.c_str();
  char* end = nullptr;
  const double v = std::strtod(s, &end);
  if (end != s + field.size())
    throw DataError("malformed CSV number '" + field + "' at " + where);
  if (!std::isfinite(v))
    throw DataError("non-finite CSV value '" + field + "' at " + where);
  return v;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Matrix load_csv(const std::filesystem::path& path) {
  const auto lines = split_lines(read_file(path));
  if (lines.empty()) throw DataError("empty array: " + path.string());

  std::vector<std::vector<double>> rows;
  rows.reserve(lines.size());
  for (std::size_t li = 0; li < lines.size(); ++li) {
    std::vector<double> row;
    std::size_t start = 0;
    std::size_t col = 0;
    const std::string& line = lines[li];
    for (;;) {
      std::size_t end = line.find(',', start);
      if (end == std::string::npos) end = line.size();
      row.push_back(parse_field(line.substr(start, end - start), li, col++));
      if (end == line.size()) break;
      start = end + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw DataError("ragged CSV row at line " + std::to_string(li + 1) +
                      ": expected " + std::to_string(rows.front().size()) +
                      " fields, got " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }

  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

void save_csv(const Matrix& m, const std::filesystem::path& path) {
  if (m.rows() == 0 || m.cols() == 0) throw DataError("empty array");
  if (!m.all_finite()) throw DataError("refusing to save non-finite values");
  std::string out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  write_file(path, out);
}

std::vector<std::int64_t> load_csv_labels(const std::filesystem::path& path) {
  const auto lines = split_lines(read_file(path));
  if (lines.empty()) throw DataError("empty label file: " + path.string());
  std::vector<std::int64_t> labels;
  labels.reserve(lines.size());
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::string& line = lines[li];
    const char* s = line.c_str();
    char* end = nullptr;
    const long long v = std::strtoll(s, &end, 10);
    if (line.empty() || end != s + line.size())
      throw DataError("malformed label '" + line + "' at line " +
                      std::to_string(li + 1));
    labels.push_back(static_cast<std::int64_t>(v));
  }
  return labels;
}

void save_csv_labels(std::span<const std::int64_t> v,
                     const std::filesystem::path& path) {
  if (v.empty()) throw DataError("empty array");
  std::string out;
  char buf[24];
  for (std::int64_t x : v) {
    std::snprintf(buf, sizeof buf, "%" PRId64 "\n", x);
    out += buf;
  }
  write_file(path, out);
}

}  // namespace oscal
