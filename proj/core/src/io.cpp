#include "ssc/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

namespace ssc::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view token, std::size_t line) {
  token = trim(token);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line) + ": bad number '" + std::string(token) + "'");
  }
  return value;
}

long parse_long(std::string_view token, std::size_t line) {
  token = trim(token);
  long value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line) + ": bad integer '" + std::string(token) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void write_matrix_csv(std::ostream& out, const Matrix& m) {
  out << m.rows() << ',' << m.cols() << '\n';
  std::string line;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    line.clear();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) line.push_back(',');
      line += format_double(m(i, j));
    }
    line.push_back('\n');
    out << line;
  }
}

Matrix read_matrix_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "empty matrix file");
  const auto header = split(trim(line), ',');
  if (header.size() != 2) throw Error(ErrorCode::ParseError, "header must be 'n,N'");
  const long rows = parse_long(header[0], lineno);
  const long cols = parse_long(header[1], lineno);
  if (rows < 1 || cols < 1) throw Error(ErrorCode::ParseError, "matrix dimensions must be positive");
  Matrix m(rows, cols);
  for (long i = 0; i < rows; ++i) {
    ++lineno;
    if (!std::getline(in, line)) {
      throw Error(ErrorCode::ParseError, "expected " + std::to_string(rows) + " data rows, got " +
                                             std::to_string(i));
    }
    const auto fields = split(trim(line), ',');
    if (static_cast<long>(fields.size()) != cols) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected " +
                                             std::to_string(cols) + " values");
    }
    for (long j = 0; j < cols; ++j) m(i, j) = parse_double(fields[j], lineno);
  }
  while (std::getline(in, line)) {
    ++lineno;
    if (!trim(line).empty()) {
      throw Error(ErrorCode::ParseError, "trailing content at line " + std::to_string(lineno));
    }
  }
  return m;
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  auto out = open_out(path);
  write_matrix_csv(out, m);
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_matrix_csv(in);
}

void write_labels(std::ostream& out, const std::vector<int>& labels) {
  for (int l : labels) out << l << '\n';
}

std::vector<int> read_labels(std::istream& in) {
  std::vector<int> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty()) continue;
    const long v = parse_long(t, lineno);
    if (v < 0) throw Error(ErrorCode::ParseError, "negative label at line " + std::to_string(lineno));
    labels.push_back(static_cast<int>(v));
  }
  return labels;
}

void write_labels(const std::filesystem::path& path, const std::vector<int>& labels) {
  auto out = open_out(path);
  write_labels(out, labels);
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

std::vector<int> read_labels(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_labels(in);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

std::string read_text(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace ssc::io
