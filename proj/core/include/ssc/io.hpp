#pragma once

// Text formats shared by the library and the command-line tool.
//
// Matrix CSV: first line "n,N", then n lines of N comma-separated decimals
// (row i holds ambient coordinate i of every sample). Numbers are written in
// shortest round-trip form, so write -> read is lossless.
//
// Labels: one non-negative integer per line.

#include "ssc/core.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace ssc::io {

std::string format_double(double value);

void write_matrix_csv(std::ostream& out, const Matrix& m);
Matrix read_matrix_csv(std::istream& in);

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix_csv(const std::filesystem::path& path);

void write_labels(std::ostream& out, const std::vector<int>& labels);
std::vector<int> read_labels(std::istream& in);

void write_labels(const std::filesystem::path& path, const std::vector<int>& labels);
std::vector<int> read_labels(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace ssc::io
