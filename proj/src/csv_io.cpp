#include "ammhl/csv_io.hpp"

#include <charconv>
#include <filesystem>

#include "ammhl/errors.hpp"
#include "ammhl/version.hpp"

namespace ammhl {

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc()) fail(ErrorKind::io, "format_double: conversion failed");
  return std::string(buf, ptr);
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& comments,
                     const std::vector<std::string>& columns)
    : path_(path), n_cols_(columns.size()), out_(path, std::ios::binary) {
  if (!out_) fail(ErrorKind::io, "csv: cannot open " + path);
  for (const auto& c : comments) out_ << "# " << c << '\n';
  for (std::size_t k = 0; k < columns.size(); ++k) out_ << (k ? "," : "") << columns[k];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != n_cols_) fail(ErrorKind::shape, "csv: row width does not match header in " + path_);
  line_.clear();
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) line_ += ',';
    line_ += format_double(values[k]);
  }
  line_ += '\n';
  out_ << line_;
}

void CsvWriter::close() {
  out_.close();
  if (out_.fail()) fail(ErrorKind::io, "csv: write failed for " + path_);
}

std::vector<std::string> header_comments(const std::vector<std::string>& config_echo) {
  std::vector<std::string> out;
  out.push_back(std::string("version=") + kVersion);
  out.insert(out.end(), config_echo.begin(), config_echo.end());
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot open " + path);
  out << text;
  if (!out) fail(ErrorKind::io, "write failed for " + path);
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::io, "cannot create directory " + dir + ": " + ec.message());
}

}  // namespace ammhl
