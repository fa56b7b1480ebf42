#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace ammhl {

// 17 significant digits, enough to read back the same double.
std::string format_double(double v);

// Writes `# ...` comment lines, a header row, then rows of numbers.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& comments,
            const std::vector<std::string>& columns);

  void row(const std::vector<double>& values);
  void close();
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::size_t n_cols_;
  std::ofstream out_;
  std::string line_;
};

// "version=..." followed by one "# key=value" line per entry.
std::vector<std::string> header_comments(const std::vector<std::string>& config_echo);

void write_text(const std::string& path, const std::string& text);
void ensure_directory(const std::string& dir);

}  // namespace ammhl
