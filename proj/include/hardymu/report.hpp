#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

namespace hardymu {

// Shortest round-trip decimal form; identical inputs give identical text,
// which keeps re-emitted CSV artifacts byte-identical.
std::string format_double(double v);

// Comma-separated file with a header row, '.' decimal separator and LF
// terminators.
class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& cells);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

// Two-column plot-ready data file (x y per line).
void write_plot_data(const std::filesystem::path& path,
                     const std::vector<std::pair<double, double>>& series);

// Key-value config text with [section] headers; keys are returned flattened
// as "section.key".  '#' and ';' start comments.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

}  // namespace hardymu
