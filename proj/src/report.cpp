#include "hardymu/report.hpp"

#include <cmath>
#include <cstdio>

#include "hardymu/errors.hpp"

namespace hardymu {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CsvFile::CsvFile(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary) {
  if (!out_) throw Error("cannot open CSV file for writing: " + path.string());
  row(header);
}

void CsvFile::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
  if (!out_) throw Error("write failed: " + path_.string());
}

void write_plot_data(const std::filesystem::path& path,
                     const std::vector<std::pair<double, double>>& series) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open plot file for writing: " + path.string());
  for (const auto& [x, y] : series)
    out << format_double(x) << ' ' << format_double(y) << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read config file: " + path.string());
  std::map<std::string, std::string> kv;
  std::string line, section;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    const auto cut = line.find_first_of("#;");
    if (cut != std::string::npos) line.erase(cut);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("config line without '=': " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw Error("config line with empty key: " + line);
    kv[section.empty() ? key : section + "." + key] = val;
  }
  return kv;
}

}  // namespace hardymu
