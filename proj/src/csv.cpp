// SPDX-License-Identifier: Apache-2.0
#include "bhd/csv.hpp"

#include <fstream>
#include <sstream>

#include "bhd/error.hpp"

namespace bhd {

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header.size()) {
    throw InvalidArgument("CsvTable: row width " + std::to_string(row.size()) +
                          " does not match header width " + std::to_string(header.size()));
  }
  rows.push_back(std::move(row));
}

std::string CsvTable::render() const {
  std::ostringstream out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path parent = path.has_parent_path() ? path.parent_path() : fs::path(".");
  if (!fs::is_directory(parent)) {
    throw std::runtime_error("output directory '" + parent.string() + "' does not exist");
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out << text;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot move output into place at '" + path.string() + "'");
  }
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  write_file_atomic(path, table.render());
}

std::filesystem::path write_run_report(
    const std::filesystem::path& csv_path,
    const std::vector<std::pair<std::string, std::string>>& entries) {
  std::filesystem::path report = csv_path;
  report += ".run.conf";
  std::string text;
  for (const auto& [k, v] : entries) text += k + " = " + v + "\n";
  write_file_atomic(report, text);
  return report;
}

std::filesystem::path companion_path(const std::filesystem::path& path, const std::string& tag) {
  std::filesystem::path out = path.parent_path();
  out /= path.stem().string() + "_" + tag + path.extension().string();
  return out;
}

}  // namespace bhd
