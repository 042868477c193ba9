// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace bhd {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  std::string render() const;
};

/// Writes `text` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// key = value report written next to a CSV as `<path>.run.conf`.
std::filesystem::path write_run_report(
    const std::filesystem::path& csv_path,
    const std::vector<std::pair<std::string, std::string>>& entries);

/// `results.csv` + "constellation" -> `results_constellation.csv`
std::filesystem::path companion_path(const std::filesystem::path& path, const std::string& tag);

}  // namespace bhd
