#pragma once

// Readers for the whitespace-separated files in tests/fixtures ('#' lines
// are comments, '-' is an above-bound value).

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace kolm::fixtures {

inline std::vector<std::vector<std::string>> read_rows(const std::string& name) {
  const std::string path = std::string(KOLM_FIXTURE_DIR) + "/" + name;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing fixture " + path);
  std::vector<std::vector<std::string>> rows;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::vector<std::string> row;
    for (std::string f; fields >> f;) row.push_back(f);
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::optional<int> value(const std::string& field) {
  if (field == "-") return std::nullopt;
  return std::stoi(field);
}

}  // namespace kolm::fixtures
