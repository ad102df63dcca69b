#include "report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace qbinclass::harness {

std::string format_g17(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string RunReport::csv_text() const {
  std::string text;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c > 0) text += ',';
    text += columns[c];
  }
  text += '\n';
  for (const auto& row : rows) {
    if (row.size() != columns.size())
      throw std::logic_error("RunReport: row width does not match the column header");
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) text += ',';
      text += row[c];
    }
    text += '\n';
  }
  return text;
}

nlohmann::ordered_json RunReport::json_doc() const {
  nlohmann::ordered_json doc;
  doc["version"] = version;
  doc["experiment"] = experiment;
  doc["seed"] = seed;
  doc["config"] = config_echo;
  doc["columns"] = columns;
  doc["rows"] = rows;
  doc["summary"] = summary;
  doc["wall_ms"] = wall_ms;
  return doc;
}

void RunReport::write(const std::string& out_base) const {
  {
    std::ofstream csv(out_base + ".csv", std::ios::binary);
    if (!csv) throw std::runtime_error("cannot open report file " + out_base + ".csv");
    csv << csv_text();
    if (!csv) throw std::runtime_error("failed writing report file " + out_base + ".csv");
  }
  {
    std::ofstream json(out_base + ".json", std::ios::binary);
    if (!json) throw std::runtime_error("cannot open report file " + out_base + ".json");
    json << json_doc().dump(2) << '\n';
    if (!json) throw std::runtime_error("failed writing report file " + out_base + ".json");
  }
}

} // namespace qbinclass::harness
