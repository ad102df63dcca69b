#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace qbinclass::harness {

// 17 significant digits: enough to round-trip any double bit pattern.
std::string format_g17(double value);

// Columns named with an `_ms` suffix hold wall-clock timings and are the only
// cells allowed to differ between replays of the same config and seed.
struct RunReport {
  std::string experiment;
  std::uint64_t seed = 0;
  std::string version;
  nlohmann::ordered_json config_echo;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  nlohmann::ordered_json summary;
  double wall_ms = 0.0;

  std::string csv_text() const;
  nlohmann::ordered_json json_doc() const;
  void write(const std::string& out_base) const;
};

} // namespace qbinclass::harness
