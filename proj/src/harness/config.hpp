#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qbinclass/qpe.hpp"
#include "qbinclass/unsupervised.hpp"

namespace qbinclass::harness {

inline constexpr const char* kArtifactVersion = "qbinclass 0.1.0";
inline constexpr const char* kConfigSchemaVersion = "1";

// One experiment invocation. Every knob has a runnable default; only
// `experiment` must be supplied.
struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 12345;
  ExecutionMode mode = ExecutionMode::analytic_kernel;
  int n = 2;
  int t = 6;
  double tau = 0.9;
  std::int64_t shots = 4096;
  int per_class = 8;
  double spread = 0.05;
  double separation = 0.1;
  std::string oracle;
  std::string out = "report";
  int instances = 20;
  int eigenvalues = 20;
  int m_bits = 4;
  double epsilon = 0.1;
  bool corrected = true;
  double threshold = 0.0;
  int steps = 8;
  bool wrapped = false;

  QpeConfig qpe() const;
};

const std::vector<std::string>& experiment_names();

struct ConfigParseResult {
  ExperimentConfig config;
  std::vector<std::string> errors;
  bool ok() const { return errors.empty(); }
};

// Parses a key = value document ('#' starts a comment). All violations are
// collected, each prefixed with the offending key or line.
ConfigParseResult parse_config(const std::string& text);

std::vector<std::string> validate_config(const ExperimentConfig& config);

// Oracle spec grammar (one directive per file):
//   indices: j1 j2 ...
//   pattern: parity | single:<j> | threshold:<j0>
LabelOracle parse_oracle_spec(const std::string& text, int n);

} // namespace qbinclass::harness
