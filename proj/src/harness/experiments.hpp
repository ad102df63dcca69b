#pragma once

#include "config.hpp"
#include "report.hpp"

namespace qbinclass::harness {

// Executes the named experiment; throws on module failures.
RunReport run_experiment(const ExperimentConfig& config);

} // namespace qbinclass::harness
