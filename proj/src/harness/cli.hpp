#pragma once

namespace qbinclass::harness {

// Entry point behind the qbinclass binary, factored out so tests can drive
// the command surface in-process. Returns the process exit code:
// 0 success, 2 configuration/validation failure, 3 runtime failure.
int cli_main(int argc, const char* const* argv);

} // namespace qbinclass::harness
