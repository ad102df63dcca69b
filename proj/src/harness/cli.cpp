#include "cli.hpp"

#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "config.hpp"
#include "experiments.hpp"
#include "report.hpp"

namespace qbinclass::harness {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) return std::nullopt;
  std::stringstream buffer;
  buffer << file.rdbuf();
  return buffer.str();
}

int command_validate(const std::string& config_path) {
  const auto text = read_file(config_path);
  if (!text) {
    std::cerr << "config error: cannot open " << config_path << "\n";
    return kExitConfig;
  }
  const ConfigParseResult parsed = parse_config(*text);
  if (!parsed.ok()) {
    for (const std::string& error : parsed.errors)
      std::cerr << "config error: " << error << "\n";
    return kExitConfig;
  }
  std::cout << "valid: experiment=" << parsed.config.experiment
            << " seed=" << parsed.config.seed << " mode=" << mode_name(parsed.config.mode)
            << " out=" << parsed.config.out << "\n";
  return kExitOk;
}

int command_run(const std::string& config_path, const std::optional<std::uint64_t>& seed,
                const std::optional<std::string>& out,
                const std::optional<std::string>& mode) {
  const auto text = read_file(config_path);
  if (!text) {
    std::cerr << "config error: cannot open " << config_path << "\n";
    return kExitConfig;
  }
  ConfigParseResult parsed = parse_config(*text);
  if (seed) parsed.config.seed = *seed;
  if (out) parsed.config.out = *out;
  if (mode) {
    try {
      parsed.config.mode = parse_mode(*mode);
    } catch (const std::exception& error) {
      parsed.errors.push_back("mode: " + std::string(error.what()));
    }
  }
  if (parsed.ok()) {
    const std::vector<std::string> semantic = validate_config(parsed.config);
    parsed.errors.insert(parsed.errors.end(), semantic.begin(), semantic.end());
  }
  if (!parsed.ok()) {
    for (const std::string& error : parsed.errors)
      std::cerr << "config error: " << error << "\n";
    return kExitConfig;
  }
  try {
    const RunReport report = run_experiment(parsed.config);
    report.write(parsed.config.out);
    std::cout << "wrote " << parsed.config.out << ".json and " << parsed.config.out
              << ".csv\n";
    std::cout << "experiment=" << report.experiment << " seed=" << report.seed
              << " rows=" << report.rows.size() << " summary=" << report.summary.dump()
              << "\n";
    return kExitOk;
  } catch (const std::exception& error) {
    std::cerr << "runtime error: " << error.what() << "\n";
    return kExitRuntime;
  }
}

int command_oracle_check(const std::string& oracle_path, int n) {
  const auto text = read_file(oracle_path);
  if (!text) {
    std::cerr << "config error: cannot open " << oracle_path << "\n";
    return kExitConfig;
  }
  try {
    const LabelOracle oracle = parse_oracle_spec(*text, n);
    std::cout << "oracle ok: n=" << oracle.num_qubits() << " N=" << oracle.size()
              << " M=" << oracle.marked_count() << "\n";
    if (oracle.marked_count() == 0 || oracle.marked_count() == oracle.size())
      std::cout << "warning: degenerate marked set; Grover preparation will be rejected\n";
    return kExitOk;
  } catch (const std::exception& error) {
    std::cerr << "config error: " << error.what() << "\n";
    return kExitConfig;
  }
}

} // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Binary quantum-state classifier harness"};
  app.require_subcommand(1);

  std::string run_config;
  std::optional<std::uint64_t> run_seed;
  std::optional<std::string> run_out;
  std::optional<std::string> run_mode;
  CLI::App* run = app.add_subcommand("run", "Run an experiment from a config file");
  run->add_option("config", run_config, "Path to the config document")->required();
  run->add_option("--seed", run_seed, "Override the config seed");
  run->add_option("--out", run_out, "Override the report output base path");
  run->add_option("--mode", run_mode,
                  "Override the execution mode (analytic-kernel, full-circuit, sampled)");

  std::string validate_config_path;
  CLI::App* validate = app.add_subcommand("validate", "Validate a config file");
  validate->add_option("config", validate_config_path, "Path to the config document")
      ->required();

  std::string oracle_path;
  int oracle_n = 0;
  CLI::App* oracle_check =
      app.add_subcommand("oracle-check", "Parse and summarize an oracle spec file");
  oracle_check->add_option("oracle", oracle_path, "Path to the oracle spec file")
      ->required();
  oracle_check->add_option("--n", oracle_n, "Number of qubits the oracle acts on")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    const int code = app.exit(error);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (run->parsed()) return command_run(run_config, run_seed, run_out, run_mode);
  if (validate->parsed()) return command_validate(validate_config_path);
  if (oracle_check->parsed()) return command_oracle_check(oracle_path, oracle_n);
  return kExitConfig;
}

} // namespace qbinclass::harness
