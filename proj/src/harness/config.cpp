#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace qbinclass::harness {

namespace {

std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(" \t\r\n");
  return text.substr(begin, end - begin + 1);
}

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

bool parse_int64(const std::string& text, std::int64_t& value) {
  try {
    std::size_t used = 0;
    value = std::stoll(text, &used);
    return used == text.size();
  } catch (const std::exception&) {
    return false;
  }
}

bool parse_uint64(const std::string& text, std::uint64_t& value) {
  if (!text.empty() && text.front() == '-') return false;
  try {
    std::size_t used = 0;
    value = std::stoull(text, &used);
    return used == text.size();
  } catch (const std::exception&) {
    return false;
  }
}

bool parse_double(const std::string& text, double& value) {
  try {
    std::size_t used = 0;
    value = std::stod(text, &used);
    return used == text.size();
  } catch (const std::exception&) {
    return false;
  }
}

bool parse_bool(const std::string& text, bool& value) {
  if (text == "true" || text == "1" || text == "yes") {
    value = true;
    return true;
  }
  if (text == "false" || text == "0" || text == "no") {
    value = false;
    return true;
  }
  return false;
}

std::string joined_names() {
  std::string joined;
  for (const std::string& name : experiment_names()) {
    if (!joined.empty()) joined += ", ";
    joined += name;
  }
  return joined;
}

} // namespace

QpeConfig ExperimentConfig::qpe() const {
  QpeConfig cfg;
  cfg.n = n;
  cfg.t = t;
  cfg.tau = tau;
  cfg.mode = mode;
  cfg.shots = shots;
  cfg.seed = seed;
  return cfg;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "fidelity-sweep",    "error-bound-audit", "register-sizing-audit",
      "lloyd-convergence", "supervised-demo",   "unsupervised-demo",
      "grover-sweep",      "runtime-scaling"};
  return names;
}

ConfigParseResult parse_config(const std::string& text) {
  ConfigParseResult result;
  ExperimentConfig& cfg = result.config;
  std::istringstream stream(text);
  std::string raw_line;
  int line_number = 0;
  while (std::getline(stream, raw_line)) {
    ++line_number;
    const std::string line = trim(strip_comment(raw_line));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      result.errors.push_back("line " + std::to_string(line_number) +
                              ": expected 'key = value', got '" + line + "'");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      result.errors.push_back("line " + std::to_string(line_number) +
                              ": empty key or value");
      continue;
    }

    const auto bad = [&](const char* kind) {
      result.errors.push_back(key + ": invalid " + std::string(kind) + " value '" + value +
                              "'");
    };
    std::int64_t i64 = 0;
    std::uint64_t u64 = 0;
    double f64 = 0.0;
    bool flag = false;

    if (key == "experiment") {
      cfg.experiment = value;
    } else if (key == "seed") {
      if (parse_uint64(value, u64))
        cfg.seed = u64;
      else
        bad("unsigned integer");
    } else if (key == "mode") {
      try {
        cfg.mode = parse_mode(value);
      } catch (const std::exception& error) {
        result.errors.push_back("mode: " + std::string(error.what()));
      }
    } else if (key == "n") {
      if (parse_int64(value, i64))
        cfg.n = int(i64);
      else
        bad("integer");
    } else if (key == "t") {
      if (parse_int64(value, i64))
        cfg.t = int(i64);
      else
        bad("integer");
    } else if (key == "tau") {
      if (parse_double(value, f64))
        cfg.tau = f64;
      else
        bad("number");
    } else if (key == "shots") {
      if (parse_int64(value, i64))
        cfg.shots = i64;
      else
        bad("integer");
    } else if (key == "per_class") {
      if (parse_int64(value, i64))
        cfg.per_class = int(i64);
      else
        bad("integer");
    } else if (key == "spread") {
      if (parse_double(value, f64))
        cfg.spread = f64;
      else
        bad("number");
    } else if (key == "separation") {
      if (parse_double(value, f64))
        cfg.separation = f64;
      else
        bad("number");
    } else if (key == "oracle") {
      cfg.oracle = value;
    } else if (key == "out") {
      cfg.out = value;
    } else if (key == "instances") {
      if (parse_int64(value, i64))
        cfg.instances = int(i64);
      else
        bad("integer");
    } else if (key == "eigenvalues") {
      if (parse_int64(value, i64))
        cfg.eigenvalues = int(i64);
      else
        bad("integer");
    } else if (key == "m_bits") {
      if (parse_int64(value, i64))
        cfg.m_bits = int(i64);
      else
        bad("integer");
    } else if (key == "epsilon") {
      if (parse_double(value, f64))
        cfg.epsilon = f64;
      else
        bad("number");
    } else if (key == "corrected") {
      if (parse_bool(value, flag))
        cfg.corrected = flag;
      else
        bad("boolean");
    } else if (key == "threshold") {
      if (parse_double(value, f64))
        cfg.threshold = f64;
      else
        bad("number");
    } else if (key == "steps") {
      if (parse_int64(value, i64))
        cfg.steps = int(i64);
      else
        bad("integer");
    } else if (key == "wrapped") {
      if (parse_bool(value, flag))
        cfg.wrapped = flag;
      else
        bad("boolean");
    } else {
      result.errors.push_back("line " + std::to_string(line_number) + ": unknown key '" +
                              key + "'");
    }
  }

  const std::vector<std::string> semantic = validate_config(cfg);
  result.errors.insert(result.errors.end(), semantic.begin(), semantic.end());
  return result;
}

std::vector<std::string> validate_config(const ExperimentConfig& config) {
  std::vector<std::string> errors;
  if (config.experiment.empty()) {
    errors.push_back("experiment: missing (valid names: " + joined_names() + ")");
  } else if (std::find(experiment_names().begin(), experiment_names().end(),
                       config.experiment) == experiment_names().end()) {
    errors.push_back("experiment: unknown experiment '" + config.experiment +
                     "' (valid names: " + joined_names() + ")");
  }
  if (config.n < 1) errors.push_back("n: must be at least 1");
  if (config.n > 12) errors.push_back("n: dense simulation supports at most 12 qubits");
  if (config.t < 1) errors.push_back("t: must be at least 1");
  if (config.t > 22) errors.push_back("t: t exceeds the dense outcome-grid budget (22)");
  if (!(config.tau > 0.0 && config.tau < 1.0))
    errors.push_back("tau: tau must lie in (0,1)");
  if (config.mode == ExecutionMode::full_circuit && config.n + config.t > 14)
    errors.push_back("mode: register budget exceeded (n + t > 14 in full-circuit mode)");
  if (config.shots < 1) errors.push_back("shots: must be at least 1");
  if (config.per_class < 1) errors.push_back("per_class: must be at least 1");
  if (config.spread < 0.0) errors.push_back("spread: must be nonnegative");
  if (config.out.empty()) errors.push_back("out: must be nonempty");
  if (config.instances < 1) errors.push_back("instances: must be at least 1");
  if (config.eigenvalues < 1) errors.push_back("eigenvalues: must be at least 1");
  if (config.m_bits < 1) errors.push_back("m_bits: must be at least 1");
  if (!(config.epsilon > 0.0 && config.epsilon <= 0.5))
    errors.push_back("epsilon: must lie in (0, 1/2]");
  if (config.threshold < 0.0) errors.push_back("threshold: must be nonnegative");
  if (config.steps < 1) errors.push_back("steps: must be at least 1");
  return errors;
}

LabelOracle parse_oracle_spec(const std::string& text, int n) {
  if (n < 1 || n > 24) throw std::invalid_argument("oracle spec: n out of range");
  const std::int64_t total = std::int64_t(1) << n;
  std::istringstream stream(text);
  std::string raw_line;
  std::string directive;
  while (std::getline(stream, raw_line)) {
    const std::string line = trim(strip_comment(raw_line));
    if (line.empty()) continue;
    if (!directive.empty())
      throw std::invalid_argument("oracle spec: multiple directives (expected exactly one)");
    directive = line;
  }
  if (directive.empty())
    throw std::invalid_argument(
        "oracle spec: no directive found (expected 'indices:' or 'pattern:')");

  const auto colon = directive.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("oracle spec: malformed directive '" + directive + "'");
  const std::string head = trim(directive.substr(0, colon));
  const std::string body = trim(directive.substr(colon + 1));

  if (head == "indices") {
    std::istringstream items(body);
    std::vector<std::int64_t> marked;
    std::string item;
    while (items >> item) {
      std::int64_t index = 0;
      if (!parse_int64(item, index))
        throw std::invalid_argument("oracle spec: invalid index '" + item + "'");
      if (index < 0 || index >= total)
        throw std::invalid_argument("oracle spec: index " + item + " out of range for n=" +
                                    std::to_string(n));
      marked.push_back(index);
    }
    if (marked.empty())
      throw std::invalid_argument("oracle spec: 'indices:' directive lists no indices");
    return LabelOracle::from_indices(n, marked);
  }
  if (head == "pattern") {
    if (body == "parity") return LabelOracle::parity(n);
    const auto sub = body.find(':');
    if (sub != std::string::npos) {
      const std::string kind = trim(body.substr(0, sub));
      const std::string arg = trim(body.substr(sub + 1));
      std::int64_t index = 0;
      if (!parse_int64(arg, index))
        throw std::invalid_argument("oracle spec: invalid pattern argument '" + arg + "'");
      if (kind == "single") {
        if (index < 0 || index >= total)
          throw std::invalid_argument("oracle spec: index " + arg + " out of range for n=" +
                                      std::to_string(n));
        return LabelOracle::single(n, index);
      }
      if (kind == "threshold") {
        if (index < 0 || index > total)
          throw std::invalid_argument("oracle spec: index " + arg + " out of range for n=" +
                                      std::to_string(n));
        return LabelOracle::threshold(n, index);
      }
    }
    throw std::invalid_argument(
        "oracle spec: unknown pattern '" + body +
        "' (valid: parity, single:<j>, threshold:<j0>)");
  }
  throw std::invalid_argument("oracle spec: unknown directive '" + head + "'");
}

} // namespace qbinclass::harness
