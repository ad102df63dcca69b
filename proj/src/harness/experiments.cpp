#include "experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <Eigen/SVD>

#include "qbinclass/expsim.hpp"
#include "qbinclass/qcore.hpp"
#include "qbinclass/qpe.hpp"
#include "qbinclass/supervised.hpp"
#include "qbinclass/unsupervised.hpp"

namespace qbinclass::harness {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string cell(double value) { return format_g17(value); }
std::string cell(std::int64_t value) { return std::to_string(value); }
std::string cell(int value) { return std::to_string(value); }
std::string cell(std::uint64_t value) { return std::to_string(value); }
std::string cell(bool value) { return value ? "1" : "0"; }

nlohmann::ordered_json echo_config(const ExperimentConfig& cfg) {
  nlohmann::ordered_json echo;
  echo["schema"] = kConfigSchemaVersion;
  echo["experiment"] = cfg.experiment;
  echo["seed"] = cfg.seed;
  echo["mode"] = mode_name(cfg.mode);
  echo["n"] = cfg.n;
  echo["t"] = cfg.t;
  echo["tau"] = format_g17(cfg.tau);
  echo["shots"] = cfg.shots;
  echo["per_class"] = cfg.per_class;
  echo["spread"] = format_g17(cfg.spread);
  echo["separation"] = format_g17(cfg.separation);
  echo["oracle"] = cfg.oracle;
  echo["out"] = cfg.out;
  echo["instances"] = cfg.instances;
  echo["eigenvalues"] = cfg.eigenvalues;
  echo["m_bits"] = cfg.m_bits;
  echo["epsilon"] = format_g17(cfg.epsilon);
  echo["corrected"] = cfg.corrected;
  echo["threshold"] = format_g17(cfg.threshold);
  echo["steps"] = cfg.steps;
  echo["wrapped"] = cfg.wrapped;
  return echo;
}

double trace_norm(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

std::vector<std::int64_t> scattered_subset(int n, std::int64_t count, std::uint64_t seed) {
  const std::int64_t total = std::int64_t(1) << n;
  std::vector<std::int64_t> indices(static_cast<std::size_t>(total));
  std::iota(indices.begin(), indices.end(), 0);
  Rng rng(seed);
  for (std::int64_t i = total - 1; i > 0; --i)
    std::swap(indices[std::size_t(i)], indices[std::size_t(rng.below(std::uint64_t(i + 1)))]);
  indices.resize(std::size_t(count));
  return indices;
}

LabelOracle load_oracle(const ExperimentConfig& cfg) {
  if (cfg.oracle.empty()) return parse_oracle_spec("pattern: single:0", cfg.n);
  std::ifstream file(cfg.oracle);
  if (!file) throw std::runtime_error("cannot open oracle spec file " + cfg.oracle);
  std::stringstream buffer;
  buffer << file.rdbuf();
  return parse_oracle_spec(buffer.str(), cfg.n);
}

void run_fidelity_sweep(const ExperimentConfig& cfg, RunReport& report) {
  report.columns = {"trial",       "trial_seed", "rank",         "exact",
                    "estimate",    "clamped",    "error_bound",  "abs_err",
                    "within_bound", "shots_used", "standard_error", "trial_ms"};
  const std::int64_t d = std::int64_t(1) << cfg.n;
  double max_abs_err = 0.0;
  double sum_abs_err = 0.0;
  std::int64_t violations = 0;
  for (int i = 0; i < cfg.instances; ++i) {
    const auto start = Clock::now();
    const std::uint64_t trial_seed = derive_seed(cfg.seed, std::uint64_t(i));
    const int rank = 1 + int(std::int64_t(i) % d);
    const DensityMatrix rho = random_density(cfg.n, rank, derive_seed(trial_seed, 0));
    const PureState sigma = random_pure_state(cfg.n, derive_seed(trial_seed, 1));
    QpeConfig qpe = cfg.qpe();
    qpe.seed = trial_seed;
    const FidelityEstimate est = estimate_fidelity(rho, sigma, qpe);
    const double exact = fidelity_exact(rho, sigma);
    const double abs_err = std::abs(est.value - exact);
    const bool within = abs_err <= est.error_bound + 1e-12;
    max_abs_err = std::max(max_abs_err, abs_err);
    sum_abs_err += abs_err;
    if (!within) ++violations;
    report.rows.push_back({cell(i), cell(trial_seed), cell(rank), cell(exact),
                           cell(est.value), cell(est.value_clamped), cell(est.error_bound),
                           cell(abs_err), cell(within), cell(est.shots_used),
                           cell(est.standard_error), cell(elapsed_ms(start))});
  }
  report.summary["instances"] = cfg.instances;
  report.summary["max_abs_err"] = format_g17(max_abs_err);
  report.summary["mean_abs_err"] = format_g17(sum_abs_err / cfg.instances);
  report.summary["bound_violations"] = violations;
}

void run_error_bound_audit(const ExperimentConfig& cfg, RunReport& report) {
  report.columns = {"trial",    "trial_seed", "n",       "rank",      "t",
                    "exact",    "estimate",   "bound",   "abs_err",   "violation",
                    "trial_ms"};
  std::int64_t violations = 0;
  double max_abs_err = 0.0;
  double worst_slack = -1.0;
  for (int i = 0; i < cfg.instances; ++i) {
    const auto start = Clock::now();
    const std::uint64_t trial_seed = derive_seed(cfg.seed, std::uint64_t(i));
    const int n = 1 + (i % 3);
    const int rank = std::min(1 + (i % 4), 1 << n);
    const int t = 4 + (i % 5);
    const DensityMatrix rho = random_density(n, rank, derive_seed(trial_seed, 0));
    const PureState sigma = random_pure_state(n, derive_seed(trial_seed, 1));
    QpeConfig qpe = cfg.qpe();
    qpe.n = n;
    qpe.t = t;
    qpe.seed = trial_seed;
    const FidelityEstimate est = estimate_fidelity(rho, sigma, qpe);
    const double exact = fidelity_exact(rho, sigma);
    const double abs_err = std::abs(est.value - exact);
    const bool violation = abs_err > est.error_bound + 1e-12;
    if (violation) ++violations;
    max_abs_err = std::max(max_abs_err, abs_err);
    worst_slack = std::max(worst_slack, abs_err - est.error_bound);
    report.rows.push_back({cell(i), cell(trial_seed), cell(n), cell(rank), cell(t),
                           cell(exact), cell(est.value), cell(est.error_bound),
                           cell(abs_err), cell(violation), cell(elapsed_ms(start))});
  }
  report.summary["instances"] = cfg.instances;
  report.summary["violations"] = violations;
  report.summary["max_abs_err"] = format_g17(max_abs_err);
  report.summary["worst_slack"] = format_g17(worst_slack);
}

void run_register_sizing_audit(const ExperimentConfig& cfg, RunReport& report) {
  report.columns = {"eig",  "trial_seed", "lambda", "t_used",
                    "freq", "pass",       "trial_ms"};
  const int t_used = register_size(cfg.m_bits, cfg.epsilon, cfg.tau, cfg.corrected);
  if (t_used > 22)
    throw std::runtime_error("register-sizing-audit: required t exceeds the grid budget");
  const double two_pi = 2.0 * std::numbers::pi_v<double>;
  const double accuracy = std::ldexp(two_pi / cfg.tau, -cfg.m_bits);
  const std::int64_t grid = std::int64_t(1) << t_used;
  const RealVector decoded = detail::decoded_grid(t_used, cfg.tau, cfg.wrapped);
  double min_freq = 1.0;
  bool all_pass = true;
  for (int e = 0; e < cfg.eigenvalues; ++e) {
    const auto start = Clock::now();
    const std::uint64_t trial_seed = derive_seed(cfg.seed, std::uint64_t(e));
    Rng lambda_rng(derive_seed(trial_seed, 0));
    const double lambda = lambda_rng.uniform01();
    const double theta = lambda * (cfg.tau / two_pi);
    RealVector dist(grid);
    for (std::int64_t k = 0; k < grid; ++k) dist(k) = qpe_kernel(theta, t_used, k);
    const std::vector<std::int64_t> outcomes =
        sample_outcomes(dist, cfg.shots, derive_seed(trial_seed, 1));
    std::int64_t hits = 0;
    for (const std::int64_t k : outcomes) {
      const double value = cfg.wrapped ? std::max(0.0, decoded(k)) : decoded(k);
      if (std::abs(value - lambda) <= accuracy + 1e-12) ++hits;
    }
    const double freq = double(hits) / double(cfg.shots);
    const bool pass = freq >= 1.0 - cfg.epsilon;
    min_freq = std::min(min_freq, freq);
    all_pass = all_pass && pass;
    report.rows.push_back({cell(e), cell(trial_seed), cell(lambda), cell(t_used),
                           cell(freq), cell(pass), cell(elapsed_ms(start))});
  }
  report.summary["t_used"] = t_used;
  report.summary["accuracy"] = format_g17(accuracy);
  report.summary["shots"] = cfg.shots;
  report.summary["min_freq"] = format_g17(min_freq);
  report.summary["all_pass"] = all_pass;
}

void run_lloyd_convergence(const ExperimentConfig& cfg, RunReport& report) {
  report.columns = {"trial",        "trial_seed", "e_base",     "e_double",
                    "e_quad",       "ratio_double", "ratio_quad", "in_band_double",
                    "trial_ms"};
  double sum_double = 0.0;
  double sum_quad = 0.0;
  std::int64_t in_band = 0;
  for (int i = 0; i < cfg.instances; ++i) {
    const auto start = Clock::now();
    const std::uint64_t trial_seed = derive_seed(cfg.seed, std::uint64_t(i));
    const DensityMatrix rho = random_density(1, 2, derive_seed(trial_seed, 0));
    const DensityMatrix sigma = random_density(1, 2, derive_seed(trial_seed, 1));
    const UnitaryMatrix u = exponentiate_exact(rho, cfg.tau);
    const Matrix exact =
        u.entries() * sigma.entries() * u.entries().adjoint();
    const auto protocol_error = [&](int steps) {
      const DensityMatrix evolved = exponentiate_partial_swap(rho, sigma, cfg.tau, steps);
      return trace_norm(evolved.entries() - exact);
    };
    const double e_base = protocol_error(cfg.steps);
    const double e_double = protocol_error(2 * cfg.steps);
    const double e_quad = protocol_error(4 * cfg.steps);
    const double ratio_double = e_base / e_double;
    const double ratio_quad = e_base / e_quad;
    const bool band = ratio_double >= 3.0 && ratio_double <= 5.0;
    sum_double += ratio_double;
    sum_quad += ratio_quad;
    if (band) ++in_band;
    report.rows.push_back({cell(i), cell(trial_seed), cell(e_base), cell(e_double),
                           cell(e_quad), cell(ratio_double), cell(ratio_quad), cell(band),
                           cell(elapsed_ms(start))});
  }
  report.summary["instances"] = cfg.instances;
  report.summary["steps"] = cfg.steps;
  report.summary["mean_ratio_double"] = format_g17(sum_double / cfg.instances);
  report.summary["mean_ratio_quad"] = format_g17(sum_quad / cfg.instances);
  report.summary["in_band_double"] = in_band;
}

void run_supervised_demo(const ExperimentConfig& cfg, RunReport& report) {
  report.columns = {"sample", "sample_seed", "true_label", "predicted",
                    "est0",   "est1",        "exact0",     "exact1",
                    "margin", "agrees_exact_rule"};
  const TwoClassDataset data = generate_two_class_dataset(
      cfg.n, cfg.per_class, cfg.spread, cfg.separation, cfg.seed);
  const TrainingModel model = build_training_model(data.train0, data.train1, cfg.seed);
  QpeConfig qpe = cfg.qpe();
  const ClassificationReport batch =
      classify_batch(model, data.test_states, data.test_labels, qpe);
  const double bound_sum = error_bound(spectral_decompose(model.rho0), qpe) +
                           error_bound(spectral_decompose(model.rho1), qpe);
  std::int64_t margin_violations = 0;
  for (std::size_t i = 0; i < batch.records.size(); ++i) {
    const SampleRecord& rec = batch.records[i];
    const double exact0 = fidelity_exact(model.rho0, data.test_states[i]);
    const double exact1 = fidelity_exact(model.rho1, data.test_states[i]);
    const double margin = std::abs(exact0 - exact1);
    const int rule = classify_exact_rule(model.rho0, model.rho1, data.test_states[i]);
    const bool agrees = rec.predicted == rule;
    if (margin > bound_sum && !agrees) ++margin_violations;
    report.rows.push_back({cell(std::int64_t(i)),
                           cell(derive_seed(cfg.seed, std::uint64_t(i))),
                           cell(rec.true_label), cell(rec.predicted),
                           cell(rec.estimate0.value), cell(rec.estimate1.value),
                           cell(exact0), cell(exact1), cell(margin), cell(agrees)});
  }
  report.summary["samples"] = std::int64_t(batch.records.size());
  report.summary["accuracy"] = batch.accuracy ? format_g17(*batch.accuracy) : "n/a";
  report.summary["confusion_00"] = batch.confusion[0][0];
  report.summary["confusion_01"] = batch.confusion[0][1];
  report.summary["confusion_10"] = batch.confusion[1][0];
  report.summary["confusion_11"] = batch.confusion[1][1];
  report.summary["bound_sum"] = format_g17(bound_sum);
  report.summary["margin_soundness_violations"] = margin_violations;
}

void run_unsupervised_demo(const ExperimentConfig& cfg, RunReport& report) {
  report.columns = {"j",         "trial_seed", "true_label", "q",
                    "predicted", "low_confidence", "match"};
  const LabelOracle oracle = load_oracle(cfg);
  const ReferenceStates refs = prepare_references(oracle);
  const double threshold = cfg.threshold == 0.0 ? -1.0 : cfg.threshold;
  std::int64_t correct = 0;
  for (std::int64_t j = 0; j < oracle.size(); ++j) {
    const std::uint64_t trial_seed = derive_seed(cfg.seed, std::uint64_t(j));
    const BasisDecision decision =
        cfg.mode == ExecutionMode::sampled
            ? classify_basis_vector_sampled(j, refs.m_tilde, cfg.shots, trial_seed,
                                            threshold)
            : classify_basis_vector(j, refs.m_tilde, threshold);
    const bool match = decision.label == oracle.label(j);
    if (match) ++correct;
    report.rows.push_back({cell(j), cell(trial_seed), cell(oracle.label(j)),
                           cell(decision.q), cell(decision.label),
                           cell(decision.low_confidence), cell(match)});
  }
  QpeConfig qpe = cfg.qpe();
  const StateDecision state_m =
      classify_state(refs.m_ideal, refs, qpe, ClassifyMode::exact);
  const StateDecision state_perp =
      classify_state(refs.m_perp_ideal, refs, qpe, ClassifyMode::exact);
  const StateDecision state_m_est =
      classify_state(refs.m_ideal, refs, qpe, ClassifyMode::estimated);
  const StateDecision state_perp_est =
      classify_state(refs.m_perp_ideal, refs, qpe, ClassifyMode::estimated);
  report.summary["N"] = oracle.size();
  report.summary["M"] = oracle.marked_count();
  report.summary["iterations_m"] = refs.iterations_m;
  report.summary["iterations_m_perp"] = refs.iterations_m_perp;
  report.summary["overlap_m"] = format_g17(refs.overlap_m);
  report.summary["overlap_m_perp"] = format_g17(refs.overlap_m_perp);
  report.summary["basis_accuracy"] = format_g17(double(correct) / double(oracle.size()));
  report.summary["state_label_m_exact"] = state_m.label;
  report.summary["state_label_m_perp_exact"] = state_perp.label;
  report.summary["state_label_m_estimated"] = state_m_est.label;
  report.summary["state_label_m_perp_estimated"] = state_perp_est.label;
}

void run_grover_sweep(const ExperimentConfig& cfg, RunReport& report) {
  report.columns = {"M", "trial_seed", "k", "closed_form", "simulated", "abs_diff",
                    "trial_ms"};
  const std::int64_t total = std::int64_t(1) << cfg.n;
  double max_diff = 0.0;
  for (std::int64_t m = 1; m < total; ++m) {
    const auto start = Clock::now();
    const std::uint64_t trial_seed = derive_seed(cfg.seed, std::uint64_t(m));
    const LabelOracle oracle =
        LabelOracle::from_indices(cfg.n, scattered_subset(cfg.n, m, trial_seed));
    const int k = grover_iterations(total, m);
    const PureState m_tilde = prepare_m_tilde(oracle);
    const double simulated =
        std::norm(ideal_m(oracle).amplitudes().dot(m_tilde.amplitudes()));
    const double theta = std::asin(std::sqrt(double(m) / double(total)));
    const double closed = std::pow(std::sin(double(2 * k + 1) * theta), 2);
    const double diff = std::abs(simulated - closed);
    max_diff = std::max(max_diff, diff);
    report.rows.push_back({cell(m), cell(trial_seed), cell(k), cell(closed),
                           cell(simulated), cell(diff), cell(elapsed_ms(start))});
  }
  report.summary["N"] = total;
  report.summary["pairs"] = total - 1;
  report.summary["max_abs_diff"] = format_g17(max_diff);
}

void run_runtime_scaling(const ExperimentConfig& cfg, RunReport& report) {
  report.columns = {"rank", "trials", "mean_ms", "total_ms"};
  const std::int64_t d = std::int64_t(1) << cfg.n;
  for (const int rank : {1, 2, 4, 8}) {
    if (rank > d) continue;
    const auto start = Clock::now();
    for (int i = 0; i < cfg.instances; ++i) {
      const std::uint64_t trial_seed =
          derive_seed(cfg.seed, std::uint64_t(1000 * rank + i));
      const DensityMatrix rho = random_density(cfg.n, rank, derive_seed(trial_seed, 0));
      const PureState sigma = random_pure_state(cfg.n, derive_seed(trial_seed, 1));
      QpeConfig qpe = cfg.qpe();
      qpe.seed = trial_seed;
      (void)estimate_fidelity(rho, sigma, qpe);
    }
    const double total_ms = elapsed_ms(start);
    report.rows.push_back({cell(rank), cell(cfg.instances),
                           cell(total_ms / cfg.instances), cell(total_ms)});
  }
  report.summary["dimension"] = d;
  report.summary["t"] = cfg.t;
  report.summary["mode"] = mode_name(cfg.mode);
}

} // namespace

RunReport run_experiment(const ExperimentConfig& config) {
  const std::vector<std::string> errors = validate_config(config);
  if (!errors.empty())
    throw std::invalid_argument("run_experiment: invalid config: " + errors.front());
  RunReport report;
  report.experiment = config.experiment;
  report.seed = config.seed;
  report.version = kArtifactVersion;
  report.config_echo = echo_config(config);
  const auto start = Clock::now();
  if (config.experiment == "fidelity-sweep")
    run_fidelity_sweep(config, report);
  else if (config.experiment == "error-bound-audit")
    run_error_bound_audit(config, report);
  else if (config.experiment == "register-sizing-audit")
    run_register_sizing_audit(config, report);
  else if (config.experiment == "lloyd-convergence")
    run_lloyd_convergence(config, report);
  else if (config.experiment == "supervised-demo")
    run_supervised_demo(config, report);
  else if (config.experiment == "unsupervised-demo")
    run_unsupervised_demo(config, report);
  else if (config.experiment == "grover-sweep")
    run_grover_sweep(config, report);
  else if (config.experiment == "runtime-scaling")
    run_runtime_scaling(config, report);
  else
    throw std::invalid_argument("run_experiment: unknown experiment " + config.experiment);
  report.wall_ms = elapsed_ms(start);
  return report;
}

} // namespace qbinclass::harness
