#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qbinclass/expsim.hpp"
#include "qbinclass/qcore.hpp"
#include "qbinclass/rng.hpp"
#include "qbinclass/types.hpp"

// Phase-estimation fidelity pipeline. Eigenvalues lambda of a density matrix
// are rescaled to phases theta = lambda tau / (2 pi), read out through a
// t-qubit estimation register, and mapped back through the outcome grid
// Lambda_k = (2 pi / tau) 2^{-t} k. Three execution modes cover the same
// estimator: analytic-kernel (closed-form outcome law), full-circuit (dense
// state-vector simulation of the register circuit), and sampled (finite-shot
// draws from the outcome law).

namespace qbinclass {

enum class ExecutionMode { analytic_kernel, full_circuit, sampled };

inline const char* mode_name(ExecutionMode mode) {
  switch (mode) {
    case ExecutionMode::analytic_kernel: return "analytic-kernel";
    case ExecutionMode::full_circuit: return "full-circuit";
    case ExecutionMode::sampled: return "sampled";
  }
  return "unknown";
}

inline ExecutionMode parse_mode(std::string_view name) {
  if (name == "analytic-kernel") return ExecutionMode::analytic_kernel;
  if (name == "full-circuit") return ExecutionMode::full_circuit;
  if (name == "sampled") return ExecutionMode::sampled;
  throw std::invalid_argument("unknown execution mode '" + std::string(name) +
                              "'; expected analytic-kernel, full-circuit, or sampled");
}

template <typename Scalar = double>
struct QpeConfigT {
  int n = 1;
  int t = 6;
  Scalar tau = Scalar(0.9);
  ExecutionMode mode = ExecutionMode::analytic_kernel;
  std::int64_t shots = 4096;
  std::uint64_t seed = 0;

  void validate() const {
    if (n < 1) throw std::invalid_argument("QpeConfig: n must be at least 1");
    if (t < 1) throw std::invalid_argument("QpeConfig: t must be at least 1");
    if (t > 22)
      throw std::invalid_argument("QpeConfig: t exceeds the dense outcome-grid budget (22)");
    if (!(tau > Scalar(0) && tau < Scalar(1)))
      throw std::domain_error("QpeConfig: tau must lie in (0,1)");
    if (mode == ExecutionMode::full_circuit && n + t > 14)
      throw std::invalid_argument(
          "QpeConfig: register budget exceeded (n+t > 14 in full-circuit mode)");
    if (mode == ExecutionMode::sampled && shots < 1)
      throw std::invalid_argument("QpeConfig: shots must be at least 1 in sampled mode");
  }
};

using QpeConfig = QpeConfigT<double>;

// Measurement observable on the estimation register: outcome k is worth
// Lambda_k = (2 pi / tau) 2^{-t} k, an increasing grid from 0 to
// (2 pi / tau)(1 - 2^{-t}).
template <typename Scalar = double>
struct QpeObservableT {
  RealVectorT<Scalar> lambda_grid;
  int t = 0;
  Scalar tau = Scalar(0);

  QpeObservableT(int t_in, Scalar tau_in) : t(t_in), tau(tau_in) {
    if (t < 1) throw std::invalid_argument("QpeObservable: t must be at least 1");
    if (!(tau > Scalar(0) && tau < Scalar(1)))
      throw std::domain_error("QpeObservable: tau must lie in (0,1)");
    const std::int64_t count = std::int64_t(1) << t;
    // ldexp keeps the grid exact whenever 2 pi / tau is a dyadic rational.
    const Scalar unit =
        std::ldexp(Scalar(2) * std::numbers::pi_v<Scalar> / tau, -t);
    lambda_grid.resize(count);
    for (std::int64_t k = 0; k < count; ++k) lambda_grid(k) = unit * Scalar(k);
  }
};

using QpeObservable = QpeObservableT<double>;

template <typename Scalar = double>
struct FidelityEstimateT {
  Scalar value = Scalar(0);
  Scalar value_clamped = Scalar(0);
  Scalar error_bound = Scalar(0);
  RealVectorT<Scalar> per_eigenvalue_error;
  ExecutionMode mode = ExecutionMode::analytic_kernel;
  std::int64_t shots_used = 0;
  Scalar standard_error = Scalar(0);
};

using FidelityEstimate = FidelityEstimateT<double>;

// Probability that the register reads k when the true phase is theta:
// sin^2(2^t pi delta) / (2^{2t} sin^2(pi delta)) with delta = theta - k/2^t,
// and 1 when delta is an integer. Sums to 1 over k.
template <typename Scalar>
Scalar qpe_kernel(Scalar theta, int t, std::int64_t k) {
  if (t < 1) throw std::invalid_argument("qpe_kernel: t must be at least 1");
  const std::int64_t count = std::int64_t(1) << t;
  if (k < 0 || k >= count) throw std::invalid_argument("qpe_kernel: k out of range");
  if (!(theta >= Scalar(0) && theta < Scalar(1)))
    throw std::invalid_argument("qpe_kernel: theta must lie in [0,1)");
  const Scalar delta = theta - std::ldexp(Scalar(k), -t);
  if (delta == std::round(delta)) return Scalar(1);
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar num = std::sin(Scalar(count) * pi * delta);
  const Scalar den = Scalar(count) * std::sin(pi * delta);
  return (num * num) / (den * den);
}

namespace detail {

// tau / (2 pi) is computed first: when tau is an exact binary multiple of pi
// the ratio is a dyadic rational and exactly representable phases stay exact.
template <typename Scalar>
Scalar phase_of(Scalar lambda, Scalar tau) {
  if (!(lambda >= -Scalar(tol::psd_slack) && lambda <= Scalar(1) + Scalar(tol::psd_slack)))
    throw std::invalid_argument("phase_of: lambda must lie in [0,1]");
  const Scalar theta =
      std::clamp(lambda, Scalar(0), Scalar(1)) * (tau / (Scalar(2) * std::numbers::pi_v<Scalar>));
  if (!(theta < Scalar(1)))
    throw std::domain_error("phase_of: phase must lie below 1");
  return theta;
}

// Outcome grid actually used for decoding. The wrapped variant re-maps the
// upper half of the register (k/2^t > 1/2) to negative values, removing the
// upward bias the verbatim grid has near theta = 0.
template <typename Scalar>
RealVectorT<Scalar> decoded_grid(int t, Scalar tau, bool wrapped) {
  QpeObservableT<Scalar> obs(t, tau);
  if (!wrapped) return obs.lambda_grid;
  const std::int64_t count = std::int64_t(1) << t;
  const Scalar full_turn = Scalar(2) * std::numbers::pi_v<Scalar> / tau;
  RealVectorT<Scalar> grid = obs.lambda_grid;
  for (std::int64_t k = 0; k < count; ++k)
    if (2 * k > count) grid(k) -= full_turn;
  return grid;
}

} // namespace detail

// lambda_tilde = sum_k Lambda_k qpe_kernel(theta, t, k). The wrapped variant
// decodes the upper half of the register as negative and clamps the result
// at 0.
template <typename Scalar>
Scalar estimate_eigenvalue(Scalar lambda_j, const QpeConfigT<Scalar>& config,
                           bool wrapped = false) {
  config.validate();
  const Scalar theta = detail::phase_of(lambda_j, config.tau);
  const RealVectorT<Scalar> grid = detail::decoded_grid(config.t, config.tau, wrapped);
  Scalar sum = Scalar(0);
  for (std::int64_t k = 0; k < grid.size(); ++k)
    sum += grid(k) * qpe_kernel(theta, config.t, k);
  return wrapped ? std::max(Scalar(0), sum) : sum;
}

template <typename Scalar>
Scalar error_bound(const SpectralDecompositionT<Scalar>& spectrum,
                   const QpeConfigT<Scalar>& config, bool wrapped = false) {
  Scalar worst = Scalar(0);
  for (std::int64_t j = 0; j < spectrum.size(); ++j) {
    const Scalar lam = spectrum.eigenvalues()(j);
    worst = std::max(worst, std::abs(lam - estimate_eigenvalue(lam, config, wrapped)));
  }
  return worst;
}

// Register width for m phase bits at failure probability epsilon. The
// corrected variant adds ceil(log2(2 pi / tau)) bits so the accuracy claim
// holds in eigenvalue units after the Lambda_k rescaling, not just in phase
// units.
template <typename Scalar>
int register_size(int m, Scalar epsilon, Scalar tau, bool corrected) {
  if (m < 1) throw std::invalid_argument("register_size: m must be at least 1");
  if (!(epsilon > Scalar(0) && epsilon < Scalar(1)))
    throw std::invalid_argument("register_size: epsilon must lie in (0,1)");
  const auto ceil_log2 = [](Scalar x) {
    return int(std::ceil(std::log2(x) - Scalar(1e-12)));
  };
  int t = m + ceil_log2(Scalar(2) + Scalar(1) / (Scalar(2) * epsilon));
  if (corrected) {
    if (!(tau > Scalar(0) && tau < Scalar(1)))
      throw std::domain_error("register_size: tau must lie in (0,1)");
    t += ceil_log2(Scalar(2) * std::numbers::pi_v<Scalar> / tau);
  }
  return t;
}

// Quantum Fourier transform on the `count` qubits starting at `first`, with
// qubit `first` the least significant bit of the transformed index. The
// forward direction maps |x> to (1/sqrt(N)) sum_k e^{2 pi i x k / N} |k>.
template <typename Scalar>
PureStateT<Scalar> apply_qft(PureStateT<Scalar> state, int first, int count,
                             bool inverse = false) {
  if (first < 0 || count < 1 || first + count > state.num_qubits())
    throw std::invalid_argument("apply_qft: qubit range out of bounds");
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const auto reverse_order = [&](PureStateT<Scalar> s) {
    for (int i = 0; i < count / 2; ++i)
      s = apply_gate(s, gates::swap_gate<Scalar>(), {first + i, first + count - 1 - i});
    return s;
  };
  if (!inverse) {
    for (int j = count - 1; j >= 0; --j) {
      state = apply_gate(state, gates::hadamard<Scalar>(), {first + j});
      for (int m = j - 1; m >= 0; --m)
        state = apply_gate(
            state, gates::controlled_phase<Scalar>(pi / Scalar(std::int64_t(1) << (j - m))),
            {first + m, first + j});
    }
    return reverse_order(std::move(state));
  }
  state = reverse_order(std::move(state));
  for (int j = 0; j < count; ++j) {
    for (int m = 0; m < j; ++m)
      state = apply_gate(
          state, gates::controlled_phase<Scalar>(-pi / Scalar(std::int64_t(1) << (j - m))),
          {first + m, first + j});
    state = apply_gate(state, gates::hadamard<Scalar>(), {first + j});
  }
  return state;
}

// Full estimation circuit: psi on the low n qubits, a zeroed t-qubit register
// above it, Hadamards on the register, controlled powers of e^{i tau rho},
// and the inverse Fourier transform on the register.
template <typename Scalar>
PureStateT<Scalar> build_qpe_state(const DensityMatrixT<Scalar>& rho,
                                   const PureStateT<Scalar>& psi,
                                   const QpeConfigT<Scalar>& config) {
  config.validate();
  if (config.mode != ExecutionMode::full_circuit)
    throw std::invalid_argument("build_qpe_state: mode mismatch (full-circuit required)");
  if (rho.num_qubits() != config.n || psi.num_qubits() != config.n)
    throw std::invalid_argument("build_qpe_state: dimension mismatch with config");
  const std::int64_t d = rho.dim();
  VectorT<Scalar> amps = VectorT<Scalar>::Zero(d << config.t);
  amps.segment(0, d) = psi.amplitudes();
  PureStateT<Scalar> state(std::move(amps), config.n + config.t);
  for (int j = 0; j < config.t; ++j)
    state = apply_gate(state, gates::hadamard<Scalar>(), {config.n + j});
  for (int j = 0; j < config.t; ++j)
    state = controlled_power_apply(state, rho, config.tau, j, config.n + j);
  return apply_qft(std::move(state), config.n, config.t, true);
}

// Probability of each register outcome k in a joint (system + register)
// state: the squared norm of the length-2^n block at offset k 2^n.
template <typename Scalar>
RealVectorT<Scalar> register_marginal(const PureStateT<Scalar>& joint,
                                      const QpeConfigT<Scalar>& config) {
  config.validate();
  if (joint.num_qubits() != config.n + config.t)
    throw std::invalid_argument("register_marginal: joint state must have n+t qubits");
  const std::int64_t d = std::int64_t(1) << config.n;
  const std::int64_t count = std::int64_t(1) << config.t;
  RealVectorT<Scalar> p(count);
  for (std::int64_t k = 0; k < count; ++k)
    p(k) = joint.amplitudes().segment(k * d, d).squaredNorm();
  return p;
}

// Closed-form register marginal: sum_j |<phi_j|psi>|^2 qpe_kernel(theta_j).
// Equals the marginal of the built circuit state, without simulating it.
template <typename Scalar>
RealVectorT<Scalar> analytic_register_marginal(const DensityMatrixT<Scalar>& rho,
                                               const PureStateT<Scalar>& psi,
                                               const QpeConfigT<Scalar>& config) {
  config.validate();
  if (rho.num_qubits() != config.n || psi.num_qubits() != config.n)
    throw std::invalid_argument("analytic_register_marginal: dimension mismatch with config");
  const SpectralDecompositionT<Scalar> sd = spectral_decompose(rho);
  const std::int64_t count = std::int64_t(1) << config.t;
  RealVectorT<Scalar> p = RealVectorT<Scalar>::Zero(count);
  for (std::int64_t j = 0; j < sd.size(); ++j) {
    const Scalar w =
        std::norm(sd.eigenvectors()[size_t(j)].amplitudes().dot(psi.amplitudes()));
    if (w == Scalar(0)) continue;
    const Scalar theta = detail::phase_of(sd.eigenvalues()(j), config.tau);
    for (std::int64_t k = 0; k < count; ++k)
      p(k) += w * qpe_kernel(theta, config.t, k);
  }
  return p;
}

// Expected observable value in analytic-kernel mode:
// sum_j |<phi_j|psi>|^2 lambda_tilde_j.
template <typename Scalar>
Scalar expectation_F(const DensityMatrixT<Scalar>& rho, const PureStateT<Scalar>& psi,
                     const QpeConfigT<Scalar>& config) {
  config.validate();
  if (config.mode != ExecutionMode::analytic_kernel)
    throw std::invalid_argument("expectation_F: mode mismatch (analytic-kernel required)");
  if (rho.num_qubits() != config.n || psi.num_qubits() != config.n)
    throw std::invalid_argument("expectation_F: dimension mismatch with config");
  const SpectralDecompositionT<Scalar> sd = spectral_decompose(rho);
  Scalar sum = Scalar(0);
  for (std::int64_t j = 0; j < sd.size(); ++j) {
    const Scalar w =
        std::norm(sd.eigenvectors()[size_t(j)].amplitudes().dot(psi.amplitudes()));
    if (w == Scalar(0)) continue;
    sum += w * estimate_eigenvalue(sd.eigenvalues()(j), config);
  }
  return sum;
}

// Expected observable value in full-circuit mode: sum_k Lambda_k p(k) over
// the register marginal of a prepared joint state.
template <typename Scalar>
Scalar expectation_F(const PureStateT<Scalar>& joint, const QpeConfigT<Scalar>& config) {
  config.validate();
  if (config.mode != ExecutionMode::full_circuit)
    throw std::invalid_argument("expectation_F: mode mismatch (full-circuit required)");
  const RealVectorT<Scalar> p = register_marginal(joint, config);
  return p.dot(QpeObservableT<Scalar>(config.t, config.tau).lambda_grid);
}

// Draws outcome indices from an unnormalized nonnegative weight vector,
// deterministically in the seed.
template <typename Scalar>
std::vector<std::int64_t> sample_outcomes(const RealVectorT<Scalar>& distribution,
                                          std::int64_t shots, std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("sample_outcomes: shots must be at least 1");
  const std::int64_t count = distribution.size();
  if (count < 1) throw std::invalid_argument("sample_outcomes: empty distribution");
  std::vector<Scalar> cdf(static_cast<size_t>(count));
  Scalar acc = Scalar(0);
  for (std::int64_t i = 0; i < count; ++i) {
    if (distribution(i) < -Scalar(1e-12))
      throw std::invalid_argument("sample_outcomes: negative probability");
    acc += std::max(Scalar(0), distribution(i));
    cdf[static_cast<size_t>(i)] = acc;
  }
  if (!(acc > Scalar(0)))
    throw std::invalid_argument("sample_outcomes: distribution sums to zero");
  Rng rng(seed);
  std::vector<std::int64_t> out;
  out.reserve(static_cast<size_t>(shots));
  for (std::int64_t s = 0; s < shots; ++s) {
    const Scalar x = Scalar(rng.uniform01()) * acc;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
    out.push_back(it == cdf.end() ? count - 1 : std::int64_t(it - cdf.begin()));
  }
  return out;
}

template <typename Scalar = double>
struct SampleSummaryT {
  Scalar mean = Scalar(0);
  Scalar standard_error = Scalar(0);
};

using SampleSummary = SampleSummaryT<double>;

// Finite-shot realization of the observable average: draws `shots` register
// outcomes from p(k) and reports the sample mean of Lambda_k with its
// standard error (0 for a single shot).
template <typename Scalar>
SampleSummaryT<Scalar> sample_F(const RealVectorT<Scalar>& distribution,
                                const QpeConfigT<Scalar>& config) {
  config.validate();
  if (config.mode != ExecutionMode::sampled)
    throw std::invalid_argument("sample_F: mode mismatch (sampled required)");
  if (distribution.size() != (std::int64_t(1) << config.t))
    throw std::invalid_argument("sample_F: distribution length must be 2^t");
  const std::vector<std::int64_t> ks = sample_outcomes(distribution, config.shots, config.seed);
  const QpeObservableT<Scalar> obs(config.t, config.tau);
  Scalar sum = Scalar(0);
  for (const std::int64_t k : ks) sum += obs.lambda_grid(k);
  SampleSummaryT<Scalar> summary;
  summary.mean = sum / Scalar(ks.size());
  if (ks.size() > 1) {
    Scalar ss = Scalar(0);
    for (const std::int64_t k : ks) {
      const Scalar dev = obs.lambda_grid(k) - summary.mean;
      ss += dev * dev;
    }
    summary.standard_error =
        std::sqrt(ss / (Scalar(ks.size()) * Scalar(ks.size() - 1)));
  }
  return summary;
}

// End-to-end fidelity estimate of <sigma|rho|sigma> in the configured mode,
// with the a-priori decode-error bound over the spectrum of rho.
template <typename Scalar>
FidelityEstimateT<Scalar> estimate_fidelity(const DensityMatrixT<Scalar>& rho,
                                            const PureStateT<Scalar>& sigma,
                                            const QpeConfigT<Scalar>& config) {
  config.validate();
  if (rho.num_qubits() != config.n || sigma.num_qubits() != config.n)
    throw std::invalid_argument("estimate_fidelity: dimension mismatch with config");
  const SpectralDecompositionT<Scalar> sd = spectral_decompose(rho);
  FidelityEstimateT<Scalar> out;
  out.mode = config.mode;
  out.per_eigenvalue_error.resize(sd.size());
  for (std::int64_t j = 0; j < sd.size(); ++j) {
    const Scalar lam = sd.eigenvalues()(j);
    out.per_eigenvalue_error(j) = std::abs(lam - estimate_eigenvalue(lam, config));
  }
  out.error_bound = out.per_eigenvalue_error.maxCoeff();
  switch (config.mode) {
    case ExecutionMode::analytic_kernel:
      out.value = expectation_F(rho, sigma, config);
      break;
    case ExecutionMode::full_circuit:
      out.value = expectation_F(build_qpe_state(rho, sigma, config), config);
      break;
    case ExecutionMode::sampled: {
      const SampleSummaryT<Scalar> summary =
          sample_F(analytic_register_marginal(rho, sigma, config), config);
      out.value = summary.mean;
      out.standard_error = summary.standard_error;
      out.shots_used = config.shots;
      break;
    }
  }
  out.value_clamped = std::clamp(out.value, Scalar(0), Scalar(1));
  return out;
}

} // namespace qbinclass
