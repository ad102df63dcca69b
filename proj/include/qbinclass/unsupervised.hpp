#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qbinclass/qcore.hpp"
#include "qbinclass/qpe.hpp"
#include "qbinclass/rng.hpp"
#include "qbinclass/types.hpp"

// Unsupervised binary classification over the computational basis: a label
// oracle marks the class-1 indices, Grover amplification prepares reference
// states concentrated on the marked set and on its complement, and unknown
// states are labeled by comparing fidelities against the two references.

namespace qbinclass {

// Raised when a marked set of size 0 or N leaves no Grover rotation to run.
class degenerate_oracle_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class LabelOracle {
 public:
  explicit LabelOracle(std::vector<int> labels) : labels_(std::move(labels)) {
    const std::size_t size = labels_.size();
    if (size < 2 || (size & (size - 1)) != 0)
      throw std::invalid_argument("LabelOracle: label table size must be a power of two >= 2");
    n_ = std::countr_zero(size);
    counted_ = 0;
    for (const int label : labels_) {
      if (label != 0 && label != 1)
        throw std::invalid_argument("LabelOracle: labels must be 0 or 1");
      counted_ += label;
    }
  }

  static LabelOracle from_indices(int n, const std::vector<std::int64_t>& marked) {
    std::vector<int> labels = blank(n);
    for (const std::int64_t j : marked) {
      if (j < 0 || j >= std::int64_t(labels.size()))
        throw std::invalid_argument("LabelOracle: marked index out of range");
      labels[std::size_t(j)] = 1;
    }
    return LabelOracle(std::move(labels));
  }

  static LabelOracle parity(int n) {
    std::vector<int> labels = blank(n);
    for (std::size_t j = 0; j < labels.size(); ++j)
      labels[j] = std::popcount(j) & 1 ? 1 : 0;
    return LabelOracle(std::move(labels));
  }

  static LabelOracle single(int n, std::int64_t j) { return from_indices(n, {j}); }

  static LabelOracle threshold(int n, std::int64_t j0) {
    std::vector<int> labels = blank(n);
    if (j0 < 0 || j0 > std::int64_t(labels.size()))
      throw std::invalid_argument("LabelOracle: threshold index out of range");
    for (std::size_t j = 0; j < labels.size(); ++j)
      labels[j] = std::int64_t(j) >= j0 ? 1 : 0;
    return LabelOracle(std::move(labels));
  }

  LabelOracle complement() const {
    std::vector<int> flipped = labels_;
    for (int& label : flipped) label = 1 - label;
    LabelOracle result(std::move(flipped));
    if (override_ >= 0) result.override_ = size() - override_;
    return result;
  }

  // Substitutes a deliberately wrong marked-set size; iteration counts then
  // derive from the override while the phase flips keep using the true labels.
  LabelOracle with_m_override(std::int64_t m) const {
    if (m < 0 || m > size())
      throw std::invalid_argument("LabelOracle: marked-count override out of range");
    LabelOracle result = *this;
    result.override_ = m;
    return result;
  }

  int num_qubits() const { return n_; }
  std::int64_t size() const { return std::int64_t(labels_.size()); }
  std::int64_t marked_count() const { return override_ >= 0 ? override_ : counted_; }
  std::int64_t actual_marked_count() const { return counted_; }
  bool has_override() const { return override_ >= 0; }
  int label(std::int64_t j) const { return labels_[std::size_t(j)]; }
  const std::vector<int>& labels() const { return labels_; }

 private:
  static std::vector<int> blank(int n) {
    if (n < 1 || n > 24) throw std::invalid_argument("LabelOracle: n out of range");
    return std::vector<int>(std::size_t(1) << n, 0);
  }

  std::vector<int> labels_;
  int n_ = 0;
  std::int64_t counted_ = 0;
  std::int64_t override_ = -1;
};

// Phase oracle: amplitude at index j picks up (-1)^{label(j)}.
template <typename Scalar = double>
PureStateT<Scalar> oracle_apply(const LabelOracle& oracle, const PureStateT<Scalar>& state) {
  if (state.dim() != oracle.size())
    throw std::invalid_argument("oracle_apply: dimension mismatch");
  VectorT<Scalar> amps = state.amplitudes();
  for (std::int64_t j = 0; j < amps.size(); ++j)
    if (oracle.label(j)) amps(j) = -amps(j);
  return PureStateT<Scalar>(std::move(amps), state.num_qubits());
}

// Global pi phase: negates every amplitude. Observationally inert.
template <typename Scalar = double>
PureStateT<Scalar> u_pi(const PureStateT<Scalar>& state) {
  return PureStateT<Scalar>(VectorT<Scalar>(-state.amplitudes()), state.num_qubits());
}

// Reflection about the uniform superposition: a -> 2*mean(a) - a.
template <typename Scalar = double>
PureStateT<Scalar> grover_diffusion(const PureStateT<Scalar>& state) {
  const std::complex<Scalar> mu = state.amplitudes().mean();
  VectorT<Scalar> amps = Scalar(2) * mu * VectorT<Scalar>::Ones(state.dim()) - state.amplitudes();
  return PureStateT<Scalar>(std::move(amps), state.num_qubits());
}

// Optimal iteration count round_half_up(pi/(4 asin sqrt(M/N)) - 1/2); the
// nudge keeps exact integer ratios from rounding down.
inline int grover_iterations(std::int64_t n_total, std::int64_t marked) {
  if (n_total < 2) throw std::invalid_argument("grover_iterations: N must be at least 2");
  if (marked <= 0 || marked >= n_total)
    throw degenerate_oracle_error(
        "grover_iterations: marked count admits no Grover rotation (need 1 <= M <= N-1)");
  const double theta = std::asin(std::sqrt(double(marked) / double(n_total)));
  const double raw = std::numbers::pi_v<double> / (4.0 * theta);
  return std::max(0, int(std::floor(raw + 1e-12)));
}

namespace detail {

template <typename Scalar>
PureStateT<Scalar> uniform_superposition(int n) {
  PureStateT<Scalar> state = PureStateT<Scalar>::basis_state(n, 0);
  const UnitaryMatrixT<Scalar> h = gates::hadamard<Scalar>();
  for (int q = 0; q < n; ++q) state = apply_gate(state, h, {q});
  return state;
}

template <typename Scalar>
PureStateT<Scalar> grover_run(const LabelOracle& oracle, int iterations) {
  PureStateT<Scalar> state = uniform_superposition<Scalar>(oracle.num_qubits());
  for (int i = 0; i < iterations; ++i) {
    state = oracle_apply(oracle, state);
    state = grover_diffusion(state);
  }
  return state;
}

} // namespace detail

// Uniform superposition over the marked indices.
template <typename Scalar = double>
PureStateT<Scalar> ideal_m(const LabelOracle& oracle) {
  const std::int64_t m = oracle.actual_marked_count();
  if (m <= 0) throw degenerate_oracle_error("ideal_m: no marked indices");
  VectorT<Scalar> amps = VectorT<Scalar>::Zero(oracle.size());
  const Scalar amplitude = Scalar(1) / std::sqrt(Scalar(m));
  for (std::int64_t j = 0; j < oracle.size(); ++j)
    if (oracle.label(j)) amps(j) = amplitude;
  return PureStateT<Scalar>(std::move(amps), oracle.num_qubits());
}

// Uniform superposition over the unmarked indices.
template <typename Scalar = double>
PureStateT<Scalar> ideal_m_perp(const LabelOracle& oracle) {
  return ideal_m<Scalar>(oracle.complement());
}

// Hadamard layer then k Grover iterations toward the marked set. k < 0 picks
// the optimal count for the oracle's (possibly overridden) marked-set size.
template <typename Scalar = double>
PureStateT<Scalar> prepare_m_tilde(const LabelOracle& oracle, int k = -1) {
  const std::int64_t m = oracle.marked_count();
  if (m <= 0 || m >= oracle.size())
    throw degenerate_oracle_error("prepare_m_tilde: degenerate marked set");
  const int iterations = k >= 0 ? k : grover_iterations(oracle.size(), m);
  return detail::grover_run<Scalar>(oracle, iterations);
}

// Same amplification aimed at the complement: Grover with the complement
// oracle and an iteration count for marked-set size N - M.
template <typename Scalar = double>
PureStateT<Scalar> prepare_m_perp_tilde(const LabelOracle& oracle, int k_perp = -1) {
  const std::int64_t m = oracle.marked_count();
  if (m <= 0 || m >= oracle.size())
    throw degenerate_oracle_error("prepare_m_perp_tilde: degenerate marked set");
  const LabelOracle flipped = oracle.complement();
  const int iterations =
      k_perp >= 0 ? k_perp : grover_iterations(flipped.size(), flipped.marked_count());
  return detail::grover_run<Scalar>(flipped, iterations);
}

template <typename Scalar = double>
struct ReferenceStatesT {
  PureStateT<Scalar> m_tilde;
  PureStateT<Scalar> m_perp_tilde;
  PureStateT<Scalar> m_ideal;
  PureStateT<Scalar> m_perp_ideal;
  Scalar overlap_m = Scalar(0);
  Scalar overlap_m_perp = Scalar(0);
  int iterations_m = 0;
  int iterations_m_perp = 0;
};

using ReferenceStates = ReferenceStatesT<double>;

template <typename Scalar = double>
ReferenceStatesT<Scalar> prepare_references(const LabelOracle& oracle, int k = -1,
                                            int k_perp = -1) {
  const std::int64_t m = oracle.marked_count();
  if (m <= 0 || m >= oracle.size())
    throw degenerate_oracle_error("prepare_references: degenerate marked set");
  const int iterations = k >= 0 ? k : grover_iterations(oracle.size(), m);
  const int iterations_perp =
      k_perp >= 0 ? k_perp : grover_iterations(oracle.size(), oracle.size() - m);
  ReferenceStatesT<Scalar> refs{prepare_m_tilde<Scalar>(oracle, iterations),
                                prepare_m_perp_tilde<Scalar>(oracle, iterations_perp),
                                ideal_m<Scalar>(oracle),
                                ideal_m_perp<Scalar>(oracle),
                                Scalar(0),
                                Scalar(0),
                                iterations,
                                iterations_perp};
  refs.overlap_m = std::norm(refs.m_ideal.amplitudes().dot(refs.m_tilde.amplitudes()));
  refs.overlap_m_perp =
      std::norm(refs.m_perp_ideal.amplitudes().dot(refs.m_perp_tilde.amplitudes()));
  return refs;
}

template <typename Scalar = double>
struct BasisDecisionT {
  int label = 0;
  Scalar q = Scalar(0);
  Scalar threshold = Scalar(0);
  bool low_confidence = false;
  std::int64_t shots = 0;
};

using BasisDecision = BasisDecisionT<double>;

namespace detail {

// Absorbs round-off so an exactly-boundary probability (e.g. 1/N from an
// unamplified uniform state) compares as not-above the threshold.
inline constexpr double kThresholdSlack = 1e-12;

template <typename Scalar>
BasisDecisionT<Scalar> decide_q(Scalar q, Scalar threshold, std::int64_t dim,
                                std::int64_t shots) {
  BasisDecisionT<Scalar> decision;
  decision.threshold = threshold < Scalar(0) ? Scalar(1) / Scalar(dim) : threshold;
  decision.q = q;
  decision.label = q > decision.threshold + Scalar(kThresholdSlack) ? 1 : 0;
  decision.low_confidence =
      std::abs(q - decision.threshold) <= Scalar(0.25) * decision.threshold;
  decision.shots = shots;
  return decision;
}

} // namespace detail

// Labels basis index j by its probability under the amplified reference:
// 1 when q_j exceeds the threshold (default 1/N), else 0.
template <typename Scalar = double>
BasisDecisionT<Scalar> classify_basis_vector(std::int64_t j, const PureStateT<Scalar>& m_tilde,
                                             Scalar threshold = Scalar(-1)) {
  if (j < 0 || j >= m_tilde.dim())
    throw std::invalid_argument("classify_basis_vector: index out of range");
  const Scalar q = std::norm(m_tilde.amplitudes()(j));
  return detail::decide_q(q, threshold, m_tilde.dim(), 0);
}

// Shot-sampled variant: q_j is the empirical frequency of outcome j.
template <typename Scalar = double>
BasisDecisionT<Scalar> classify_basis_vector_sampled(std::int64_t j,
                                                     const PureStateT<Scalar>& m_tilde,
                                                     std::int64_t shots, std::uint64_t seed,
                                                     Scalar threshold = Scalar(-1)) {
  if (j < 0 || j >= m_tilde.dim())
    throw std::invalid_argument("classify_basis_vector: index out of range");
  if (shots < 1) throw std::invalid_argument("classify_basis_vector: shots must be positive");
  const RealVectorT<Scalar> probs = m_tilde.amplitudes().cwiseAbs2();
  const std::vector<std::int64_t> outcomes = sample_outcomes(probs, shots, seed);
  std::int64_t hits = 0;
  for (const std::int64_t outcome : outcomes)
    if (outcome == j) ++hits;
  return detail::decide_q(Scalar(hits) / Scalar(shots), threshold, m_tilde.dim(), shots);
}

enum class ClassifyMode { exact, estimated };

template <typename Scalar = double>
struct StateDecisionT {
  int label = 0;
  Scalar f_m = Scalar(0);
  Scalar f_perp = Scalar(0);
  FidelityEstimateT<Scalar> estimate_m;
  FidelityEstimateT<Scalar> estimate_perp;
  bool estimated = false;
};

using StateDecision = StateDecisionT<double>;

// Compares the fidelity of sigma against the two references; class 1 only
// when the marked-side fidelity is strictly larger (ties resolve to 0).
template <typename Scalar = double>
StateDecisionT<Scalar> classify_state(const PureStateT<Scalar>& sigma,
                                      const ReferenceStatesT<Scalar>& refs,
                                      const QpeConfigT<Scalar>& config, ClassifyMode mode) {
  if (sigma.dim() != refs.m_tilde.dim() || sigma.dim() != refs.m_perp_tilde.dim())
    throw std::invalid_argument("classify_state: dimension mismatch");
  StateDecisionT<Scalar> decision;
  const auto projector = [](const PureStateT<Scalar>& psi) {
    return DensityMatrixT<Scalar>(
        MatrixT<Scalar>(psi.amplitudes() * psi.amplitudes().adjoint()));
  };
  if (mode == ClassifyMode::exact) {
    decision.f_m = fidelity_exact(projector(refs.m_tilde), sigma);
    decision.f_perp = fidelity_exact(projector(refs.m_perp_tilde), sigma);
  } else {
    QpeConfigT<Scalar> cfg_m = config;
    cfg_m.seed = derive_seed(config.seed, 0);
    QpeConfigT<Scalar> cfg_perp = config;
    cfg_perp.seed = derive_seed(config.seed, 1);
    decision.estimate_m = estimate_fidelity(projector(refs.m_tilde), sigma, cfg_m);
    decision.estimate_perp = estimate_fidelity(projector(refs.m_perp_tilde), sigma, cfg_perp);
    decision.f_m = decision.estimate_m.value_clamped;
    decision.f_perp = decision.estimate_perp.value_clamped;
    decision.estimated = true;
  }
  decision.label = decision.f_m <= decision.f_perp ? 0 : 1;
  return decision;
}

} // namespace qbinclass
