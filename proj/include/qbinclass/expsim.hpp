// Produces the unitary e^{i tau rho}: exactly through the spectral
// decomposition, and approximately through repeated partial-swap interactions
// acting on a second state. Both paths realize the same +i sign convention;
// the partial-swap loop uses dt = -tau/steps to get there.
#pragma once

#include <cmath>
#include <cstdint>

#include "qbinclass/qcore.hpp"
#include "qbinclass/types.hpp"

namespace qbinclass {

enum class ExpMethod { exact, partial_swap };

template <typename Scalar = double>
struct ExponentiationPlanT {
  Scalar tau = Scalar(0.9);
  int steps = 1;
  ExpMethod method = ExpMethod::exact;

  void validate() const {
    if (!(tau > Scalar(0) && tau < Scalar(1)))
      throw std::domain_error("ExponentiationPlan: tau must lie in (0,1)");
    if (steps < 1) throw std::invalid_argument("ExponentiationPlan: steps must be at least 1");
  }
};

using ExponentiationPlan = ExponentiationPlanT<double>;

namespace detail {
template <typename Scalar>
void require_tau_domain(Scalar tau, bool allow_any_tau) {
  if (!allow_any_tau && !(tau > Scalar(0) && tau < Scalar(1)))
    throw std::domain_error("tau must lie in (0,1)");
}
} // namespace detail

// sum_j e^{i tau lambda_j} |phi_j><phi_j|. The (0,1) domain for tau is
// enforced unless the caller opts out.
template <typename Scalar>
UnitaryMatrixT<Scalar> exponentiate_exact(const DensityMatrixT<Scalar>& rho, Scalar tau,
                                          bool allow_any_tau = false) {
  detail::require_tau_domain(tau, allow_any_tau);
  const SpectralDecompositionT<Scalar> sd = spectral_decompose(rho);
  const std::int64_t d = rho.dim();
  MatrixT<Scalar> u = MatrixT<Scalar>::Zero(d, d);
  for (std::int64_t j = 0; j < d; ++j) {
    const std::complex<Scalar> ph = std::polar(Scalar(1), tau * sd.eigenvalues()(j));
    u += ph * (sd.eigenvectors()[size_t(j)].amplitudes() *
               sd.eigenvectors()[size_t(j)].amplitudes().adjoint());
  }
  return UnitaryMatrixT<Scalar>(std::move(u));
}

// Applies e^{i tau rho 2^j} to the low n qubits of `joint`, conditioned on
// `control_qubit` (which must lie in the upper register) being 1.
template <typename Scalar>
PureStateT<Scalar> controlled_power_apply(const PureStateT<Scalar>& joint,
                                          const DensityMatrixT<Scalar>& rho, Scalar tau,
                                          int power_exponent, int control_qubit) {
  const int n = rho.num_qubits();
  const int total = joint.num_qubits();
  if (total <= n) throw std::invalid_argument("controlled_power_apply: joint state has no register");
  if (control_qubit < n || control_qubit >= total)
    throw std::invalid_argument("controlled_power_apply: control qubit must lie in the register");
  if (power_exponent < 0)
    throw std::invalid_argument("controlled_power_apply: negative power exponent");
  const SpectralDecompositionT<Scalar> sd = spectral_decompose(rho);
  const std::int64_t d = rho.dim();
  const Scalar scaled = tau * Scalar(std::int64_t(1) << power_exponent);
  MatrixT<Scalar> u = MatrixT<Scalar>::Zero(d, d);
  for (std::int64_t j = 0; j < d; ++j)
    u += std::polar(Scalar(1), scaled * sd.eigenvalues()(j)) *
         (sd.eigenvectors()[size_t(j)].amplitudes() *
          sd.eigenvectors()[size_t(j)].amplitudes().adjoint());

  VectorT<Scalar> amps = joint.amplitudes();
  const int t = total - n;
  const int control_bit = control_qubit - n;
  for (std::int64_t r = 0; r < (std::int64_t(1) << t); ++r) {
    if (!((r >> control_bit) & 1)) continue;
    amps.segment(r * d, d) = (u * amps.segment(r * d, d)).eval();
  }
  return PureStateT<Scalar>(std::move(amps), total);
}

// One partial-swap interaction: Tr_1[e^{-i S dt} (rho (x) sigma) e^{i S dt}]
// with S the swap operator. Closed form:
//   cos^2(dt) sigma + sin^2(dt) rho - i cos(dt) sin(dt) [rho, sigma].
template <typename Scalar>
DensityMatrixT<Scalar> partial_swap_step(const DensityMatrixT<Scalar>& rho,
                                         const DensityMatrixT<Scalar>& sigma, Scalar dt) {
  if (rho.dim() != sigma.dim())
    throw std::invalid_argument("partial_swap_step: dimension mismatch");
  if (std::abs(dt) > Scalar(0.1))
    throw std::invalid_argument("partial_swap_step: |dt| must not exceed 0.1");
  const Scalar c = std::cos(dt);
  const Scalar s = std::sin(dt);
  const MatrixT<Scalar> comm = rho.entries() * sigma.entries() - sigma.entries() * rho.entries();
  MatrixT<Scalar> out = c * c * sigma.entries() + s * s * rho.entries() -
                        std::complex<Scalar>(0, 1) * c * s * comm;
  return DensityMatrixT<Scalar>((out + out.adjoint()) / Scalar(2));
}

// Iterated protocol realizing e^{+i tau rho} sigma e^{-i tau rho} to first
// order; trace-norm error against the exact conjugation is O(tau^2/steps).
template <typename Scalar>
DensityMatrixT<Scalar> exponentiate_partial_swap(const DensityMatrixT<Scalar>& rho,
                                                 const DensityMatrixT<Scalar>& sigma, Scalar tau,
                                                 int steps) {
  if (steps < 1) throw std::invalid_argument("exponentiate_partial_swap: steps must be at least 1");
  detail::require_tau_domain(tau, false);
  const Scalar dt = -tau / Scalar(steps);
  if (std::abs(dt) > Scalar(0.1))
    throw std::invalid_argument(
        "exponentiate_partial_swap: step size exceeds 0.1; increase steps");
  DensityMatrixT<Scalar> state = sigma;
  for (int i = 0; i < steps; ++i) state = partial_swap_step(rho, state, dt);
  return state;
}

} // namespace qbinclass
