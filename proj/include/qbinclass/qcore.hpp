// State-vector plumbing: exact fidelity, eigendecomposition, in-place gate
// application, random state generation, and the small gate library.
#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>

#include "qbinclass/rng.hpp"
#include "qbinclass/types.hpp"

namespace qbinclass {

// <sigma|rho|sigma>, clamped to [0, 1].
template <typename Scalar>
Scalar fidelity_exact(const DensityMatrixT<Scalar>& rho, const PureStateT<Scalar>& sigma) {
  if (rho.dim() != sigma.dim())
    throw std::invalid_argument("fidelity_exact: dimension mismatch");
  const std::complex<Scalar> raw =
      sigma.amplitudes().dot(rho.entries() * sigma.amplitudes());
  const Scalar value = raw.real();
  if (value < Scalar(-1e-12) || value > Scalar(1) + Scalar(1e-12))
    throw std::runtime_error("fidelity_exact: value escaped [0, 1] beyond tolerance");
  return std::clamp(value, Scalar(0), Scalar(1));
}

// Eigendecomposition with eigenvalues sorted descending. Negative eigenvalues
// within the PSD slack are clipped to 0; ties keep the solver's vector order.
template <typename Scalar>
SpectralDecompositionT<Scalar> spectral_decompose(const DensityMatrixT<Scalar>& rho) {
  Eigen::SelfAdjointEigenSolver<MatrixT<Scalar>> solver(rho.entries());
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("spectral_decompose: eigensolver failed");
  const std::int64_t d = rho.dim();
  RealVectorT<Scalar> values(d);
  std::vector<PureStateT<Scalar>> vectors;
  vectors.reserve(size_t(d));
  for (std::int64_t j = 0; j < d; ++j) {
    // Eigen returns ascending order; reverse it.
    const std::int64_t src = d - 1 - j;
    Scalar lambda = solver.eigenvalues()(src);
    if (lambda < Scalar(0) && lambda >= -Scalar(tol::psd_slack)) lambda = Scalar(0);
    values(j) = lambda;
    VectorT<Scalar> v = solver.eigenvectors().col(src);
    v /= v.norm();
    vectors.emplace_back(std::move(v), rho.num_qubits());
  }
  SpectralDecompositionT<Scalar> out(std::move(values), std::move(vectors));
  MatrixT<Scalar> rebuilt = MatrixT<Scalar>::Zero(d, d);
  for (std::int64_t j = 0; j < d; ++j)
    rebuilt += out.eigenvalues()(j) *
               (out.eigenvectors()[size_t(j)].amplitudes() *
                out.eigenvectors()[size_t(j)].amplitudes().adjoint());
  if ((rebuilt - rho.entries()).cwiseAbs().maxCoeff() > Scalar(tol::reconstruction))
    throw std::runtime_error("spectral_decompose: reconstruction residual too large");
  return out;
}

// Applies a k-qubit gate to the listed target qubits; gate bit i addresses
// qubit targets[i]. The full 2^n operator is never formed: amplitudes are
// gathered and scattered per coset of the target bits.
template <typename Scalar>
PureStateT<Scalar> apply_gate(const PureStateT<Scalar>& state,
                              const UnitaryMatrixT<Scalar>& gate,
                              const std::vector<int>& targets) {
  const int n = state.num_qubits();
  const int k = int(targets.size());
  if (k < 1) throw std::invalid_argument("apply_gate: no target qubits");
  if (gate.dimension() != (std::int64_t(1) << k))
    throw std::invalid_argument("apply_gate: gate dimension does not match target count");
  std::int64_t target_mask = 0;
  for (int q : targets) {
    if (q < 0 || q >= n) throw std::invalid_argument("apply_gate: qubit index out of range");
    const std::int64_t bit = std::int64_t(1) << q;
    if (target_mask & bit) throw std::invalid_argument("apply_gate: duplicate target qubit");
    target_mask |= bit;
  }

  const std::int64_t dim = state.dim();
  const std::int64_t gdim = std::int64_t(1) << k;
  VectorT<Scalar> out = state.amplitudes();
  std::vector<std::int64_t> offsets(static_cast<size_t>(gdim));
  for (std::int64_t p = 0; p < gdim; ++p) {
    std::int64_t off = 0;
    for (int i = 0; i < k; ++i)
      if ((p >> i) & 1) off |= std::int64_t(1) << targets[size_t(i)];
    offsets[size_t(p)] = off;
  }
  VectorT<Scalar> scratch(gdim);
  for (std::int64_t base = 0; base < dim; ++base) {
    if (base & target_mask) continue;
    for (std::int64_t p = 0; p < gdim; ++p) scratch(p) = out(base | offsets[size_t(p)]);
    scratch = gate.entries() * scratch;
    for (std::int64_t p = 0; p < gdim; ++p) out(base | offsets[size_t(p)]) = scratch(p);
  }
  return PureStateT<Scalar>(std::move(out), n);
}

// Haar-random pure state: i.i.d. complex standard normal entries, normalized.
// Draw order is fixed (real part then imaginary part, index ascending) and is
// part of the reproducibility contract.
template <typename Scalar = double>
PureStateT<Scalar> random_pure_state(int n, std::uint64_t seed) {
  Rng rng(seed);
  const std::int64_t dim = std::int64_t(1) << n;
  VectorT<Scalar> v(dim);
  for (std::int64_t i = 0; i < dim; ++i) {
    const Scalar re = Scalar(rng.normal());
    const Scalar im = Scalar(rng.normal());
    v(i) = std::complex<Scalar>(re, im);
  }
  v /= v.norm();
  return PureStateT<Scalar>(std::move(v), n);
}

// Random density matrix of the given rank: flat-simplex weights over rank
// Haar-random pure states drawn from the same stream.
template <typename Scalar = double>
DensityMatrixT<Scalar> random_density(int n, int rank, std::uint64_t seed) {
  const std::int64_t dim = std::int64_t(1) << n;
  if (rank < 1 || std::int64_t(rank) > dim)
    throw std::invalid_argument("random_density: rank out of range");
  Rng rng(seed);
  std::vector<Scalar> weights(static_cast<size_t>(rank));
  Scalar total = 0;
  for (auto& w : weights) {
    w = Scalar(-std::log(rng.uniform()));
    total += w;
  }
  MatrixT<Scalar> rho = MatrixT<Scalar>::Zero(dim, dim);
  for (int i = 0; i < rank; ++i) {
    VectorT<Scalar> v(dim);
    for (std::int64_t c = 0; c < dim; ++c) {
      const Scalar re = Scalar(rng.normal());
      const Scalar im = Scalar(rng.normal());
      v(c) = std::complex<Scalar>(re, im);
    }
    v /= v.norm();
    rho += (weights[size_t(i)] / total) * (v * v.adjoint());
  }
  return DensityMatrixT<Scalar>((rho + rho.adjoint()) / Scalar(2));
}

namespace gates {

template <typename Scalar = double>
UnitaryMatrixT<Scalar> hadamard() {
  MatrixT<Scalar> m(2, 2);
  const Scalar s = Scalar(1) / std::sqrt(Scalar(2));
  m << std::complex<Scalar>(s, 0), std::complex<Scalar>(s, 0),
      std::complex<Scalar>(s, 0), std::complex<Scalar>(-s, 0);
  return UnitaryMatrixT<Scalar>(std::move(m));
}

template <typename Scalar = double>
UnitaryMatrixT<Scalar> pauli_x() {
  MatrixT<Scalar> m(2, 2);
  m << std::complex<Scalar>(0, 0), std::complex<Scalar>(1, 0),
      std::complex<Scalar>(1, 0), std::complex<Scalar>(0, 0);
  return UnitaryMatrixT<Scalar>(std::move(m));
}

template <typename Scalar = double>
UnitaryMatrixT<Scalar> phase(Scalar angle) {
  MatrixT<Scalar> m = MatrixT<Scalar>::Identity(2, 2);
  m(1, 1) = std::polar(Scalar(1), angle);
  return UnitaryMatrixT<Scalar>(std::move(m));
}

// Diagonal two-qubit gate: phase on |11>. Symmetric in its qubits.
template <typename Scalar = double>
UnitaryMatrixT<Scalar> controlled_phase(Scalar angle) {
  MatrixT<Scalar> m = MatrixT<Scalar>::Identity(4, 4);
  m(3, 3) = std::polar(Scalar(1), angle);
  return UnitaryMatrixT<Scalar>(std::move(m));
}

template <typename Scalar = double>
UnitaryMatrixT<Scalar> swap_gate() {
  MatrixT<Scalar> m = MatrixT<Scalar>::Zero(4, 4);
  m(0, 0) = m(3, 3) = std::complex<Scalar>(1, 0);
  m(1, 2) = m(2, 1) = std::complex<Scalar>(1, 0);
  return UnitaryMatrixT<Scalar>(std::move(m));
}

} // namespace gates
} // namespace qbinclass
