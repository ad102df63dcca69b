// Core value types: pure states, density matrices, spectral decompositions,
// unitaries. All types validate their invariants at construction and are
// immutable afterwards, so they are safe to share across threads.
//
// Convention: qubit ordering is little-endian. Basis index j has qubit 0 as
// its least-significant bit.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qbinclass {

template <typename Scalar>
using VectorT = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixT = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using RealVectorT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

namespace tol {
// Structural invariants (norms, Hermiticity, trace).
inline constexpr double structural = 1e-10;
// Reconstruction / orthonormality residuals after eigendecomposition.
inline constexpr double reconstruction = 1e-9;
// Allowed negative slack on eigenvalues of a PSD matrix; anything in
// [-psd_slack, 0) is treated as numerical noise and clipped to 0.
inline constexpr double psd_slack = 1e-9;
} // namespace tol

inline int qubits_for_dim(std::int64_t dim, const char* what) {
  if (dim < 2) throw std::invalid_argument(std::string(what) + ": dimension must be at least 2");
  int n = 0;
  std::int64_t d = dim;
  while ((d & 1) == 0) {
    d >>= 1;
    ++n;
  }
  if (d != 1) throw std::invalid_argument(std::string(what) + ": dimension is not a power of 2");
  return n;
}

template <typename Scalar = double>
class PureStateT {
public:
  // num_qubits < 0 means "infer from the vector length".
  explicit PureStateT(VectorT<Scalar> amplitudes, int num_qubits = -1)
      : amps_(std::move(amplitudes)), n_(num_qubits) {
    if (n_ < 0) n_ = qubits_for_dim(amps_.size(), "PureState");
    if (n_ < 1) throw std::invalid_argument("PureState: need at least one qubit");
    if (amps_.size() != (std::int64_t(1) << n_))
      throw std::invalid_argument("PureState: amplitude count does not match qubit count");
    const Scalar norm = amps_.norm();
    if (std::abs(norm - Scalar(1)) > Scalar(tol::structural))
      throw std::invalid_argument("PureState: vector is not normalized");
  }

  static PureStateT basis_state(int num_qubits, std::int64_t index) {
    const std::int64_t dim = std::int64_t(1) << num_qubits;
    if (index < 0 || index >= dim) throw std::invalid_argument("PureState: basis index out of range");
    VectorT<Scalar> v = VectorT<Scalar>::Zero(dim);
    v(index) = std::complex<Scalar>(1, 0);
    return PureStateT(std::move(v), num_qubits);
  }

  const VectorT<Scalar>& amplitudes() const { return amps_; }
  int num_qubits() const { return n_; }
  std::int64_t dim() const { return amps_.size(); }

private:
  VectorT<Scalar> amps_;
  int n_;
};

template <typename Scalar = double>
class DensityMatrixT {
public:
  explicit DensityMatrixT(MatrixT<Scalar> entries)
      : entries_(std::move(entries)), n_(0) {
    if (entries_.rows() != entries_.cols())
      throw std::invalid_argument("DensityMatrix: matrix is not square");
    n_ = qubits_for_dim(entries_.rows(), "DensityMatrix");
    const Scalar herm = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > Scalar(tol::structural))
      throw std::invalid_argument("DensityMatrix: matrix is not Hermitian");
    const Scalar tr = entries_.trace().real();
    if (std::abs(tr - Scalar(1)) > Scalar(tol::structural))
      throw std::invalid_argument("DensityMatrix: trace is not 1");
    Eigen::SelfAdjointEigenSolver<MatrixT<Scalar>> solver(entries_, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -Scalar(tol::psd_slack))
      throw std::invalid_argument("DensityMatrix: matrix is not positive semidefinite");
  }

  const MatrixT<Scalar>& entries() const { return entries_; }
  int num_qubits() const { return n_; }
  std::int64_t dim() const { return entries_.rows(); }

private:
  MatrixT<Scalar> entries_;
  int n_;
};

template <typename Scalar = double>
class SpectralDecompositionT {
public:
  SpectralDecompositionT(RealVectorT<Scalar> eigenvalues,
                         std::vector<PureStateT<Scalar>> eigenvectors)
      : eigenvalues_(std::move(eigenvalues)), eigenvectors_(std::move(eigenvectors)) {
    const std::int64_t count = eigenvalues_.size();
    if (count == 0 || std::int64_t(eigenvectors_.size()) != count)
      throw std::invalid_argument("SpectralDecomposition: eigenvalue/eigenvector count mismatch");
    for (std::int64_t j = 0; j + 1 < count; ++j)
      if (eigenvalues_(j) < eigenvalues_(j + 1))
        throw std::invalid_argument("SpectralDecomposition: eigenvalues not sorted descending");
    for (std::int64_t j = 0; j < count; ++j)
      if (eigenvalues_(j) < -Scalar(tol::psd_slack) || eigenvalues_(j) > Scalar(1) + Scalar(tol::psd_slack))
        throw std::invalid_argument("SpectralDecomposition: eigenvalue outside [0, 1] range");
    for (std::int64_t a = 0; a < count; ++a)
      for (std::int64_t b = a; b < count; ++b) {
        const std::complex<Scalar> ip =
            eigenvectors_[a].amplitudes().dot(eigenvectors_[b].amplitudes());
        const Scalar expected = (a == b) ? Scalar(1) : Scalar(0);
        if (std::abs(ip - std::complex<Scalar>(expected, 0)) > Scalar(tol::reconstruction))
          throw std::invalid_argument("SpectralDecomposition: eigenvectors not orthonormal");
      }
  }

  const RealVectorT<Scalar>& eigenvalues() const { return eigenvalues_; }
  const std::vector<PureStateT<Scalar>>& eigenvectors() const { return eigenvectors_; }
  std::int64_t size() const { return eigenvalues_.size(); }

private:
  RealVectorT<Scalar> eigenvalues_;
  std::vector<PureStateT<Scalar>> eigenvectors_;
};

template <typename Scalar = double>
class UnitaryMatrixT {
public:
  explicit UnitaryMatrixT(MatrixT<Scalar> entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols())
      throw std::invalid_argument("UnitaryMatrix: matrix is not square");
    const MatrixT<Scalar> gram = entries_.adjoint() * entries_;
    const Scalar dev =
        (gram - MatrixT<Scalar>::Identity(entries_.rows(), entries_.cols())).cwiseAbs().maxCoeff();
    if (dev > Scalar(tol::reconstruction))
      throw std::invalid_argument("UnitaryMatrix: matrix is not unitary");
  }

  const MatrixT<Scalar>& entries() const { return entries_; }
  std::int64_t dimension() const { return entries_.rows(); }

private:
  MatrixT<Scalar> entries_;
};

using Vector = VectorT<double>;
using Matrix = MatrixT<double>;
using RealVector = RealVectorT<double>;
using PureState = PureStateT<double>;
using DensityMatrix = DensityMatrixT<double>;
using SpectralDecomposition = SpectralDecompositionT<double>;
using UnitaryMatrix = UnitaryMatrixT<double>;

} // namespace qbinclass
