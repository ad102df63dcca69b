// Reference implementations used only by the test suites. Everything here is
// written directly against Eigen/std with naive algorithms, independent of the
// library under test, so the two sides can disagree.
#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <complex>
#include <cstdint>
#include <vector>

namespace oracle {

using cd = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

// <sigma|rho|sigma> by explicit double loop.
inline double fidelity(const Mat& rho, const Vec& sigma) {
  cd acc(0.0, 0.0);
  for (Eigen::Index r = 0; r < rho.rows(); ++r)
    for (Eigen::Index c = 0; c < rho.cols(); ++c)
      acc += std::conj(sigma(r)) * rho(r, c) * sigma(c);
  return acc.real();
}

// Dense embedding of a k-qubit gate into an n-qubit operator, little-endian:
// gate bit i corresponds to qubit targets[i].
inline Mat embed_gate(const Mat& gate, const std::vector<int>& targets, int n) {
  const std::int64_t dim = std::int64_t(1) << n;
  const int k = int(targets.size());
  const std::int64_t gdim = std::int64_t(1) << k;
  Mat full = Mat::Zero(dim, dim);
  for (std::int64_t col = 0; col < dim; ++col) {
    std::int64_t gcol = 0;
    for (int i = 0; i < k; ++i)
      if ((col >> targets[i]) & 1) gcol |= std::int64_t(1) << i;
    std::int64_t rest = col;
    for (int i = 0; i < k; ++i) rest &= ~(std::int64_t(1) << targets[i]);
    for (std::int64_t grow = 0; grow < gdim; ++grow) {
      std::int64_t row = rest;
      for (int i = 0; i < k; ++i)
        if ((grow >> i) & 1) row |= std::int64_t(1) << targets[i];
      full(row, col) = gate(grow, gcol);
    }
  }
  return full;
}

// e^{A} by Taylor series with scaling and squaring.
inline Mat mat_exp(const Mat& a) {
  const Eigen::Index d = a.rows();
  double norm = a.cwiseAbs().maxCoeff() * double(d);
  int squarings = 0;
  while (norm > 0.25 && squarings < 40) {
    norm *= 0.5;
    ++squarings;
  }
  Mat scaled = a / double(std::int64_t(1) << squarings);
  Mat term = Mat::Identity(d, d);
  Mat sum = term;
  for (int i = 1; i <= 24; ++i) {
    term = (term * scaled) / double(i);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

// DFT matrix for t qubits over little-endian indices: column x is the
// transform of basis state |x>, entries e^{2 pi i x k / N} / sqrt(N).
inline Mat dft_matrix(int t) {
  const std::int64_t N = std::int64_t(1) << t;
  Mat f(N, N);
  const double w = 2.0 * M_PI / double(N);
  for (std::int64_t k = 0; k < N; ++k)
    for (std::int64_t x = 0; x < N; ++x)
      f(k, x) = std::polar(1.0 / std::sqrt(double(N)), w * double(k) * double(x));
  return f;
}

// Phase-estimation outcome distribution computed the long way: build the
// register state (1/sqrt N) sum_m e^{2 pi i theta m} |m>, apply the inverse
// DFT matrix, read off squared magnitudes.
inline Eigen::VectorXd kernel_via_dft(double theta, int t) {
  const std::int64_t N = std::int64_t(1) << t;
  Vec reg(N);
  for (std::int64_t m = 0; m < N; ++m)
    reg(m) = std::polar(1.0 / std::sqrt(double(N)), 2.0 * M_PI * theta * double(m));
  Vec out = dft_matrix(t).adjoint() * reg;
  return out.cwiseAbs2();
}

inline double trace_norm(const Mat& a) {
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues().sum();
}

} // namespace oracle
