#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "qbinclass/qcore.hpp"
#include "qbinclass/qpe.hpp"
#include "qbinclass/rng.hpp"
#include "qbinclass/types.hpp"

// Supervised two-class state classification: each class is summarized by the
// weighted mixture of its training states, and an unknown pure state is
// assigned to the class whose density it has the larger estimated fidelity
// with. Ties go to class 0.

namespace qbinclass {

template <typename Scalar = double>
struct LabeledEnsembleT {
  std::vector<std::pair<PureStateT<Scalar>, Scalar>> members;
  int label = 0;

  LabeledEnsembleT(std::vector<std::pair<PureStateT<Scalar>, Scalar>> members_in, int label_in)
      : members(std::move(members_in)), label(label_in) {
    if (label != 0 && label != 1)
      throw std::invalid_argument("LabeledEnsemble: label must be 0 or 1");
    if (members.empty()) throw std::invalid_argument("LabeledEnsemble: empty ensemble");
    const std::int64_t dim = members.front().first.dim();
    Scalar total = Scalar(0);
    for (const auto& [state, weight] : members) {
      if (state.dim() != dim)
        throw std::invalid_argument("LabeledEnsemble: members have mixed dimensions");
      if (weight < -Scalar(1e-12))
        throw std::invalid_argument("LabeledEnsemble: negative weight");
      total += weight;
    }
    if (std::abs(total - Scalar(1)) > Scalar(1e-8))
      throw std::invalid_argument("LabeledEnsemble: weights must sum to 1");
  }

  static LabeledEnsembleT uniform(std::vector<PureStateT<Scalar>> states, int label_in) {
    if (states.empty()) throw std::invalid_argument("LabeledEnsemble: empty ensemble");
    const Scalar weight = Scalar(1) / Scalar(states.size());
    std::vector<std::pair<PureStateT<Scalar>, Scalar>> members_in;
    members_in.reserve(states.size());
    for (auto& state : states) members_in.emplace_back(std::move(state), weight);
    return LabeledEnsembleT(std::move(members_in), label_in);
  }

  std::int64_t dim() const { return members.front().first.dim(); }
  int num_qubits() const { return members.front().first.num_qubits(); }
};

using LabeledEnsemble = LabeledEnsembleT<double>;

template <typename Scalar = double>
struct TrainingModelT {
  DensityMatrixT<Scalar> rho0;
  DensityMatrixT<Scalar> rho1;
  std::int64_t ensemble_size0 = 0;
  std::int64_t ensemble_size1 = 0;
  std::uint64_t seed = 0;

  TrainingModelT(DensityMatrixT<Scalar> rho0_in, DensityMatrixT<Scalar> rho1_in,
                 std::int64_t size0 = 0, std::int64_t size1 = 0, std::uint64_t seed_in = 0)
      : rho0(std::move(rho0_in)), rho1(std::move(rho1_in)), ensemble_size0(size0),
        ensemble_size1(size1), seed(seed_in) {
    if (rho0.dim() != rho1.dim())
      throw std::invalid_argument("TrainingModel: class densities differ in dimension");
  }
};

using TrainingModel = TrainingModelT<double>;

// Weighted mixture sum_s w_s |sigma_s><sigma_s| of an ensemble.
template <typename Scalar>
DensityMatrixT<Scalar> build_class_density(const LabeledEnsembleT<Scalar>& ensemble) {
  const std::int64_t d = ensemble.dim();
  MatrixT<Scalar> rho = MatrixT<Scalar>::Zero(d, d);
  for (const auto& [state, weight] : ensemble.members) {
    if (weight <= Scalar(0)) continue;
    rho += weight * (state.amplitudes() * state.amplitudes().adjoint());
  }
  rho = ((rho + rho.adjoint()) / Scalar(2)).eval();
  return DensityMatrixT<Scalar>(std::move(rho));
}

template <typename Scalar>
TrainingModelT<Scalar> build_training_model(const LabeledEnsembleT<Scalar>& class0,
                                            const LabeledEnsembleT<Scalar>& class1,
                                            std::uint64_t seed = 0) {
  if (class0.label != 0 || class1.label != 1)
    throw std::invalid_argument("build_training_model: ensembles must carry labels 0 and 1");
  return TrainingModelT<Scalar>(build_class_density(class0), build_class_density(class1),
                                std::int64_t(class0.members.size()),
                                std::int64_t(class1.members.size()), seed);
}

// Reference rule on exact fidelities: class 0 wins ties.
template <typename Scalar>
int classify_exact_rule(const DensityMatrixT<Scalar>& rho0, const DensityMatrixT<Scalar>& rho1,
                        const PureStateT<Scalar>& sigma) {
  if (rho0.dim() != rho1.dim() || rho0.dim() != sigma.dim())
    throw std::invalid_argument("classify_exact_rule: dimension mismatch");
  return fidelity_exact(rho0, sigma) >= fidelity_exact(rho1, sigma) ? 0 : 1;
}

template <typename Scalar = double>
struct SupervisedDecisionT {
  int label = 0;
  FidelityEstimateT<Scalar> estimate0;
  FidelityEstimateT<Scalar> estimate1;
  // Each decision consumes one copy of sigma per fidelity estimate.
  int copies_consumed = 2;
};

using SupervisedDecision = SupervisedDecisionT<double>;

// Estimated-fidelity counterpart of classify_exact_rule. The two estimates
// run on decorrelated seed streams; the comparison uses the clamped values,
// which cannot widen the distance to the true fidelity.
template <typename Scalar>
SupervisedDecisionT<Scalar> classify_supervised(const TrainingModelT<Scalar>& model,
                                                const PureStateT<Scalar>& sigma,
                                                const QpeConfigT<Scalar>& config) {
  QpeConfigT<Scalar> cfg0 = config;
  cfg0.seed = derive_seed(config.seed, 0);
  QpeConfigT<Scalar> cfg1 = config;
  cfg1.seed = derive_seed(config.seed, 1);
  SupervisedDecisionT<Scalar> decision;
  decision.estimate0 = estimate_fidelity(model.rho0, sigma, cfg0);
  decision.estimate1 = estimate_fidelity(model.rho1, sigma, cfg1);
  decision.label =
      decision.estimate0.value_clamped >= decision.estimate1.value_clamped ? 0 : 1;
  return decision;
}

template <typename Scalar = double>
struct SampleRecordT {
  FidelityEstimateT<Scalar> estimate0;
  FidelityEstimateT<Scalar> estimate1;
  int predicted = 0;
  int true_label = -1;
};

template <typename Scalar = double>
struct ClassificationReportT {
  std::vector<SampleRecordT<Scalar>> records;
  std::optional<Scalar> accuracy;
  std::int64_t confusion[2][2] = {{0, 0}, {0, 0}};
};

using SampleRecord = SampleRecordT<double>;
using ClassificationReport = ClassificationReportT<double>;

// Classifies a batch of test states, sample i on seed stream
// derive_seed(config.seed, i). `truths` may be empty (no accuracy) or one
// label in {0,1} per state.
template <typename Scalar>
ClassificationReportT<Scalar> classify_batch(const TrainingModelT<Scalar>& model,
                                             const std::vector<PureStateT<Scalar>>& states,
                                             const std::vector<int>& truths,
                                             const QpeConfigT<Scalar>& config) {
  if (!truths.empty() && truths.size() != states.size())
    throw std::invalid_argument("classify_batch: truth labels do not match the state count");
  for (const int truth : truths)
    if (truth != 0 && truth != 1)
      throw std::invalid_argument("classify_batch: truth labels must be 0 or 1");
  ClassificationReportT<Scalar> report;
  report.records.reserve(states.size());
  std::int64_t correct = 0;
  for (size_t i = 0; i < states.size(); ++i) {
    QpeConfigT<Scalar> cfg = config;
    cfg.seed = derive_seed(config.seed, std::uint64_t(i));
    const SupervisedDecisionT<Scalar> decision = classify_supervised(model, states[i], cfg);
    SampleRecordT<Scalar> record;
    record.estimate0 = decision.estimate0;
    record.estimate1 = decision.estimate1;
    record.predicted = decision.label;
    if (!truths.empty()) {
      record.true_label = truths[i];
      report.confusion[truths[i]][decision.label] += 1;
      if (truths[i] == decision.label) correct += 1;
    }
    report.records.push_back(std::move(record));
  }
  if (!truths.empty() && !states.empty())
    report.accuracy = Scalar(correct) / Scalar(states.size());
  return report;
}

namespace detail {

template <typename Scalar>
PureStateT<Scalar> draw_pure(Rng& rng, int n) {
  const std::int64_t d = std::int64_t(1) << n;
  VectorT<Scalar> v(d);
  for (std::int64_t i = 0; i < d; ++i) {
    const Scalar re = Scalar(rng.normal());
    const Scalar im = Scalar(rng.normal());
    v(i) = std::complex<Scalar>(re, im);
  }
  v /= v.norm();
  return PureStateT<Scalar>(std::move(v), n);
}

// Evolves the state by e^{-i spread H} with a fresh Gaussian Hermitian H.
// spread = 0 returns the state untouched, without consuming randomness.
template <typename Scalar>
PureStateT<Scalar> perturb(Rng& rng, const PureStateT<Scalar>& state, Scalar spread) {
  if (spread == Scalar(0)) return state;
  const std::int64_t d = state.dim();
  MatrixT<Scalar> g(d, d);
  for (std::int64_t r = 0; r < d; ++r)
    for (std::int64_t c = 0; c < d; ++c)
      g(r, c) = std::complex<Scalar>(Scalar(rng.normal()), Scalar(rng.normal()));
  const MatrixT<Scalar> h = (g + g.adjoint()) / Scalar(2);
  Eigen::SelfAdjointEigenSolver<MatrixT<Scalar>> solver(h);
  MatrixT<Scalar> u = MatrixT<Scalar>::Zero(d, d);
  for (std::int64_t j = 0; j < d; ++j)
    u += std::polar(Scalar(1), -spread * solver.eigenvalues()(j)) *
         (solver.eigenvectors().col(j) * solver.eigenvectors().col(j).adjoint());
  VectorT<Scalar> amps = u * state.amplitudes();
  amps /= amps.norm();
  return PureStateT<Scalar>(std::move(amps), state.num_qubits());
}

} // namespace detail

template <typename Scalar = double>
struct TwoClassDatasetT {
  LabeledEnsembleT<Scalar> train0;
  LabeledEnsembleT<Scalar> train1;
  std::vector<PureStateT<Scalar>> test_states;
  std::vector<int> test_labels;
  PureStateT<Scalar> fiducial0;
  PureStateT<Scalar> fiducial1;
};

using TwoClassDataset = TwoClassDatasetT<double>;

// Synthetic two-class data: one Haar-random fiducial per class, constrained
// to squared overlap at most `separation` (non-positive separation forces
// exact orthogonality), each member an independent e^{-i spread H}
// perturbation of its fiducial. Training weights are uniform. The test set
// holds per_class fresh perturbations per class, class 0 first.
template <typename Scalar>
TwoClassDatasetT<Scalar> generate_two_class_dataset(int n, int per_class, Scalar spread,
                                                    Scalar separation, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("generate_two_class_dataset: n must be at least 1");
  if (per_class < 1)
    throw std::invalid_argument("generate_two_class_dataset: per_class must be at least 1");
  if (spread < Scalar(0))
    throw std::invalid_argument("generate_two_class_dataset: spread must be nonnegative");
  Rng rng(seed);
  const PureStateT<Scalar> f0 = detail::draw_pure<Scalar>(rng, n);

  const auto orthogonal_part = [&](const VectorT<Scalar>& v) {
    VectorT<Scalar> w = v - f0.amplitudes() * (f0.amplitudes().dot(v));
    return w;
  };
  PureStateT<Scalar> f1 = f0;
  if (separation <= Scalar(0)) {
    VectorT<Scalar> w;
    do {
      w = orthogonal_part(detail::draw_pure<Scalar>(rng, n).amplitudes());
    } while (w.norm() < Scalar(1e-6));
    w /= w.norm();
    f1 = PureStateT<Scalar>(std::move(w), n);
  } else {
    bool found = false;
    for (int attempt = 0; attempt < 10000 && !found; ++attempt) {
      f1 = detail::draw_pure<Scalar>(rng, n);
      found = std::norm(f0.amplitudes().dot(f1.amplitudes())) <= separation;
    }
    if (!found) {
      // Place f1 exactly on the separation boundary.
      VectorT<Scalar> w = orthogonal_part(f1.amplitudes());
      if (w.norm() < Scalar(1e-6)) {
        w = orthogonal_part(detail::draw_pure<Scalar>(rng, n).amplitudes());
      }
      w /= w.norm();
      VectorT<Scalar> amps = std::sqrt(separation) * f0.amplitudes() +
                             std::sqrt(Scalar(1) - separation) * w;
      amps /= amps.norm();
      f1 = PureStateT<Scalar>(std::move(amps), n);
    }
  }

  const Scalar weight = Scalar(1) / Scalar(per_class);
  const auto make_ensemble = [&](const PureStateT<Scalar>& fiducial, int label) {
    std::vector<std::pair<PureStateT<Scalar>, Scalar>> members;
    members.reserve(size_t(per_class));
    for (int i = 0; i < per_class; ++i)
      members.emplace_back(detail::perturb(rng, fiducial, spread), weight);
    return LabeledEnsembleT<Scalar>(std::move(members), label);
  };
  LabeledEnsembleT<Scalar> train0 = make_ensemble(f0, 0);
  LabeledEnsembleT<Scalar> train1 = make_ensemble(f1, 1);

  std::vector<PureStateT<Scalar>> test_states;
  std::vector<int> test_labels;
  test_states.reserve(size_t(2 * per_class));
  for (int label = 0; label < 2; ++label) {
    const PureStateT<Scalar>& fiducial = (label == 0) ? f0 : f1;
    for (int i = 0; i < per_class; ++i) {
      test_states.push_back(detail::perturb(rng, fiducial, spread));
      test_labels.push_back(label);
    }
  }
  return TwoClassDatasetT<Scalar>{std::move(train0),      std::move(train1),
                                  std::move(test_states), std::move(test_labels),
                                  f0,                     f1};
}

} // namespace qbinclass
