#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <vector>

#include "oracles.hpp"
#include "qbinclass/unsupervised.hpp"

using namespace qbinclass;

namespace {

constexpr double kPi = std::numbers::pi_v<double>;

double success_probability(std::int64_t n_total, std::int64_t marked, int k) {
  const double theta = std::asin(std::sqrt(double(marked) / double(n_total)));
  const double s = std::sin(double(2 * k + 1) * theta);
  return s * s;
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

PureState grover_with_optional_prefix(const LabelOracle& oracle, int k, bool prepend_pi) {
  PureState state = PureState::basis_state(oracle.num_qubits(), 0);
  const UnitaryMatrix h = gates::hadamard();
  for (int q = 0; q < oracle.num_qubits(); ++q) state = apply_gate(state, h, {q});
  if (prepend_pi) state = u_pi(state);
  for (int i = 0; i < k; ++i) state = grover_diffusion(oracle_apply(oracle, state));
  return state;
}

} // namespace

TEST_CASE("label oracles validate their tables") {
  CHECK_THROWS_WITH_AS(LabelOracle({0, 1, 1}),
                       "LabelOracle: label table size must be a power of two >= 2",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(LabelOracle({0, 2}), "LabelOracle: labels must be 0 or 1",
                       std::invalid_argument);
  CHECK_THROWS_AS(LabelOracle::from_indices(2, {4}), std::invalid_argument);
  CHECK_THROWS_AS(LabelOracle::from_indices(2, {-1}), std::invalid_argument);
  CHECK_THROWS_AS(LabelOracle::threshold(2, 5), std::invalid_argument);

  const LabelOracle oracle = LabelOracle::from_indices(3, {1, 6, 6});
  CHECK(oracle.num_qubits() == 3);
  CHECK(oracle.size() == 8);
  CHECK(oracle.marked_count() == 2);
  CHECK(oracle.label(1) == 1);
  CHECK(oracle.label(6) == 1);
  CHECK(oracle.label(0) == 0);
}

TEST_CASE("built-in oracle patterns mark the expected sets") {
  const LabelOracle par = LabelOracle::parity(3);
  CHECK(par.marked_count() == 4);
  CHECK(par.label(0) == 0);
  CHECK(par.label(1) == 1);
  CHECK(par.label(3) == 0);
  CHECK(par.label(7) == 1);

  const LabelOracle one = LabelOracle::single(2, 2);
  CHECK(one.marked_count() == 1);
  CHECK(one.label(2) == 1);

  const LabelOracle thr = LabelOracle::threshold(2, 3);
  CHECK(thr.marked_count() == 1);
  CHECK(thr.label(3) == 1);
  CHECK(thr.label(2) == 0);

  const LabelOracle comp = thr.complement();
  CHECK(comp.marked_count() == 3);
  CHECK(comp.label(3) == 0);
  CHECK(comp.label(0) == 1);
}

TEST_CASE("marked-count overrides reroute iteration counts only") {
  const LabelOracle oracle = LabelOracle::from_indices(3, {1, 6});
  const LabelOracle forced = oracle.with_m_override(6);
  CHECK(forced.marked_count() == 6);
  CHECK(forced.actual_marked_count() == 2);
  CHECK(forced.has_override());
  CHECK(forced.complement().marked_count() == 2);
  CHECK_THROWS_AS(oracle.with_m_override(9), std::invalid_argument);
  CHECK_THROWS_AS(LabelOracle::from_indices(2, {1}).with_m_override(-1),
                  std::invalid_argument);
}

TEST_CASE("oracle application flips marked amplitudes and is an involution") {
  const LabelOracle oracle = LabelOracle::single(2, 3);
  Vector v(4);
  v << 0.5, 0.5, 0.5, 0.5;
  const PureState psi(v);
  const PureState flipped = oracle_apply(oracle, psi);
  CHECK(flipped.amplitudes()(0) == std::complex<double>(0.5, 0.0));
  CHECK(flipped.amplitudes()(1) == std::complex<double>(0.5, 0.0));
  CHECK(flipped.amplitudes()(2) == std::complex<double>(0.5, 0.0));
  CHECK(flipped.amplitudes()(3) == std::complex<double>(-0.5, 0.0));
  CHECK(oracle_apply(oracle, flipped).amplitudes() == psi.amplitudes());

  const LabelOracle none(std::vector<int>{0, 0, 0, 0});
  CHECK(oracle_apply(none, psi).amplitudes() == psi.amplitudes());
  CHECK_THROWS_WITH_AS(oracle_apply(oracle, PureState::basis_state(3, 0)),
                       "oracle_apply: dimension mismatch", std::invalid_argument);
}

TEST_CASE("u_pi negates amplitudes and squares to the identity") {
  const PureState psi = random_pure_state(2, 17);
  const PureState negated = u_pi(psi);
  CHECK(negated.amplitudes() == (-psi.amplitudes()).eval());
  CHECK(u_pi(negated).amplitudes() == psi.amplitudes());
  CHECK(u_pi(PureState::basis_state(1, 0)).amplitudes()(0) ==
        std::complex<double>(-1.0, 0.0));
}

TEST_CASE("diffusion reflects twice back to the original state") {
  for (std::uint64_t seed : {3u, 4u, 5u}) {
    const PureState psi = random_pure_state(3, seed);
    const PureState twice = grover_diffusion(grover_diffusion(psi));
    CHECK((twice.amplitudes() - psi.amplitudes()).norm() < 1e-10);
  }
}

TEST_CASE("iteration counts match the half-up formula") {
  CHECK(grover_iterations(4, 1) == 1);
  CHECK(grover_iterations(4, 2) == 1);
  CHECK(grover_iterations(4, 3) == 0);
  CHECK(grover_iterations(1024, 1) == 25);
  CHECK(int(std::floor((kPi / 4.0) * std::sqrt(1024.0))) == 25);
  CHECK_THROWS_AS(grover_iterations(8, 0), degenerate_oracle_error);
  CHECK_THROWS_AS(grover_iterations(8, 8), degenerate_oracle_error);
  CHECK_THROWS_AS(grover_iterations(1, 1), std::invalid_argument);
}

TEST_CASE("four-state single-target search lands exactly on the target") {
  const LabelOracle oracle = LabelOracle::single(2, 2);
  const PureState m_tilde = prepare_m_tilde(oracle);
  CHECK(std::abs(std::norm(m_tilde.amplitudes()(2)) - 1.0) < 1e-12);
  const PureState ideal = ideal_m(oracle);
  CHECK(std::norm(ideal.amplitudes().dot(m_tilde.amplitudes())) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("zero iterations leaves the uniform superposition") {
  const LabelOracle oracle = LabelOracle::from_indices(3, {0, 5, 6});
  const PureState state = prepare_m_tilde(oracle, 0);
  for (std::int64_t j = 0; j < 8; ++j)
    CHECK(std::norm(state.amplitudes()(j)) == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(std::norm(ideal_m(oracle).amplitudes().dot(state.amplitudes())) ==
        doctest::Approx(3.0 / 8.0).epsilon(1e-12));
}

TEST_CASE("amplified overlaps follow the closed-form rotation for every size") {
  for (int n = 1; n <= 6; ++n) {
    const std::int64_t total = std::int64_t(1) << n;
    for (std::int64_t m = 1; m < total; ++m) {
      const LabelOracle oracle =
          LabelOracle::from_indices(n, scattered_subset(n, m, 7000 + std::uint64_t(16 * n + m)));
      const PureState ideal = ideal_m(oracle);
      PureState state = prepare_m_tilde(oracle, 0);
      for (int k = 0; k <= 40; ++k) {
        const double overlap = std::norm(ideal.amplitudes().dot(state.amplitudes()));
        const double expected = success_probability(total, m, k);
        REQUIRE(std::abs(overlap - expected) < 1e-12);
        state = grover_diffusion(oracle_apply(oracle, state));
      }
    }
  }
}

TEST_CASE("amplified states stay inside the span of the two ideal states") {
  for (std::uint64_t seed : {21u, 22u, 23u, 24u, 25u}) {
    const int n = 2 + int(seed % 3);
    const std::int64_t total = std::int64_t(1) << n;
    const std::int64_t m = 1 + std::int64_t(seed % std::uint64_t(total - 1));
    const LabelOracle oracle = LabelOracle::from_indices(n, scattered_subset(n, m, seed));
    const PureState m_tilde = prepare_m_tilde(oracle);
    const Vector a = ideal_m(oracle).amplitudes();
    const Vector b = ideal_m_perp(oracle).amplitudes();
    const Vector residual =
        m_tilde.amplitudes() - a * a.dot(m_tilde.amplitudes()) - b * b.dot(m_tilde.amplitudes());
    CHECK(residual.norm() < 1e-10);
  }
}

TEST_CASE("a global pi phase before the search never changes outcome statistics") {
  Rng rng(909);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + int(rng.below(3));
    const std::int64_t total = std::int64_t(1) << n;
    const std::int64_t m = 1 + std::int64_t(rng.below(std::uint64_t(total - 1)));
    const LabelOracle oracle =
        LabelOracle::from_indices(n, scattered_subset(n, m, 5000 + std::uint64_t(trial)));
    const int k = int(rng.below(6));
    const PureState plain = grover_with_optional_prefix(oracle, k, false);
    const PureState prefixed = grover_with_optional_prefix(oracle, k, true);
    const RealVector p = plain.amplitudes().cwiseAbs2();
    const RealVector q = prefixed.amplitudes().cwiseAbs2();
    CHECK((p - q).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("complement amplification realizes the mirrored closed form") {
  SUBCASE("one marked of four leaves the complement unamplified") {
    const LabelOracle oracle = LabelOracle::single(2, 1);
    const ReferenceStates refs = prepare_references(oracle);
    CHECK(refs.iterations_m_perp == 0);
    for (std::int64_t j = 0; j < 4; ++j)
      CHECK(std::norm(refs.m_perp_tilde.amplitudes()(j)) ==
            doctest::Approx(0.25).epsilon(1e-12));
    CHECK(refs.overlap_m_perp == doctest::Approx(0.75).epsilon(1e-12));
  }
  SUBCASE("three marked of four lands exactly on the lone unmarked state") {
    const LabelOracle oracle = LabelOracle::from_indices(2, {0, 1, 3});
    const ReferenceStates refs = prepare_references(oracle);
    CHECK(refs.iterations_m_perp == 1);
    CHECK(std::norm(refs.m_perp_tilde.amplitudes()(2)) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("all-but-one marked meets the three-iteration floor") {
    const LabelOracle oracle = LabelOracle::from_indices(3, {0, 1, 2, 3, 4, 6, 7});
    const ReferenceStates refs = prepare_references(oracle);
    const double theta_perp = std::asin(std::sqrt(1.0 / 8.0));
    const double floor_overlap = std::pow(std::sin(3.0 * theta_perp), 2);
    CHECK(refs.overlap_m_perp >= floor_overlap);
    CHECK(std::abs(refs.overlap_m_perp -
                   success_probability(8, 1, refs.iterations_m_perp)) < 1e-12);
  }
}

TEST_CASE("degenerate oracles are rejected before any search runs") {
  const LabelOracle empty(std::vector<int>{0, 0, 0, 0});
  const LabelOracle full(std::vector<int>{1, 1, 1, 1});
  CHECK_THROWS_AS(prepare_m_tilde(empty), degenerate_oracle_error);
  CHECK_THROWS_AS(prepare_m_tilde(full), degenerate_oracle_error);
  CHECK_THROWS_AS(prepare_m_perp_tilde(empty), degenerate_oracle_error);
  CHECK_THROWS_AS(prepare_references(full), degenerate_oracle_error);
  CHECK_THROWS_AS(ideal_m(empty), degenerate_oracle_error);
  const LabelOracle forced = LabelOracle::single(2, 1).with_m_override(0);
  CHECK_THROWS_AS(prepare_m_tilde(forced), degenerate_oracle_error);
}

TEST_CASE("a wrong marked-count override degrades the amplification") {
  const LabelOracle oracle = LabelOracle::from_indices(3, {1, 6});
  const ReferenceStates good = prepare_references(oracle);
  CHECK(good.iterations_m == 1);
  CHECK(good.overlap_m == doctest::Approx(1.0).epsilon(1e-12));

  const ReferenceStates forced = prepare_references(oracle.with_m_override(6));
  CHECK(forced.iterations_m == 0);
  CHECK(forced.overlap_m == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("reference bundles carry unit-norm states and consistent overlaps") {
  const LabelOracle oracle = LabelOracle::parity(3);
  const ReferenceStates refs = prepare_references(oracle);
  CHECK(std::abs(refs.m_tilde.amplitudes().norm() - 1.0) < 1e-12);
  CHECK(std::abs(refs.m_perp_tilde.amplitudes().norm() - 1.0) < 1e-12);
  CHECK(std::abs(refs.m_ideal.amplitudes().norm() - 1.0) < 1e-12);
  CHECK(std::abs(refs.m_perp_ideal.amplitudes().norm() - 1.0) < 1e-12);
  CHECK(refs.overlap_m >= 0.0);
  CHECK(refs.overlap_m <= 1.0);
  CHECK(refs.overlap_m_perp >= 0.0);
  CHECK(refs.overlap_m_perp <= 1.0);
  CHECK(std::abs(refs.overlap_m - success_probability(8, 4, refs.iterations_m)) < 1e-12);
  for (std::int64_t j = 0; j < 8; ++j) {
    const double weight = std::norm(refs.m_ideal.amplitudes()(j));
    if (oracle.label(j))
      CHECK(weight == doctest::Approx(0.25).epsilon(1e-15));
    else
      CHECK(weight == 0.0);
  }
}

TEST_CASE("basis classification recovers the exact single-target pattern") {
  const LabelOracle oracle = LabelOracle::single(2, 2);
  const PureState m_tilde = prepare_m_tilde(oracle);
  for (std::int64_t j = 0; j < 4; ++j) {
    const BasisDecision decision = classify_basis_vector(j, m_tilde);
    CHECK(decision.label == (j == 2 ? 1 : 0));
    CHECK(decision.threshold == 0.25);
    CHECK(decision.shots == 0);
  }
  CHECK_THROWS_AS(classify_basis_vector(4, m_tilde), std::invalid_argument);
  CHECK_THROWS_AS(classify_basis_vector(-1, m_tilde), std::invalid_argument);
}

TEST_CASE("an unamplified reference sits on the threshold and reads all zeros") {
  const LabelOracle oracle = LabelOracle::from_indices(3, {2, 5});
  const PureState uniform = prepare_m_tilde(oracle, 0);
  for (std::int64_t j = 0; j < 8; ++j) {
    const BasisDecision decision = classify_basis_vector(j, uniform);
    CHECK(decision.label == 0);
    CHECK(decision.low_confidence);
    CHECK(decision.q == doctest::Approx(0.125).epsilon(1e-12));
  }
}

TEST_CASE("two-of-eight search labels both marked indices") {
  const LabelOracle oracle = LabelOracle::from_indices(3, {1, 6});
  const PureState m_tilde = prepare_m_tilde(oracle);
  for (std::int64_t j = 0; j < 8; ++j) {
    const BasisDecision decision = classify_basis_vector(j, m_tilde);
    CHECK(decision.label == oracle.label(j));
    if (oracle.label(j)) CHECK(decision.q == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("sampled basis classification converges on the exact labels") {
  const LabelOracle oracle = LabelOracle::from_indices(3, {1, 6});
  const PureState m_tilde = prepare_m_tilde(oracle);
  for (std::int64_t j = 0; j < 8; ++j) {
    const BasisDecision decision = classify_basis_vector_sampled(j, m_tilde, 4096, 71);
    CHECK(decision.label == oracle.label(j));
    CHECK(decision.shots == 4096);
  }
  const BasisDecision a = classify_basis_vector_sampled(1, m_tilde, 512, 9);
  const BasisDecision b = classify_basis_vector_sampled(1, m_tilde, 512, 9);
  CHECK(a.q == b.q);
  CHECK_THROWS_AS(classify_basis_vector_sampled(1, m_tilde, 0, 9), std::invalid_argument);
}

TEST_CASE("state classification separates the two reference directions") {
  const LabelOracle oracle = LabelOracle::single(2, 2);
  const ReferenceStates refs = prepare_references(oracle);
  QpeConfig cfg;
  cfg.n = 2;
  cfg.t = 5;
  cfg.tau = kPi / 4;

  const StateDecision hit = classify_state(ideal_m(oracle), refs, cfg, ClassifyMode::exact);
  CHECK(hit.label == 1);
  CHECK(hit.f_m == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(!hit.estimated);

  const StateDecision miss =
      classify_state(ideal_m_perp(oracle), refs, cfg, ClassifyMode::exact);
  CHECK(miss.label == 0);
  CHECK(miss.f_m < 1e-12);

  CHECK_THROWS_WITH_AS(classify_state(PureState::basis_state(3, 0), refs, cfg,
                                      ClassifyMode::exact),
                       "classify_state: dimension mismatch", std::invalid_argument);
}

TEST_CASE("an equal mix of the two references resolves to class 0") {
  const LabelOracle oracle = LabelOracle::single(1, 1);
  const PureState mt = ideal_m(oracle);
  const PureState mp = ideal_m_perp(oracle);
  const ReferenceStates refs{mt, mp, mt, mp, 1.0, 1.0, 0, 0};

  const double c = std::sqrt(0.5);
  const double s = c;
  Vector v(2);
  v << c * refs.m_perp_tilde.amplitudes()(0) + s * refs.m_tilde.amplitudes()(0),
      c * refs.m_perp_tilde.amplitudes()(1) + s * refs.m_tilde.amplitudes()(1);
  const PureState sigma(v, 1);

  QpeConfig cfg;
  cfg.n = 1;
  cfg.t = 5;
  cfg.tau = kPi / 4;
  const StateDecision decision = classify_state(sigma, refs, cfg, ClassifyMode::exact);
  CHECK(decision.f_m == decision.f_perp);
  CHECK(decision.label == 0);
}

TEST_CASE("exact-mode decisions reproduce the oracle when both searches succeed") {
  Rng rng(31415);
  int audited = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + int(rng.below(3));
    const std::int64_t total = std::int64_t(1) << n;
    const std::int64_t m = 1 + std::int64_t(rng.below(std::uint64_t(total - 1)));
    const LabelOracle oracle =
        LabelOracle::from_indices(n, scattered_subset(n, m, 8800 + std::uint64_t(trial)));
    const int k = grover_iterations(total, m);
    const int k_perp = grover_iterations(total, total - m);
    if (success_probability(total, m, k) <= 0.5 ||
        success_probability(total, total - m, k_perp) <= 0.5)
      continue;
    ++audited;
    const ReferenceStates refs = prepare_references(oracle);
    QpeConfig cfg;
    cfg.n = n;
    cfg.t = 4;
    for (std::int64_t j = 0; j < total; ++j) {
      const StateDecision decision = classify_state(PureState::basis_state(n, j), refs, cfg,
                                                    ClassifyMode::exact);
      CHECK(decision.label == oracle.label(j));
    }
  }
  CHECK(audited >= 10);
}

TEST_CASE("estimated decisions agree with exact decisions for rank-one references") {
  const LabelOracle oracle = LabelOracle::from_indices(3, {1, 6});
  const ReferenceStates refs = prepare_references(oracle);
  QpeConfig cfg;
  cfg.n = 3;
  cfg.t = 9;
  cfg.tau = 0.9;
  cfg.mode = ExecutionMode::analytic_kernel;
  for (int i = 0; i < 20; ++i) {
    const PureState sigma = random_pure_state(3, 6600 + std::uint64_t(i));
    const StateDecision exact = classify_state(sigma, refs, cfg, ClassifyMode::exact);
    const StateDecision est = classify_state(sigma, refs, cfg, ClassifyMode::estimated);
    CHECK(est.estimated);
    CHECK(est.label == exact.label);
    CHECK(std::abs(est.estimate_m.value - exact.f_m) < 0.05);
  }
}

TEST_CASE("estimated sampled decisions replay per seed") {
  const LabelOracle oracle = LabelOracle::single(2, 1);
  const ReferenceStates refs = prepare_references(oracle);
  QpeConfig cfg;
  cfg.n = 2;
  cfg.t = 6;
  cfg.tau = 0.9;
  cfg.mode = ExecutionMode::sampled;
  cfg.shots = 600;
  cfg.seed = 12321;
  const PureState sigma = random_pure_state(2, 42);
  const StateDecision a = classify_state(sigma, refs, cfg, ClassifyMode::estimated);
  const StateDecision b = classify_state(sigma, refs, cfg, ClassifyMode::estimated);
  CHECK(a.estimate_m.value == b.estimate_m.value);
  CHECK(a.estimate_perp.value == b.estimate_perp.value);
  CHECK(a.label == b.label);
  CHECK(a.estimate_m.shots_used == 600);
}
