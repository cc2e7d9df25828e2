#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qnet/concurrence.hpp"
#include "qnet/dark_state.hpp"
#include "qnet/liouvillian.hpp"

using namespace qnet;

namespace {

std::mt19937 rng(77);

NetworkGraph chain(int n) { return make_named_topology(GraphKind::Chain, n, 1.0, 1.0); }

PureState random_single_excitation_state(const ExcitationBasis& b) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CVector amp = CVector::Zero(b.dim());
  for (int i = 0; i < b.dim(); ++i)
    if (ExcitationBasis::weight(b.pattern(i)) <= 1)
      amp(i) = Complex(gauss(rng), gauss(rng));
  return make_pure_state(b, amp);
}

} // namespace

TEST_CASE("aleph_state construction") {
  // n = 2: the singlet
  NetworkGraph g2 = chain(2);
  ExcitationBasis b2(2, 1);
  PureState aleph2 = aleph_state(g2, b2);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(aleph2.amp(b2.index_of(0b01)) - r) < 1e-15);
  CHECK(std::abs(aleph2.amp(b2.index_of(0b10)) + r) < 1e-15);

  // n = 3 chain: alternating signs
  NetworkGraph g3 = chain(3);
  ExcitationBasis b3(3, 1);
  PureState aleph3 = aleph_state(g3, b3);
  const double s = 1.0 / std::sqrt(3.0);
  CHECK(std::abs(aleph3.amp(b3.index_of(0b001)) - s) < 1e-15);
  CHECK(std::abs(aleph3.amp(b3.index_of(0b010)) + s) < 1e-15);
  CHECK(std::abs(aleph3.amp(b3.index_of(0b100)) - s) < 1e-15);

  // even ring: consistent alternation
  NetworkGraph r4 = make_named_topology(GraphKind::Ring, 4, 1.0, 1.0);
  ExcitationBasis b4(4, 1);
  PureState aleph4 = aleph_state(r4, b4);
  CHECK(std::abs(aleph4.amp(b4.index_of(0b0001)) - 0.5) < 1e-15);
  CHECK(std::abs(aleph4.amp(b4.index_of(0b0010)) + 0.5) < 1e-15);
  CHECK(std::abs(aleph4.amp(b4.index_of(0b0100)) - 0.5) < 1e-15);
  CHECK(std::abs(aleph4.amp(b4.index_of(0b1000)) + 0.5) < 1e-15);

  NetworkGraph tri = make_named_topology(GraphKind::Complete, 3, 1.0, 1.0);
  ExcitationBasis bt(3, 1);
  CHECK_THROWS_AS(aleph_state(tri, bt), PreconditionError);
  CHECK_THROWS_AS(aleph_state(g3, ExcitationBasis(3, 0)), std::invalid_argument);
}

TEST_CASE("dark conditions hold for the aleph state") {
  // degenerate chain: lambda = 0
  NetworkGraph g = chain(3);
  ExcitationBasis b(3, 1);
  auto rep = verify_dark_conditions(aleph_state(g, b), g);
  CHECK(rep.passed);
  CHECK(std::abs(rep.lambda) < 1e-12);
  CHECK(rep.cond1_max < 1e-14);
  CHECK(rep.cond2_residual < 1e-14);

  // uniformly shifted detuning d = 1: lambda = i
  NetworkGraph shifted = chain(3);
  for (auto& w : shifted.onsite) w += 1.0;
  rep = verify_dark_conditions(aleph_state(shifted, b), shifted);
  CHECK(rep.passed);
  CHECK(std::abs(rep.lambda - Complex(0.0, 1.0)) < 1e-12);
  CHECK(std::abs(rep.lambda.real()) < 1e-13);

  // bare excitation fails condition 1 with unit residual
  NetworkGraph g2 = chain(2);
  ExcitationBasis b2(2, 1);
  rep = verify_dark_conditions(basis_state(b2, 0b01), g2);
  CHECK_FALSE(rep.passed);
  REQUIRE(rep.cond1_residuals.size() == 1);
  CHECK(rep.cond1_residuals[0].second == Catch::Approx(1.0));
}

TEST_CASE("predict_p values and refusals") {
  NetworkGraph g = chain(3);
  ExcitationBasis b(3, 1);
  PureState aleph = aleph_state(g, b);

  CHECK(predict_p(aleph, g) == Catch::Approx(1.0));
  CHECK(predict_p(pure_density(aleph), g) == Catch::Approx(1.0));
  CHECK(predict_p(basis_state(b, 0), g) == Catch::Approx(0.0).margin(1e-15));
  for (int k = 1; k <= 3; ++k)
    CHECK(predict_p(basis_state(b, 1u << (k - 1)), g) == Catch::Approx(1.0 / 3.0));

  // mixed single-excitation states are accepted
  Operator mix = 0.5 * pure_density(basis_state(b, 0b001)).mat +
                 0.5 * pure_density(basis_state(b, 0b010)).mat;
  CHECK(predict_p(DensityMatrix{b, mix}, g) == Catch::Approx(1.0 / 3.0));

  // two excitations: refuse
  ExcitationBasis b2(3, 2);
  CHECK_THROWS_AS(predict_p(basis_state(b2, 0b011), g), PreconditionError);

  // off-resonant graph: refuse
  NetworkGraph off = chain(3);
  off.onsite = {1.0, 1.0, 1.0};
  CHECK_THROWS_AS(predict_p(basis_state(b, 0b001), off), PreconditionError);

  // odd cycle: refuse
  NetworkGraph tri = make_named_topology(GraphKind::Complete, 3, 1.0, 1.0);
  CHECK_THROWS_AS(predict_p(basis_state(b, 0b001), tri), PreconditionError);

  // resonant-nonzero is fine
  NetworkGraph shifted = chain(3);
  for (auto& w : shifted.onsite) w += 2.0;
  CHECK(predict_p(basis_state(b, 0b001), shifted) == Catch::Approx(1.0 / 3.0));
}

TEST_CASE("predict_pair") {
  NetworkGraph g2 = chain(2);
  auto pp = predict_pair(1.0, g2, 1, 2);
  CHECK(pp.concurrence == Catch::Approx(1.0));
  CHECK(pp.sign == -1);
  // singlet check
  ExcitationBasis b2(2, 1);
  PairState singlet = partial_trace_pair(pure_density(aleph_state(g2, b2)), 1, 2);
  CHECK((pp.pair_state.mat - singlet.mat).norm() < 1e-12);

  auto vacuum_pair = predict_pair(0.0, g2, 1, 2);
  CHECK(vacuum_pair.concurrence == 0.0);
  CHECK(std::abs(vacuum_pair.pair_state.mat(0, 0) - 1.0) < 1e-15);

  NetworkGraph g4 = chain(4);
  auto far = predict_pair(1.0, g4, 1, 3);
  CHECK(far.concurrence == Catch::Approx(0.5));
  CHECK(far.sign == +1);
  CHECK(std::abs(far.pair_state.trace() - Complex(1.0)) < 1e-14);

  // prediction matches the partial trace of the dark state at p = 1
  ExcitationBasis b4(4, 1);
  DensityMatrix dark = pure_density(aleph_state(g4, b4));
  for (int k = 1; k <= 4; ++k)
    for (int j = k + 1; j <= 4; ++j) {
      auto pred = predict_pair(1.0, g4, k, j);
      PairState meas = partial_trace_pair(dark, k, j);
      CHECK((pred.pair_state.mat - meas.mat).norm() < 1e-12);
      CHECK(pred.concurrence <= 2.0 / 4 + 1e-15);
    }

  CHECK_THROWS_AS(predict_pair(1.5, g2, 1, 2), std::invalid_argument);
  CHECK_THROWS_AS(predict_pair(0.5, g2, 1, 1), std::invalid_argument);
}

TEST_CASE("optimal_initial_state") {
  NetworkGraph g4 = chain(4);
  ExcitationBasis b4(4, 1);

  PureState full = optimal_initial_state(g4, {1, 2, 3, 4}, b4);
  PureState aleph = aleph_state(g4, b4);
  CHECK(std::abs(overlap(full, aleph)) == Catch::Approx(1.0));
  CHECK(predict_p(full, g4) == Catch::Approx(1.0));

  PureState single = optimal_initial_state(g4, {1}, b4);
  CHECK(predict_p(single, g4) == Catch::Approx(0.25));

  PureState two = optimal_initial_state(g4, {1, 2}, b4);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(two.amp(b4.index_of(0b0001)) - r) < 1e-15);
  CHECK(std::abs(two.amp(b4.index_of(0b0010)) + r) < 1e-15);
  CHECK(predict_p(two, g4) == Catch::Approx(0.5));

  CHECK_THROWS_AS(optimal_initial_state(g4, {}, b4), std::invalid_argument);
  CHECK_THROWS_AS(optimal_initial_state(g4, {1, 1}, b4), std::invalid_argument);
  CHECK_THROWS_AS(optimal_initial_state(g4, {5}, b4), std::invalid_argument);
}

TEST_CASE("max_concurrence_formula") {
  CHECK(max_concurrence_formula(2, 2) == Catch::Approx(1.0));
  CHECK(max_concurrence_formula(4, 2) == Catch::Approx(0.25));
  CHECK(max_concurrence_formula(10, 10) == Catch::Approx(0.2));
  CHECK_THROWS_AS(max_concurrence_formula(3, 4), std::invalid_argument);
}

TEST_CASE("steady concurrence equals 2p/n uniformly across pairs") {
  std::vector<NetworkGraph> graphs = {
      chain(2), chain(3), chain(4), chain(5),
      make_named_topology(GraphKind::Ring, 4, 1.0, 1.0),
      make_named_topology(GraphKind::Star, 5, 1.0, 1.0)};
  for (const auto& g : graphs) {
    ExcitationBasis b(g.n, 1);
    auto spec = build_liouvillian(g, b);
    KernelProjector proj(spec);
    for (int trial = 0; trial < 4; ++trial) {
      PureState psi0 = random_single_excitation_state(b);
      const double p = predict_p(psi0, g);
      DensityMatrix steady{b, proj.project(pure_density(psi0).mat)};
      auto map = concurrence_map(steady);
      const double expected = 2.0 * p / g.n;
      for (const auto& e : map.entries)
        REQUIRE(e.concurrence == Catch::Approx(expected).margin(1e-6));
      CHECK(map.max() - map.min() < 1e-8);
      // one excitation cannot beat the dark-state bound 2/n
      CHECK(map.max() <= 2.0 / g.n + 1e-9);
    }
  }
}

TEST_CASE("dark-state overlap is conserved along trajectories") {
  for (const auto& g : {chain(4), make_named_topology(GraphKind::Ring, 4, 1.0, 1.0)}) {
    ExcitationBasis b(g.n, 1);
    auto spec = build_liouvillian(g, b);
    PureState aleph = aleph_state(g, b);
    for (int trial = 0; trial < 3; ++trial) {
      PureState psi0 = random_single_excitation_state(b);
      const double p = predict_p(psi0, g);
      double max_dev = 0.0;
      EvolveOptions opts;
      opts.t_final = 10.0;
      evolve(spec, pure_density(psi0), opts,
             [&](double, const DensityMatrix& rho) {
               max_dev = std::max(max_dev, std::abs(overlap(rho, aleph) - p));
             });
      CHECK(max_dev < 1e-8);
    }
  }
}
