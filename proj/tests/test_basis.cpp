#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qnet/basis.hpp"
#include "qnet/dark_state.hpp"
#include "qnet/graph.hpp"
#include "qnet/states.hpp"

using namespace qnet;

namespace {

Operator kron2(const Operator& a, const Operator& b) {
  Operator out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Full-space construction 1 x ... x sigma x ... x 1 with qubit 1 as the
// most significant factor; independent of the sector machinery.
Operator lowering_full(int n, int site) {
  Operator sigma(2, 2), id2 = Operator::Identity(2, 2);
  sigma << 0, 1, 0, 0;
  Operator out = (site == 1) ? sigma : id2;
  for (int k = 2; k <= n; ++k)
    out = kron2(out, k == site ? sigma : id2);
  return out;
}

int full_index(std::uint32_t pattern, int n) {
  int idx = 0;
  for (int k = 1; k <= n; ++k)
    if (ExcitationBasis::occupied(pattern, k)) idx += 1 << (n - k);
  return idx;
}

std::mt19937 rng(42);

Complex random_amp() {
  std::normal_distribution<double> g(0.0, 1.0);
  return {g(rng), g(rng)};
}

} // namespace

TEST_CASE("build_basis ordering and sizes") {
  ExcitationBasis b31 = build_basis(3, 1);
  REQUIRE(b31.dim() == 4);
  CHECK(b31.pattern(0) == 0b000u);
  CHECK(b31.pattern(1) == 0b001u); // site 1 excited
  CHECK(b31.pattern(2) == 0b010u); // site 2
  CHECK(b31.pattern(3) == 0b100u); // site 3

  CHECK(build_basis(3, 3).dim() == 8);
  CHECK(build_basis(4, 2).dim() == 11);

  // weight-2 class of n = 4: supports {1,2},{1,3},{1,4},{2,3},{2,4},{3,4}
  ExcitationBasis b42 = build_basis(4, 2);
  CHECK(b42.pattern(5) == 0b0011u);
  CHECK(b42.pattern(6) == 0b0101u);
  CHECK(b42.pattern(7) == 0b1001u);
  CHECK(b42.pattern(8) == 0b0110u);
  CHECK(b42.pattern(9) == 0b1010u);
  CHECK(b42.pattern(10) == 0b1100u);

  CHECK_THROWS_AS(build_basis(3, 4), std::invalid_argument);
  CHECK_THROWS_AS(build_basis(3, -1), std::invalid_argument);

  CHECK(b42.find(0b1111u) == -1);
  CHECK(b42.index_of(0b0011u) == 5);
}

TEST_CASE("lowering_operator acts as the qubit ladder") {
  ExcitationBasis b1 = build_basis(1, 1);
  Operator s1 = lowering_operator(b1, 1);
  CVector one = CVector::Zero(2);
  one(b1.index_of(1)) = 1.0;
  CVector res = s1 * one;
  CHECK(std::abs(res(b1.index_of(0)) - 1.0) < 1e-15);
  CHECK((s1 * s1).norm() == 0.0);

  ExcitationBasis b2 = build_basis(2, 2);
  Operator sa = lowering_operator(b2, 1);
  CVector ten = CVector::Zero(4);
  ten(b2.index_of(0b01)) = 1.0; // |10>: site 1 excited
  res = sa * ten;
  CHECK(std::abs(res(b2.index_of(0)) - 1.0) < 1e-15);
}

TEST_CASE("lowering operators are nilpotent") {
  for (int n = 1; n <= 4; ++n) {
    ExcitationBasis b = build_basis(n, n);
    for (int k = 1; k <= n; ++k) {
      Operator s = lowering_operator(b, k);
      CHECK((s * s).norm() == 0.0);
    }
  }
}

TEST_CASE("sector lowering matches the Kronecker construction") {
  for (int n = 1; n <= 4; ++n) {
    ExcitationBasis b = build_basis(n, n);
    for (int site = 1; site <= n; ++site) {
      Operator sector = lowering_operator(b, site);
      Operator full = lowering_full(n, site);
      for (int i = 0; i < b.dim(); ++i)
        for (int j = 0; j < b.dim(); ++j) {
          const Complex expect =
              full(full_index(b.pattern(i), n), full_index(b.pattern(j), n));
          REQUIRE(std::abs(sector(i, j) - expect) < 1e-15);
        }
    }
  }
}

TEST_CASE("jump_operator") {
  ExcitationBasis b = build_basis(2, 2);
  Operator L = jump_operator(b, 1, 2);

  // annihilates the singlet
  CVector singlet = CVector::Zero(4);
  singlet(b.index_of(0b01)) = 1.0 / std::sqrt(2.0);
  singlet(b.index_of(0b10)) = -1.0 / std::sqrt(2.0);
  CHECK((L * singlet).norm() < 1e-15);

  // L|11> = |01> + |10>
  CVector both = CVector::Zero(4);
  both(b.index_of(0b11)) = 1.0;
  CVector res = L * both;
  CHECK(std::abs(res(b.index_of(0b10)) - 1.0) < 1e-15);
  CHECK(std::abs(res(b.index_of(0b01)) - 1.0) < 1e-15);

  // L^2 |11> = 2|00>, L^3 = 0
  CVector res2 = L * res;
  CHECK(std::abs(res2(b.index_of(0)) - 2.0) < 1e-15);
  CHECK((L * L * L).norm() == 0.0);

  CHECK_THROWS_AS(jump_operator(b, 1, 1), std::invalid_argument);
}

TEST_CASE("partial_trace_pair basics") {
  ExcitationBasis b = build_basis(3, 3);

  // product state |000>
  DensityMatrix vac = pure_density(basis_state(b, 0));
  PairState p = partial_trace_pair(vac, 1, 2);
  CHECK(std::abs(p.mat(0, 0) - 1.0) < 1e-15);
  CHECK(p.mat.norm() == Catch::Approx(1.0));

  // n = 2: no qubits traced out, the singlet survives intact
  ExcitationBasis b2 = build_basis(2, 1);
  auto g2 = make_named_topology(GraphKind::Chain, 2, 1.0, 1.0);
  DensityMatrix srho = pure_density(aleph_state(g2, b2));
  PairState sp = partial_trace_pair(srho, 1, 2);
  CHECK(std::abs(sp.mat(1, 1) - 0.5) < 1e-12);
  CHECK(std::abs(sp.mat(2, 2) - 0.5) < 1e-12);
  CHECK(std::abs(sp.mat(1, 2) + 0.5) < 1e-12);
  CHECK(std::abs(sp.mat(0, 0)) < 1e-12);
}

TEST_CASE("partial trace of the three-site dark state, pair (1,3)") {
  // |aleph_3> = (|100> - |010> + |001>)/sqrt(3); tracing out qubit 2
  // leaves (1/3)|00><00| + (2/3)|Psi+><Psi+|
  ExcitationBasis b = build_basis(3, 1);
  auto g = make_named_topology(GraphKind::Chain, 3, 1.0, 1.0);
  DensityMatrix rho = pure_density(aleph_state(g, b));
  PairState p = partial_trace_pair(rho, 1, 3);

  Eigen::Matrix4cd expect = Eigen::Matrix4cd::Zero();
  expect(0, 0) = 1.0 / 3.0;
  expect(1, 1) = expect(2, 2) = 1.0 / 3.0;
  expect(1, 2) = expect(2, 1) = 1.0 / 3.0;
  CHECK((p.mat - expect).norm() < 1e-12);
}

TEST_CASE("partial trace preserves trace and factorizes product states") {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 4); // 2..5
    ExcitationBasis b = build_basis(n, n);

    // random density matrix
    Operator a = Operator::NullaryExpr(b.dim(), b.dim(),
                                       [&](Eigen::Index, Eigen::Index) { return random_amp(); });
    Operator rho_m = a * a.adjoint();
    rho_m /= rho_m.trace();
    DensityMatrix rho{b, rho_m};
    const int k = 1 + static_cast<int>(rng() % n);
    int j = 1 + static_cast<int>(rng() % n);
    if (j == k) j = (j % n) + 1;
    PairState ps = partial_trace_pair(rho, k, j);
    CHECK(std::abs(ps.trace() - rho.trace()) < 1e-12);

    // random product state factorizes into the product of marginals
    std::vector<Eigen::Vector2cd> site(static_cast<std::size_t>(n));
    for (auto& s : site) {
      s << random_amp(), random_amp();
      s.normalize();
    }
    CVector amp(b.dim());
    for (int i = 0; i < b.dim(); ++i) {
      Complex prod = 1.0;
      for (int q = 1; q <= n; ++q)
        prod *= site[static_cast<std::size_t>(q - 1)](
            ExcitationBasis::occupied(b.pattern(i), q) ? 1 : 0);
      amp(i) = prod;
    }
    DensityMatrix prho = pure_density(PureState{b, amp});
    PairState pp = partial_trace_pair(prho, k, j);
    Operator mk = site[static_cast<std::size_t>(k - 1)] *
                  site[static_cast<std::size_t>(k - 1)].adjoint();
    Operator mj = site[static_cast<std::size_t>(j - 1)] *
                  site[static_cast<std::size_t>(j - 1)].adjoint();
    CHECK((pp.mat - kron2(mk, mj)).norm() < 1e-12);
  }
}

TEST_CASE("overlap") {
  auto g = make_named_topology(GraphKind::Chain, 3, 1.0, 1.0);
  ExcitationBasis b = build_basis(3, 1);
  PureState aleph = aleph_state(g, b);

  CHECK(std::abs(overlap(aleph, aleph) - Complex(1.0)) < 1e-14);

  PureState vac = basis_state(b, 0);
  CHECK(std::abs(overlap(vac, aleph)) < 1e-15);

  for (int k = 1; k <= 3; ++k) {
    DensityMatrix kk = pure_density(basis_state(b, 1u << (k - 1)));
    CHECK(overlap(kk, aleph) == Catch::Approx(1.0 / 3.0));
  }

  ExcitationBasis other = build_basis(3, 2);
  PureState psi = basis_state(other, 0);
  CHECK_THROWS_AS(overlap(psi, aleph), std::invalid_argument);
}

TEST_CASE("pure state normalization contract") {
  ExcitationBasis b = build_basis(2, 1);
  CVector raw(3);
  raw << 2.0, 0.0, 0.0;
  PureState s = make_pure_state(b, raw);
  CHECK(s.norm() == Catch::Approx(1.0));
  CHECK_THROWS_AS(make_pure_state(b, CVector::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(make_pure_state(b, CVector::Zero(5)), std::invalid_argument);
}
