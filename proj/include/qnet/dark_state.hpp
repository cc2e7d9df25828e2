#pragma once

// Closed-form steady-state machinery: the entangled dark state, the
// stationarity conditions for pure states, the conserved overlap p and
// the reduced-pair predictions that follow from it.

#include <Eigen/Dense>

#include <cmath>
#include <set>
#include <vector>

#include "qnet/basis.hpp"
#include "qnet/errors.hpp"
#include "qnet/graph.hpp"
#include "qnet/liouvillian.hpp"
#include "qnet/states.hpp"

namespace qnet {

/// The uniform single-excitation superposition with bipartition signs,
/// (1/sqrt(n)) sum_k s_k |k>. Requires a bipartite graph and a basis
/// admitting at least one excitation.
inline PureState aleph_state(const NetworkGraph& g,
                             const ExcitationBasis& basis) {
  if (basis.sites() != g.n)
    throw std::invalid_argument("aleph_state: basis/graph size mismatch");
  if (basis.max_excitations() < 1)
    throw std::invalid_argument("aleph_state: basis excludes single excitations");
  ParityLabeling signs = parity_signs(g); // throws on odd cycles
  CVector amp = CVector::Zero(basis.dim());
  const double norm = 1.0 / std::sqrt(static_cast<double>(g.n));
  for (int k = 1; k <= g.n; ++k)
    amp(basis.index_of(1u << (k - 1))) = signs.sign(k) * norm;
  return PureState{basis, std::move(amp)};
}

/// Residuals of the three pure-steady-state conditions for |psi>:
/// (1) every edge jump annihilates psi (jump eigenvalues vanish by
/// nilpotency), (2) iH + sum_e gamma_e L_e^dag L_e has psi as an
/// eigenvector with fitted eigenvalue lambda, (3) Re(lambda) = 0.
struct DarkConditionsReport {
  std::vector<std::pair<Edge, double>> cond1_residuals;
  double cond1_max = 0.0;
  Complex lambda{0.0, 0.0};
  double cond2_residual = 0.0;
  double cond3_gap = 0.0;
  bool passed = false;
  double tolerance = 0.0;
};

inline DarkConditionsReport verify_dark_conditions(const PureState& psi,
                                                   const NetworkGraph& g,
                                                   double tolerance = 1e-10) {
  if (psi.basis.sites() != g.n)
    throw std::invalid_argument("verify_dark_conditions: basis/graph mismatch");
  DarkConditionsReport r;
  r.tolerance = tolerance;

  const Operator h = build_hamiltonian(g, psi.basis);
  Operator damping = Operator::Zero(psi.basis.dim(), psi.basis.dim());
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const Operator L = jump_operator(psi.basis, g.edges[e].k, g.edges[e].l);
    const double res = (L * psi.amp).norm();
    r.cond1_residuals.emplace_back(g.edges[e], res);
    r.cond1_max = std::max(r.cond1_max, res);
    damping += g.decay[e] * (L.adjoint() * L);
  }

  const Complex i_unit(0.0, 1.0);
  const Operator K = i_unit * h + damping;
  const CVector k_psi = K * psi.amp;
  r.lambda = psi.amp.dot(k_psi);
  r.cond2_residual = (k_psi - r.lambda * psi.amp).norm();
  r.cond3_gap = std::abs(r.lambda.real()); // jump eigenvalues are all zero
  r.passed = r.cond1_max <= tolerance && r.cond2_residual <= tolerance &&
             r.cond3_gap <= tolerance;
  return r;
}

namespace detail {

inline void require_resonant_bipartite(const NetworkGraph& g,
                                       const char* who) {
  if (classify_topology(g).cls != Topology::Bipartite)
    throw PreconditionError(std::string(who) + ": graph is not bipartite");
  const auto res = resonance_check(g);
  if (res.cls == ResonanceClass::OffResonant)
    throw PreconditionError(std::string(who) +
                            ": graph is off-resonant, the overlap with the "
                            "dark state is not conserved");
}

inline void require_single_excitation_support(const ExcitationBasis& basis,
                                              const Operator& mat,
                                              const char* who) {
  for (int i = 0; i < basis.dim(); ++i) {
    if (ExcitationBasis::weight(basis.pattern(i)) <= 1) continue;
    if (mat.row(i).norm() > 1e-12 || mat.col(i).norm() > 1e-12)
      throw PreconditionError(std::string(who) +
                              ": state has support on more than one "
                              "excitation");
  }
}

} // namespace detail

/// Conserved overlap p = <aleph|rho0|aleph>. Requires a bipartite graph
/// whose detunings are uniform (degenerate or resonant-nonzero) and an
/// initial state confined to at most one excitation; otherwise the
/// overlap is not a constant of motion and the call refuses.
inline double predict_p(const DensityMatrix& rho0, const NetworkGraph& g) {
  detail::require_resonant_bipartite(g, "predict_p");
  detail::require_single_excitation_support(rho0.basis, rho0.mat, "predict_p");
  const PureState aleph = aleph_state(g, rho0.basis);
  return overlap(rho0, aleph);
}

inline double predict_p(const PureState& psi0, const NetworkGraph& g) {
  detail::require_resonant_bipartite(g, "predict_p");
  detail::require_single_excitation_support(
      psi0.basis, Operator(psi0.amp * psi0.amp.adjoint()), "predict_p");
  const PureState aleph = aleph_state(g, psi0.basis);
  return std::norm(overlap(psi0, aleph));
}

/// Reduced steady state of qubits (k, j) and its concurrence 2p/n.
struct PairPrediction {
  int k = 0, j = 0;
  double p = 0.0;
  int n = 0;
  int sign = +1; // (-1)^{n_j - n_k}
  double concurrence = 0.0;
  PairState pair_state;
};

inline PairPrediction predict_pair(double p, const NetworkGraph& g, int k,
                                   int j) {
  if (k == j) throw std::invalid_argument("predict_pair: k and j must differ");
  if (k < 1 || k > g.n || j < 1 || j > g.n)
    throw std::invalid_argument("predict_pair: vertex out of range");
  if (p < 0.0 || p > 1.0)
    throw std::invalid_argument("predict_pair: p must lie in [0,1]");
  ParityLabeling signs = parity_signs(g);

  PairPrediction out;
  out.k = k;
  out.j = j;
  out.p = p;
  out.n = g.n;
  out.sign = signs.sign(k) * signs.sign(j);
  out.concurrence = 2.0 * p / g.n;

  // (1 - 2p/n)|00><00| + (2p/n)|Psi><Psi| with
  // |Psi> = (|10> + sign |01>)/sqrt(2) in the (k, j) slot order.
  const double w = out.concurrence;
  out.pair_state.mat(0, 0) = 1.0 - w;
  out.pair_state.mat(2, 2) = w / 2.0;
  out.pair_state.mat(1, 1) = w / 2.0;
  out.pair_state.mat(2, 1) = out.sign * w / 2.0;
  out.pair_state.mat(1, 2) = out.sign * w / 2.0;
  return out;
}

/// (1/sqrt(m)) sum_{j in support} s_j |j>, the initial state maximizing p
/// over states with one excitation spread across the support.
inline PureState optimal_initial_state(const NetworkGraph& g,
                                       const std::vector<int>& support,
                                       const ExcitationBasis& basis) {
  if (support.empty())
    throw std::invalid_argument("optimal_initial_state: empty support");
  if (basis.sites() != g.n || basis.max_excitations() < 1)
    throw std::invalid_argument("optimal_initial_state: unsuitable basis");
  std::set<int> uniq(support.begin(), support.end());
  if (uniq.size() != support.size())
    throw std::invalid_argument("optimal_initial_state: duplicate vertices");
  for (int v : support)
    if (v < 1 || v > g.n)
      throw std::invalid_argument("optimal_initial_state: vertex out of range");
  ParityLabeling signs = parity_signs(g);
  CVector amp = CVector::Zero(basis.dim());
  const double norm = 1.0 / std::sqrt(static_cast<double>(support.size()));
  for (int v : support)
    amp(basis.index_of(1u << (v - 1))) = signs.sign(v) * norm;
  return PureState{basis, std::move(amp)};
}

/// Maximum stationary concurrence reachable with one excitation over m of
/// the n qubits: 2m/n^2.
inline double max_concurrence_formula(int n, int m) {
  if (n < 1 || m < 1 || m > n)
    throw std::invalid_argument("max_concurrence_formula: need 1 <= m <= n");
  return 2.0 * m / (static_cast<double>(n) * n);
}

} // namespace qnet
