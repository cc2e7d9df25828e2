#pragma once

// State containers over an ExcitationBasis plus the reductions used
// throughout: pair partial trace, overlaps, trace distance.

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "qnet/basis.hpp"

namespace qnet {

struct PureState {
  ExcitationBasis basis;
  CVector amp; // length basis.dim(), unit norm

  double norm() const { return amp.norm(); }
};

/// Normalizes a raw amplitude vector into a PureState.
inline PureState make_pure_state(ExcitationBasis basis, CVector amp) {
  if (amp.size() != basis.dim())
    throw std::invalid_argument("make_pure_state: amplitude length mismatch");
  double nrm = amp.norm();
  if (!(nrm > 0.0))
    throw std::invalid_argument("make_pure_state: zero vector");
  amp /= nrm;
  return PureState{std::move(basis), std::move(amp)};
}

/// Basis ket |pattern>.
inline PureState basis_state(const ExcitationBasis& basis, std::uint32_t pattern) {
  CVector v = CVector::Zero(basis.dim());
  v(basis.index_of(pattern)) = 1.0;
  return PureState{basis, std::move(v)};
}

struct DensityMatrix {
  ExcitationBasis basis;
  Operator mat; // dim x dim, Hermitian, unit trace

  Complex trace() const { return mat.trace(); }
  double purity() const { return (mat * mat).trace().real(); }
};

inline DensityMatrix pure_density(const PureState& psi) {
  return DensityMatrix{psi.basis, psi.amp * psi.amp.adjoint()};
}

inline double hermiticity_error(const Operator& m) {
  return (m - m.adjoint()).norm();
}

inline double min_eigenvalue(const Operator& m) {
  Eigen::SelfAdjointEigenSolver<Operator> es((m + m.adjoint()) / 2.0);
  return es.eigenvalues().minCoeff();
}

/// Hermiticity / trace / positivity check, tolerances matching the state
/// contracts (trace within 1e-10, eigenvalues above -1e-10 by default).
inline bool is_valid_density(const DensityMatrix& rho, double herm_tol = 1e-12,
                             double trace_tol = 1e-10, double psd_tol = 1e-10) {
  if (hermiticity_error(rho.mat) > herm_tol) return false;
  if (std::abs(rho.trace() - Complex(1.0)) > trace_tol) return false;
  return min_eigenvalue(rho.mat) >= -psd_tol;
}

/// Expectation of the total excitation number.
inline double excitation_number(const DensityMatrix& rho) {
  double x = 0.0;
  for (int i = 0; i < rho.basis.dim(); ++i)
    x += ExcitationBasis::weight(rho.basis.pattern(i)) * rho.mat(i, i).real();
  return x;
}

/// Two-qubit reduced state in the ordered basis |00>, |01>, |10>, |11>,
/// first slot = first qubit argument of the reduction.
struct PairState {
  Eigen::Matrix4cd mat = Eigen::Matrix4cd::Zero();

  Complex trace() const { return mat.trace(); }
};

/// Traces out every qubit except k and j, directly over the sector basis:
/// two basis patterns contribute when they agree outside {k, j}.
inline PairState partial_trace_pair(const DensityMatrix& rho, int k, int j) {
  const auto& basis = rho.basis;
  if (k == j) throw std::invalid_argument("partial_trace_pair: k and j must differ");
  if (k < 1 || k > basis.sites() || j < 1 || j > basis.sites())
    throw std::invalid_argument("partial_trace_pair: vertex out of range");
  const std::uint32_t bk = 1u << (k - 1), bj = 1u << (j - 1);
  const std::uint32_t rest = ~(bk | bj);
  PairState out;
  for (int a = 0; a < basis.dim(); ++a) {
    const std::uint32_t pa = basis.pattern(a);
    const int ra = 2 * ((pa & bk) ? 1 : 0) + ((pa & bj) ? 1 : 0);
    for (int b = 0; b < basis.dim(); ++b) {
      const std::uint32_t pb = basis.pattern(b);
      if ((pa & rest) != (pb & rest)) continue;
      const int rb = 2 * ((pb & bk) ? 1 : 0) + ((pb & bj) ? 1 : 0);
      out.mat(ra, rb) += rho.mat(a, b);
    }
  }
  return out;
}

/// <b|a> for pure states sharing a basis.
inline Complex overlap(const PureState& a, const PureState& b) {
  if (!a.basis.compatible(b.basis))
    throw std::invalid_argument("overlap: basis mismatch");
  return b.amp.dot(a.amp); // Eigen's dot conjugates the left factor
}

/// <b|a|b> for a density matrix a; real and in [0,1] for valid states.
inline double overlap(const DensityMatrix& a, const PureState& b) {
  if (!a.basis.compatible(b.basis))
    throw std::invalid_argument("overlap: basis mismatch");
  return (b.amp.adjoint() * a.mat * b.amp)(0).real();
}

/// Trace distance (1/2)||rho - sigma||_1 between states on one basis.
inline double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (!rho.basis.compatible(sigma.basis))
    throw std::invalid_argument("trace_distance: basis mismatch");
  Operator diff = rho.mat - sigma.mat;
  diff = (diff + diff.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Operator> es(diff);
  return es.eigenvalues().cwiseAbs().sum() / 2.0;
}

} // namespace qnet
