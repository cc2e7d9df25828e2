#pragma once

// Wootters concurrence for two-qubit states and the all-pairs map over a
// network state.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "qnet/states.hpp"

namespace qnet {

namespace detail {

inline const Eigen::Matrix4cd& spin_flip() {
  // (Y tensor Y): antidiagonal (-1, 1, 1, -1).
  static const Eigen::Matrix4cd f = [] {
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    m(0, 3) = -1.0;
    m(1, 2) = 1.0;
    m(2, 1) = 1.0;
    m(3, 0) = -1.0;
    return m;
  }();
  return f;
}

} // namespace detail

/// C = max(0, l1 - l2 - l3 - l4) with l_i the descending square-rooted
/// eigenvalues of rho * flip(rho). The eigenvalues are taken from the
/// Hermitian equivalent sqrt(rho) flip(rho) sqrt(rho), which keeps them
/// real near C = 0.
inline double wootters_concurrence(const PairState& rho,
                                   double psd_tol = 1e-8) {
  if (hermiticity_error(rho.mat) > 1e-8)
    throw std::invalid_argument("wootters_concurrence: state not Hermitian");
  if (std::abs(rho.trace() - Complex(1.0)) > 1e-8)
    throw std::invalid_argument("wootters_concurrence: trace is not one");

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(
      (rho.mat + rho.mat.adjoint()) / 2.0);
  if (es.eigenvalues().minCoeff() < -psd_tol)
    throw std::invalid_argument(
        "wootters_concurrence: state has a negative eigenvalue beyond "
        "tolerance");
  Eigen::Vector4d clipped = es.eigenvalues().cwiseMax(0.0);
  const Eigen::Matrix4cd sqrt_rho = es.eigenvectors() *
                                    clipped.cwiseSqrt().asDiagonal() *
                                    es.eigenvectors().adjoint();

  const Eigen::Matrix4cd& flip = detail::spin_flip();
  const Eigen::Matrix4cd tilde = flip * rho.mat.conjugate() * flip;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> rs(
      Eigen::Matrix4cd(sqrt_rho * tilde * sqrt_rho));
  Eigen::Vector4d mu = rs.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  std::sort(mu.data(), mu.data() + 4, std::greater<double>());
  double c = mu(0) - mu(1) - mu(2) - mu(3);
  if (c < 1e-12) c = 0.0;
  return std::min(c, 1.0);
}

struct ConcurrenceMap {
  struct Entry {
    int k = 0, j = 0; // k < j
    double concurrence = 0.0;
  };
  std::vector<Entry> entries;

  double at(int k, int j) const {
    const int a = std::min(k, j), b = std::max(k, j);
    for (const auto& e : entries)
      if (e.k == a && e.j == b) return e.concurrence;
    throw std::invalid_argument("ConcurrenceMap: no such pair");
  }

  double max() const {
    double m = 0.0;
    for (const auto& e : entries) m = std::max(m, e.concurrence);
    return m;
  }

  double min() const {
    double m = entries.empty() ? 0.0 : entries.front().concurrence;
    for (const auto& e : entries) m = std::min(m, e.concurrence);
    return m;
  }
};

/// Concurrence of every unordered qubit pair of rho.
inline ConcurrenceMap concurrence_map(const DensityMatrix& rho) {
  ConcurrenceMap map;
  const int n = rho.basis.sites();
  map.entries.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int k = 1; k <= n; ++k)
    for (int j = k + 1; j <= n; ++j)
      map.entries.push_back(
          {k, j, wootters_concurrence(partial_trace_pair(rho, k, j))});
  return map;
}

} // namespace qnet
