#pragma once

// Lindblad generator of the network: XY Hamiltonian plus one pair-decay
// channel per edge, with L_e = sigma_k + sigma_l. The paper-level sum over
// ordered vertex pairs collapses to one term per unordered edge carrying
//
//   gamma_e * (2 L_e rho L_e^dag - L_e^dag L_e rho - rho L_e^dag L_e),
//
// i.e. twice the textbook dissipator at rate gamma_e. All reported rates
// use this convention.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "qnet/basis.hpp"
#include "qnet/errors.hpp"
#include "qnet/graph.hpp"
#include "qnet/states.hpp"

namespace qnet {

struct JumpTerm {
  Edge edge;
  double rate = 0.0; // gamma_e of the edge
  Operator op;       // L_e in the sector basis
  Operator op_sq;    // L_e^dag L_e
};

struct LiouvillianSpec {
  NetworkGraph graph;
  ExcitationBasis basis;
  Operator hamiltonian;
  std::vector<JumpTerm> jumps;

  int dim() const { return basis.dim(); }
};

/// H = sum_k omega_k n_k + sum_edges J_e (sigma_k^dag sigma_l + h.c.),
/// assembled directly in the sector basis. Conserves total excitation
/// number by construction.
inline Operator build_hamiltonian(const NetworkGraph& g,
                                  const ExcitationBasis& basis) {
  if (basis.sites() != g.n)
    throw std::invalid_argument("build_hamiltonian: basis/graph size mismatch");
  const int d = basis.dim();
  Operator h = Operator::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    const std::uint32_t p = basis.pattern(i);
    double diag = 0.0;
    for (int k = 1; k <= g.n; ++k)
      if (ExcitationBasis::occupied(p, k))
        diag += g.onsite[static_cast<std::size_t>(k - 1)];
    h(i, i) = diag;
  }
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const int k = g.edges[e].k, l = g.edges[e].l;
    const double J = g.coupling[e];
    const std::uint32_t bk = 1u << (k - 1), bl = 1u << (l - 1);
    for (int i = 0; i < d; ++i) {
      const std::uint32_t p = basis.pattern(i);
      if ((p & bl) && !(p & bk)) { // sigma_k^dag sigma_l moves l -> k
        const int j = basis.index_of((p & ~bl) | bk);
        h(j, i) += J;
        h(i, j) += J;
      }
    }
  }
  return h;
}

inline LiouvillianSpec build_liouvillian(const NetworkGraph& g,
                                         const ExcitationBasis& basis) {
  LiouvillianSpec spec;
  spec.graph = g;
  spec.basis = basis;
  spec.hamiltonian = build_hamiltonian(g, basis);
  spec.jumps.reserve(g.edges.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    JumpTerm t;
    t.edge = g.edges[e];
    t.rate = g.decay[e];
    t.op = jump_operator(basis, t.edge.k, t.edge.l);
    t.op_sq = t.op.adjoint() * t.op;
    spec.jumps.push_back(std::move(t));
  }
  return spec;
}

/// d(rho)/dt. Traceless and Hermiticity-preserving by the Lindblad form.
inline Operator apply_liouvillian(const LiouvillianSpec& spec,
                                  const Operator& rho) {
  if (rho.rows() != spec.dim() || rho.cols() != spec.dim())
    throw std::invalid_argument("apply_liouvillian: dimension mismatch");
  const Complex minus_i(0.0, -1.0);
  Operator out = minus_i * (spec.hamiltonian * rho - rho * spec.hamiltonian);
  for (const auto& t : spec.jumps)
    out += t.rate * (2.0 * (t.op * rho * t.op.adjoint()) - t.op_sq * rho -
                     rho * t.op_sq);
  return out;
}

inline Operator apply_liouvillian(const LiouvillianSpec& spec,
                                  const DensityMatrix& rho) {
  if (!rho.basis.compatible(spec.basis))
    throw std::invalid_argument("apply_liouvillian: basis mismatch");
  return apply_liouvillian(spec, rho.mat);
}

/// Dominant parameter scale used for default step sizes and the stability
/// precondition.
inline double rate_scale(const NetworkGraph& g) {
  double s = 0.0;
  for (double w : g.onsite) s = std::max(s, std::abs(w));
  for (double J : g.coupling) s = std::max(s, std::abs(J));
  for (double gm : g.decay) s = std::max(s, std::abs(gm));
  return s > 0.0 ? s : 1.0;
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a,
                             const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Column-stacking vectorization of the generator: the d^2 x d^2 matrix M
/// with vec(L(rho)) = M vec(rho). Guarded by a dimension cap since the
/// matrix is dense.
inline Eigen::MatrixXcd liouvillian_matrix(const LiouvillianSpec& spec,
                                           int max_vec_dim = 4096) {
  const int d = spec.dim();
  if (d * d > max_vec_dim)
    throw std::invalid_argument(
        "liouvillian_matrix: vectorized dimension " + std::to_string(d * d) +
        " exceeds cap " + std::to_string(max_vec_dim));
  const Operator id = Operator::Identity(d, d);
  const Complex i_unit(0.0, 1.0);
  Eigen::MatrixXcd m =
      -i_unit * (kron(id, spec.hamiltonian) -
                 kron(spec.hamiltonian.transpose(), id));
  for (const auto& t : spec.jumps) {
    m += t.rate * (2.0 * kron(t.op.conjugate(), t.op) - kron(id, t.op_sq) -
                   kron(t.op_sq.transpose(), id));
  }
  return m;
}

inline CVector vec(const Operator& m) {
  return Eigen::Map<const CVector>(m.data(), m.size());
}

inline Operator unvec(const CVector& v, int d) {
  return Eigen::Map<const Operator>(v.data(), d, d);
}

namespace detail {

inline void rk4_step(const LiouvillianSpec& spec, Operator& rho, double dt) {
  Operator k1 = apply_liouvillian(spec, rho);
  Operator k2 = apply_liouvillian(spec, Operator(rho + 0.5 * dt * k1));
  Operator k3 = apply_liouvillian(spec, Operator(rho + 0.5 * dt * k2));
  Operator k4 = apply_liouvillian(spec, Operator(rho + dt * k3));
  rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  rho = (rho + rho.adjoint().eval()) / 2.0; // re-Hermitize each step
}

} // namespace detail

struct EvolveOptions {
  double t_final = 0.0;
  double dt = 0.0;         // 0 -> 0.01 / rate_scale
  int observe_stride = 1;  // observer called every this many steps
  double trace_tol = 1e-6; // abort threshold on trace drift
};

using TrajectoryObserver = std::function<void(double, const DensityMatrix&)>;

/// Fixed-step RK4 on d(rho)/dt = L(rho). The stability precondition
/// dt <= 0.1 / rate_scale is enforced up front; trace drift beyond
/// trace_tol aborts with a diagnostic.
inline DensityMatrix evolve(const LiouvillianSpec& spec,
                            const DensityMatrix& rho0,
                            const EvolveOptions& opts,
                            const TrajectoryObserver& observer = {}) {
  if (!rho0.basis.compatible(spec.basis))
    throw std::invalid_argument("evolve: basis mismatch");
  if (!(opts.t_final > 0.0))
    throw std::invalid_argument("evolve: t_final must be positive");
  const double scale = rate_scale(spec.graph);
  double dt = opts.dt > 0.0 ? opts.dt : 0.01 / scale;
  if (!(dt > 0.0)) throw std::invalid_argument("evolve: dt must be positive");
  if (dt > 0.1 / scale)
    throw std::invalid_argument(
        "evolve: dt " + std::to_string(dt) +
        " violates the stability bound 0.1/rate_scale = " +
        std::to_string(0.1 / scale));

  const long steps = static_cast<long>(std::ceil(opts.t_final / dt - 1e-12));
  const double trace0 = rho0.mat.trace().real();
  Operator rho = rho0.mat;
  double t = 0.0;
  if (observer) observer(t, DensityMatrix{spec.basis, rho});
  for (long s = 1; s <= steps; ++s) {
    const double step = std::min(dt, opts.t_final - t);
    detail::rk4_step(spec, rho, step);
    t += step;
    const double drift = std::abs(rho.trace().real() - trace0);
    if (drift > opts.trace_tol)
      throw NumericalError("evolve: trace drift " + std::to_string(drift) +
                           " at t = " + std::to_string(t) +
                           " (unstable step size?)");
    if (observer && (s % opts.observe_stride == 0 || s == steps))
      observer(t, DensityMatrix{spec.basis, rho});
  }
  return DensityMatrix{spec.basis, std::move(rho)};
}

/// Convenience wrapper recording snapshots.
inline std::vector<std::pair<double, DensityMatrix>> evolve_trajectory(
    const LiouvillianSpec& spec, const DensityMatrix& rho0,
    const EvolveOptions& opts) {
  std::vector<std::pair<double, DensityMatrix>> traj;
  evolve(spec, rho0, opts, [&traj](double t, const DensityMatrix& rho) {
    traj.emplace_back(t, rho);
  });
  return traj;
}

/// Kernel data of the vectorized generator: the modes that survive as
/// t -> infinity. The projector is the oblique spectral projector
/// R (W^dag R)^{-1} W^dag built from the right (M) and left (M^dag)
/// kernel eigenvectors; that stays well-defined even when the decaying
/// part of the spectrum is defective, since the zero eigenvalue of a
/// Lindblad generator is semisimple.
class KernelProjector {
 public:
  KernelProjector(const LiouvillianSpec& spec, double tol = 0.0)
      : d_(spec.dim()) {
    Eigen::MatrixXcd m = liouvillian_matrix(spec);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m);
    if (es.info() != Eigen::Success)
      throw NumericalError("KernelProjector: eigendecomposition failed");
    tol_ = tol > 0.0 ? tol : 1e-9 * m.norm();
    eigenvalues_ = es.eigenvalues();
    std::vector<int> kernel_idx;
    for (Eigen::Index i = 0; i < eigenvalues_.size(); ++i)
      if (std::abs(eigenvalues_(i)) <= tol_)
        kernel_idx.push_back(static_cast<int>(i));
    if (kernel_idx.empty())
      throw NumericalError("KernelProjector: empty numerical kernel");

    right_.resize(d_ * d_, static_cast<Eigen::Index>(kernel_idx.size()));
    for (std::size_t c = 0; c < kernel_idx.size(); ++c)
      right_.col(static_cast<Eigen::Index>(c)) =
          es.eigenvectors().col(kernel_idx[c]);

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es_adj(m.adjoint());
    if (es_adj.info() != Eigen::Success)
      throw NumericalError("KernelProjector: adjoint eigendecomposition failed");
    std::vector<int> left_idx;
    for (Eigen::Index i = 0; i < es_adj.eigenvalues().size(); ++i)
      if (std::abs(es_adj.eigenvalues()(i)) <= tol_)
        left_idx.push_back(static_cast<int>(i));
    if (left_idx.size() != kernel_idx.size())
      throw NumericalError(
          "KernelProjector: left/right kernel dimension mismatch (" +
          std::to_string(left_idx.size()) + " vs " +
          std::to_string(kernel_idx.size()) + ")");
    left_.resize(d_ * d_, static_cast<Eigen::Index>(left_idx.size()));
    for (std::size_t c = 0; c < left_idx.size(); ++c)
      left_.col(static_cast<Eigen::Index>(c)) =
          es_adj.eigenvectors().col(left_idx[c]);

    gram_ = Eigen::PartialPivLU<Eigen::MatrixXcd>(left_.adjoint() * right_);
    const double rcond = gram_.rcond();
    if (rcond < 1e-13)
      throw NumericalError(
          "KernelProjector: kernel pairing singular (rcond " +
          std::to_string(rcond) + "), kernel appears non-diagonalizable");
    if (rcond < 1e-8)
      warning_ = "ill-conditioned kernel pairing (rcond " +
                 std::to_string(rcond) + ")";
  }

  int kernel_dim() const { return static_cast<int>(right_.cols()); }
  double tol() const { return tol_; }
  const Eigen::VectorXcd& eigenvalues() const { return eigenvalues_; }
  const std::string& warning() const { return warning_; }

  /// t -> infinity limit of rho0 under the generator (asymptotic state up
  /// to decaying transients), re-Hermitized and trace-renormalized.
  Operator project(const Operator& rho0) const {
    CVector coeff = gram_.solve(left_.adjoint() * vec(rho0));
    Operator out = unvec(right_ * coeff, d_);
    out = (out + out.adjoint().eval()) / 2.0;
    const double tr = out.trace().real();
    if (std::abs(tr) < 1e-12)
      throw NumericalError("KernelProjector: projected state has zero trace");
    return out / tr;
  }

  /// Orthonormal basis of the kernel subspace, in matrix form.
  std::vector<Operator> orthonormal_basis() const {
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(right_);
    Eigen::MatrixXcd q = qr.householderQ() *
                         Eigen::MatrixXcd::Identity(d_ * d_, right_.cols());
    std::vector<Operator> out;
    out.reserve(static_cast<std::size_t>(q.cols()));
    for (Eigen::Index c = 0; c < q.cols(); ++c)
      out.push_back(unvec(q.col(c), d_));
    return out;
  }

 private:
  int d_;
  double tol_ = 0.0;
  Eigen::VectorXcd eigenvalues_;
  Eigen::MatrixXcd right_; // d^2 x K, right kernel eigenvectors
  Eigen::MatrixXcd left_;  // d^2 x K, left kernel eigenvectors
  Eigen::PartialPivLU<Eigen::MatrixXcd> gram_; // of W^dag R
  std::string warning_;
};

enum class SteadyMethod { KernelProjection, LongTime, NullSpace };

struct SteadyOptions {
  SteadyMethod method = SteadyMethod::KernelProjection;
  double kernel_tol = 0.0;     // 0 -> 1e-9 * ||M||_F
  double residual_tol = 1e-10; // long-time stopping criterion on ||L(rho)||_F
  double t_cap = 2000.0;       // long-time integration ceiling
  double dt = 0.0;             // 0 -> auto
};

namespace detail {

inline DensityMatrix steady_long_time(const LiouvillianSpec& spec,
                                      const DensityMatrix& rho0,
                                      const SteadyOptions& opts) {
  const double scale = rate_scale(spec.graph);
  const double dt = opts.dt > 0.0 ? opts.dt : 0.01 / scale;
  Operator rho = rho0.mat;
  const double trace0 = rho.trace().real();
  double t = 0.0;
  long step = 0;
  while (t < opts.t_cap) {
    detail::rk4_step(spec, rho, dt);
    t += dt;
    ++step;
    if (std::abs(rho.trace().real() - trace0) > 1e-6)
      throw NumericalError("steady_state: trace drift during long-time run");
    if (step % 10 == 0 &&
        apply_liouvillian(spec, rho).norm() <= opts.residual_tol)
      return DensityMatrix{spec.basis, std::move(rho)};
  }
  if (apply_liouvillian(spec, rho).norm() <= opts.residual_tol)
    return DensityMatrix{spec.basis, std::move(rho)};
  throw NumericalError(
      "steady_state: long-time integration did not converge by t = " +
      std::to_string(opts.t_cap));
}

inline DensityMatrix steady_null_space(const LiouvillianSpec& spec,
                                       const KernelProjector& proj) {
  // Canonical kernel representative: the orthogonal shadow of the
  // maximally mixed state on the kernel span, positivity-clipped.
  const int d = spec.dim();
  Operator id_state = Operator::Identity(d, d) / static_cast<double>(d);
  CVector v = vec(id_state);
  auto basis_mats = proj.orthonormal_basis();
  CVector acc = CVector::Zero(d * d);
  for (const auto& b : basis_mats) {
    CVector bv = vec(b);
    acc += bv * bv.dot(v);
  }
  Operator out = unvec(acc, d);
  out = (out + out.adjoint().eval()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Operator> es(out);
  Eigen::VectorXd ev = es.eigenvalues();
  if (ev.minCoeff() < -1e-8)
    throw NumericalError("steady_state: kernel shadow not positive");
  Eigen::VectorXd clipped = ev.cwiseMax(0.0);
  const double tr = clipped.sum();
  if (tr < 1e-12)
    throw NumericalError("steady_state: kernel shadow has zero trace");
  out = es.eigenvectors() * (clipped / tr).asDiagonal() *
        es.eigenvectors().adjoint();
  return DensityMatrix{spec.basis, std::move(out)};
}

} // namespace detail

/// Steady state reached from rho0. KernelProjection is spectral and exact
/// up to the eigensolver; LongTime integrates until the residual drops
/// below residual_tol; NullSpace ignores rho0 and returns the canonical
/// kernel representative.
inline DensityMatrix steady_state(const LiouvillianSpec& spec,
                                  const DensityMatrix& rho0,
                                  const SteadyOptions& opts = {}) {
  if (!rho0.basis.compatible(spec.basis))
    throw std::invalid_argument("steady_state: basis mismatch");
  switch (opts.method) {
    case SteadyMethod::LongTime:
      return detail::steady_long_time(spec, rho0, opts);
    case SteadyMethod::NullSpace: {
      KernelProjector proj(spec, opts.kernel_tol);
      return detail::steady_null_space(spec, proj);
    }
    case SteadyMethod::KernelProjection:
    default: {
      KernelProjector proj(spec, opts.kernel_tol);
      return DensityMatrix{spec.basis, proj.project(rho0.mat)};
    }
  }
}

/// Full spectrum of the vectorized generator plus its numerical kernel.
struct SuperoperatorSpectrum {
  Eigen::VectorXcd eigenvalues;
  int kernel_dim = 0;
  std::vector<Operator> kernel_basis; // orthonormal, matrix form
  double tol = 0.0;
  std::string warning;
};

inline SuperoperatorSpectrum kernel_spectrum(const LiouvillianSpec& spec,
                                             double tol = 0.0) {
  KernelProjector proj(spec, tol);
  SuperoperatorSpectrum s;
  s.eigenvalues = proj.eigenvalues();
  s.kernel_dim = proj.kernel_dim();
  s.kernel_basis = proj.orthonormal_basis();
  s.tol = proj.tol();
  s.warning = proj.warning();
  return s;
}

} // namespace qnet
