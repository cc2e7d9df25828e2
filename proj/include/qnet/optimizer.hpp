#pragma once

// Derivative-free search for the largest stationary pair concurrence over
// initial pure states with bounded excitation number on a restricted
// support. Tests the conjecture that one excitation is already optimal:
// C_s(N, m) <= C_s(1, m) = 2m/n^2.

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <vector>

#include "qnet/concurrence.hpp"
#include "qnet/dark_state.hpp"
#include "qnet/errors.hpp"
#include "qnet/graph.hpp"
#include "qnet/liouvillian.hpp"
#include "qnet/states.hpp"

namespace qnet {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0; // minimized objective value
  long evaluations = 0;
  bool converged = false;
};

/// Standard Nelder-Mead simplex minimization with reflection 1,
/// expansion 2, contraction 0.5 and shrink 0.5.
template <typename Fn>
NelderMeadResult nelder_mead(Fn&& fn, const Eigen::VectorXd& x0, double step,
                             double ftol, long max_evals) {
  const int n = static_cast<int>(x0.size());
  NelderMeadResult res;
  std::vector<Eigen::VectorXd> xs(static_cast<std::size_t>(n) + 1, x0);
  std::vector<double> fs(static_cast<std::size_t>(n) + 1);
  for (int i = 1; i <= n; ++i) xs[static_cast<std::size_t>(i)](i - 1) += step;
  for (int i = 0; i <= n; ++i) {
    if (res.evaluations >= max_evals) {
      // budget too small for the initial simplex
      res.x = xs[0];
      res.value = fs[0];
      return res;
    }
    fs[static_cast<std::size_t>(i)] = fn(xs[static_cast<std::size_t>(i)]);
    ++res.evaluations;
  }

  std::vector<int> order(static_cast<std::size_t>(n) + 1);
  while (res.evaluations < max_evals) {
    for (int i = 0; i <= n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(),
              [&fs](int a, int b) { return fs[static_cast<std::size_t>(a)] < fs[static_cast<std::size_t>(b)]; });
    const int best = order[0], worst = order[static_cast<std::size_t>(n)];
    const int second_worst = order[static_cast<std::size_t>(n - 1)];
    if (fs[static_cast<std::size_t>(worst)] - fs[static_cast<std::size_t>(best)] < ftol) {
      res.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i <= n; ++i)
      if (i != worst) centroid += xs[static_cast<std::size_t>(i)];
    centroid /= n;

    auto try_point = [&](const Eigen::VectorXd& x) {
      ++res.evaluations;
      return fn(x);
    };

    const Eigen::VectorXd reflected = centroid + (centroid - xs[static_cast<std::size_t>(worst)]);
    const double fr = try_point(reflected);
    if (fr < fs[static_cast<std::size_t>(best)]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - xs[static_cast<std::size_t>(worst)]);
      const double fe = res.evaluations < max_evals ? try_point(expanded) : fr + 1.0;
      if (fe < fr) {
        xs[static_cast<std::size_t>(worst)] = expanded;
        fs[static_cast<std::size_t>(worst)] = fe;
      } else {
        xs[static_cast<std::size_t>(worst)] = reflected;
        fs[static_cast<std::size_t>(worst)] = fr;
      }
    } else if (fr < fs[static_cast<std::size_t>(second_worst)]) {
      xs[static_cast<std::size_t>(worst)] = reflected;
      fs[static_cast<std::size_t>(worst)] = fr;
    } else {
      const Eigen::VectorXd contracted =
          centroid + 0.5 * (xs[static_cast<std::size_t>(worst)] - centroid);
      const double fc = res.evaluations < max_evals
                            ? try_point(contracted)
                            : fs[static_cast<std::size_t>(worst)] + 1.0;
      if (fc < fs[static_cast<std::size_t>(worst)]) {
        xs[static_cast<std::size_t>(worst)] = contracted;
        fs[static_cast<std::size_t>(worst)] = fc;
      } else {
        for (int i = 0; i <= n; ++i) { // shrink toward the best vertex
          if (i == best) continue;
          xs[static_cast<std::size_t>(i)] =
              xs[static_cast<std::size_t>(best)] +
              0.5 * (xs[static_cast<std::size_t>(i)] - xs[static_cast<std::size_t>(best)]);
          if (res.evaluations >= max_evals) break;
          fs[static_cast<std::size_t>(i)] = try_point(xs[static_cast<std::size_t>(i)]);
        }
      }
    }
  }

  int arg_best = 0;
  for (int i = 1; i <= n; ++i)
    if (fs[static_cast<std::size_t>(i)] < fs[static_cast<std::size_t>(arg_best)]) arg_best = i;
  res.x = xs[static_cast<std::size_t>(arg_best)];
  res.value = fs[static_cast<std::size_t>(arg_best)];
  return res;
}

} // namespace detail

/// Shared evaluation engine for one (graph, excitation cap): holds the
/// sector basis and the precomputed kernel projector, so each objective
/// evaluation costs a few small matrix products.
class SteadyPairConcurrence {
 public:
  SteadyPairConcurrence(const NetworkGraph& g, int n_max)
      : graph_(g), basis_(g.n, n_max), projector_(build_liouvillian(g, basis_)) {}

  const ExcitationBasis& basis() const { return basis_; }
  const NetworkGraph& graph() const { return graph_; }

  /// Largest pair concurrence of the steady state reached from |psi>.
  double max_pair_concurrence(const CVector& psi) const {
    DensityMatrix steady{basis_, projector_.project(psi * psi.adjoint())};
    double best = 0.0;
    for (int k = 1; k <= graph_.n; ++k)
      for (int j = k + 1; j <= graph_.n; ++j) {
        const double c =
            wootters_concurrence(partial_trace_pair(steady, k, j), 1e-6);
        best = std::max(best, c);
      }
    return best;
  }

 private:
  NetworkGraph graph_;
  ExcitationBasis basis_;
  KernelProjector projector_;
};

struct ConjectureOptions {
  int restarts = 20;
  double simplex_tol = 1e-8; // objective-value convergence per restart
  double holds_tol = 1e-6;   // slack for best <= formula comparisons
  std::uint64_t seed = 0;
};

struct ConjectureReport {
  int n = 0, N = 0, m = 0;
  std::vector<int> support;
  double best_value = 0.0;
  PureState best_state;
  double formula_value = 0.0;
  bool conjecture_holds = false;
  int restarts = 0;
  long evaluations = 0;
  bool converged = false;
  double tol = 0.0;
};

/// Maximizes the stationary pair concurrence over pure initial states of
/// weight <= N confined to `support`, via Nelder-Mead restarts on the
/// real-and-imaginary amplitude parametrization (states normalized before
/// each evaluation). Requires a bipartite graph with all detunings zero.
inline ConjectureReport maximize_stationary_concurrence(
    const NetworkGraph& g, int N, std::vector<int> support, long budget,
    const ConjectureOptions& opts = {},
    const SteadyPairConcurrence* shared = nullptr) {
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  const int m = static_cast<int>(support.size());
  if (m < 1 || m > g.n)
    throw std::invalid_argument("maximize_stationary_concurrence: bad support");
  for (int v : support)
    if (v < 1 || v > g.n)
      throw std::invalid_argument(
          "maximize_stationary_concurrence: support vertex out of range");
  if (N < 1 || N > m)
    throw std::invalid_argument(
        "maximize_stationary_concurrence: need 1 <= N <= |support|");
  if (budget < 1)
    throw std::invalid_argument("maximize_stationary_concurrence: empty budget");
  if (classify_topology(g).cls != Topology::Bipartite)
    throw PreconditionError(
        "maximize_stationary_concurrence: graph is not bipartite");
  if (resonance_check(g).cls != ResonanceClass::Degenerate)
    throw PreconditionError(
        "maximize_stationary_concurrence: graph detunings are not all zero");

  std::unique_ptr<SteadyPairConcurrence> own;
  if (!shared || shared->basis().max_excitations() != N) {
    own = std::make_unique<SteadyPairConcurrence>(g, N);
    shared = own.get();
  }
  const ExcitationBasis& basis = shared->basis();

  // Basis slots reachable with this support.
  std::uint32_t support_mask = 0;
  for (int v : support) support_mask |= 1u << (v - 1);
  std::vector<int> slots;
  for (int i = 0; i < basis.dim(); ++i)
    if ((basis.pattern(i) & ~support_mask) == 0) slots.push_back(i);
  const int D = static_cast<int>(slots.size());
  const int dim = 2 * D;

  auto to_state = [&](const Eigen::VectorXd& params, CVector& psi) -> bool {
    psi.setZero(basis.dim());
    for (int i = 0; i < D; ++i)
      psi(slots[static_cast<std::size_t>(i)]) =
          Complex(params(2 * i), params(2 * i + 1));
    const double nrm = psi.norm();
    if (nrm < 1e-14) return false;
    psi /= nrm;
    return true;
  };

  ConjectureReport report;
  report.n = g.n;
  report.N = N;
  report.m = m;
  report.support = support;
  report.formula_value = max_concurrence_formula(g.n, m);
  report.tol = opts.holds_tol;

  long used = 0;
  double best = -1.0;
  Eigen::VectorXd best_x = Eigen::VectorXd::Zero(dim);
  CVector scratch;
  auto objective = [&](const Eigen::VectorXd& params) -> double {
    ++used;
    if (!to_state(params, scratch)) return 0.0;
    const double value = shared->max_pair_concurrence(scratch);
    if (value > best) {
      best = value;
      best_x = params;
    }
    return value;
  };
  auto neg_objective = [&](const Eigen::VectorXd& params) {
    return -objective(params);
  };

  std::mt19937_64 rng(detail::splitmix64(opts.seed + 0x51ed'2705'0f13'9a41ULL));
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int restarts = std::max(1, opts.restarts);
  const long per_restart = std::max<long>(budget / restarts, 2L * dim + 4);

  for (int r = 0; r < restarts && used < budget; ++r) {
    Eigen::VectorXd x0(dim);
    for (int i = 0; i < dim; ++i) x0(i) = gauss(rng);
    x0.normalize();
    const long cap = std::min(per_restart, budget - used);
    auto run = detail::nelder_mead(neg_objective, x0, 0.5, opts.simplex_tol, cap);
    report.converged = report.converged || run.converged;
    ++report.restarts;
  }
  if (budget - used > 2 * dim + 4 && best >= 0.0) {
    // polish the incumbent with the leftover budget
    auto run = detail::nelder_mead(neg_objective, best_x, 0.05,
                                   opts.simplex_tol, budget - used);
    report.converged = report.converged || run.converged;
  }

  report.evaluations = used;
  report.best_value = std::max(best, 0.0);
  CVector psi;
  if (to_state(best_x, psi)) {
    report.best_state = PureState{basis, std::move(psi)};
  } else {
    report.best_state = basis_state(basis, 0);
  }
  report.conjecture_holds =
      report.best_value <= report.formula_value + opts.holds_tol;
  return report;
}

namespace detail {

inline void all_subsets(int n, int m, std::vector<std::vector<int>>& out) {
  std::vector<int> comb(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) comb[static_cast<std::size_t>(i)] = i + 1;
  while (true) {
    out.push_back(comb);
    int i = m - 1;
    while (i >= 0 && comb[static_cast<std::size_t>(i)] == n - m + i + 1) --i;
    if (i < 0) break;
    ++comb[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < m; ++j)
      comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
  }
}

} // namespace detail

/// Runs the maximization for every cell 1 <= N <= m <= n. Supports are
/// the index-first prefix {1..m}; for n <= 5 every m-subset is searched.
/// `budget` is the evaluation budget of each individual search.
inline std::vector<ConjectureReport> conjecture_sweep(
    const NetworkGraph& g, int n_cap, long budget,
    const ConjectureOptions& opts = {}) {
  std::vector<ConjectureReport> reports;
  std::map<int, std::unique_ptr<SteadyPairConcurrence>> engines;
  for (int m = 1; m <= g.n; ++m) {
    std::vector<std::vector<int>> supports;
    if (g.n <= 5) {
      detail::all_subsets(g.n, m, supports);
    } else {
      std::vector<int> prefix(static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i) prefix[static_cast<std::size_t>(i)] = i + 1;
      supports.push_back(std::move(prefix));
    }
    for (int N = 1; N <= std::min(n_cap, m); ++N) {
      auto it = engines.find(N);
      if (it == engines.end())
        it = engines.emplace(N, std::make_unique<SteadyPairConcurrence>(g, N))
                 .first;
      for (const auto& support : supports) {
        ConjectureOptions run_opts = opts;
        std::uint64_t h = opts.seed;
        h = detail::splitmix64(h ^ static_cast<std::uint64_t>(N));
        h = detail::splitmix64(h ^ static_cast<std::uint64_t>(m) << 8);
        for (int v : support)
          h = detail::splitmix64(h ^ static_cast<std::uint64_t>(v) << 16);
        run_opts.seed = h;
        reports.push_back(maximize_stationary_concurrence(
            g, N, support, budget, run_opts, it->second.get()));
      }
    }
  }
  return reports;
}

} // namespace qnet
