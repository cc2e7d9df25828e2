#pragma once

// Parameter mapping for the doped-cavity-chain realization: adiabatic
// elimination of the fiber modes turns cavity-array inputs into an
// effective dissipative XY chain.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "qnet/graph.hpp"

namespace qnet {

/// Physical inputs of an n-cavity chain. Site quantities have length n,
/// link quantities length n-1. omega_e is the per-link bath reference
/// frequency entering the shifted environment output.
struct CavityChainParams {
  int n = 0;
  std::vector<double> omega_c; // cavity frequencies
  std::vector<double> omega_a; // atom frequencies, must match omega_c
  std::vector<double> f;       // atom-cavity couplings
  std::vector<double> J_fiber; // cavity-fiber couplings per link
  std::vector<double> omega_f; // fiber frequencies per link
  std::vector<double> omega_e; // bath reference per link (may be empty -> 0)
  double kappa_a = 0.0;        // atomic decay, regime validation only
  double kappa_c = 0.0;        // cavity decay, regime validation only
  double strong_coupling_ratio = 100.0;
};

struct EffectiveChainParams {
  std::vector<double> omega_prime;   // per site
  std::vector<double> J_prime;       // per link, always negative
  std::vector<double> omega_e_prime; // per link
  std::vector<double> eta_scale;     // per link, J_k / omega_f_k
  std::vector<std::string> warnings;
  // Site shifts are summed over every adjoining link, which reduces to
  // the single-index expression when parameters are uniform.
  std::string omega_convention = "per-adjoining-link";
};

/// Effective chain parameters after eliminating the fiber modes:
/// J'_k = -J_k^2/omega_f_k, omega'_k = omega_k - f_k minus the adjoining
/// link shifts, omega'^e_k = omega^e_k - 2 J_k^2/omega_f_k. A violated
/// strong-coupling regime produces a warning-carrying result, not a
/// silent success.
inline EffectiveChainParams effective_parameters(const CavityChainParams& p) {
  const std::size_t n = static_cast<std::size_t>(p.n);
  if (p.n < 2) throw std::invalid_argument("effective_parameters: n must be >= 2");
  if (p.omega_c.size() != n || p.omega_a.size() != n || p.f.size() != n)
    throw std::invalid_argument("effective_parameters: site list size mismatch");
  if (p.J_fiber.size() != n - 1 || p.omega_f.size() != n - 1)
    throw std::invalid_argument("effective_parameters: link list size mismatch");
  if (!p.omega_e.empty() && p.omega_e.size() != n - 1)
    throw std::invalid_argument("effective_parameters: omega_e size mismatch");

  double scale = 0.0;
  for (double w : p.omega_c) scale = std::max(scale, std::abs(w));
  for (std::size_t k = 0; k < n; ++k)
    if (std::abs(p.omega_c[k] - p.omega_a[k]) > 1e-12 * std::max(scale, 1.0))
      throw std::invalid_argument(
          "effective_parameters: atom-cavity resonance violated at site " +
          std::to_string(k + 1));
  for (double wf : p.omega_f)
    if (std::abs(wf) < 1e-300)
      throw std::invalid_argument(
          "effective_parameters: vanishing fiber frequency");

  EffectiveChainParams out;
  const double kappa = std::max(p.kappa_a, p.kappa_c);
  if (kappa > 0.0) {
    double f_min = p.f[0];
    for (double fk : p.f) f_min = std::min(f_min, fk);
    if (f_min < p.strong_coupling_ratio * kappa)
      out.warnings.push_back(
          "strong-coupling regime violated: min f / max kappa = " +
          std::to_string(f_min / kappa) + " < " +
          std::to_string(p.strong_coupling_ratio));
  }

  std::vector<double> shift(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k)
    shift[k] = p.J_fiber[k] * p.J_fiber[k] / p.omega_f[k];

  out.omega_prime.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    double w = p.omega_c[k] - p.f[k];
    if (k > 0) w -= shift[k - 1];    // link to the left
    if (k + 1 < n) w -= shift[k];    // link to the right
    out.omega_prime[k] = w;
  }
  out.J_prime.resize(n - 1);
  out.omega_e_prime.resize(n - 1);
  out.eta_scale.resize(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    out.J_prime[k] = -shift[k];
    const double we = p.omega_e.empty() ? 0.0 : p.omega_e[k];
    out.omega_e_prime[k] = we - 2.0 * shift[k];
    out.eta_scale[k] = p.J_fiber[k] / p.omega_f[k];
  }
  return out;
}

/// Open-boundary chain graph carrying the effective parameters, ready for
/// topology and resonance analysis.
inline NetworkGraph to_network(const EffectiveChainParams& p,
                               const std::vector<double>& gamma) {
  const int n = static_cast<int>(p.omega_prime.size());
  if (n < 2) throw std::invalid_argument("to_network: need at least two sites");
  if (gamma.size() != p.J_prime.size())
    throw std::invalid_argument("to_network: gamma size mismatch");
  for (double g : gamma)
    if (!(g > 0.0))
      throw std::invalid_argument("to_network: decay rates must be positive");
  std::vector<Edge> edges;
  for (int k = 1; k < n; ++k) edges.emplace_back(k, k + 1);
  return make_graph(n, std::move(edges), p.J_prime, gamma, p.omega_prime);
}

} // namespace qnet
