#pragma once

// Network graphs: weighted qubit-coupling graphs, bipartiteness
// classification, parity labelings and the resonance test on the
// onsite energies. Vertices are 1-indexed in the whole public API.

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "qnet/errors.hpp"

namespace qnet {

/// Unordered edge, stored canonically with k < l.
struct Edge {
  int k = 0;
  int l = 0;

  Edge() = default;
  Edge(int a, int b) : k(std::min(a, b)), l(std::max(a, b)) {}

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Undirected qubit network: XY couplings J and pair decay rates gamma
/// live on edges, onsite energies omega on vertices.
struct NetworkGraph {
  int n = 0;                    // vertex count
  std::vector<Edge> edges;      // canonical, duplicate-free
  std::vector<double> coupling; // J per edge, parallel to `edges`
  std::vector<double> decay;    // gamma per edge, parallel to `edges`
  std::vector<double> onsite;   // omega per vertex, size n

  int edge_index(int a, int b) const {
    Edge e(a, b);
    for (std::size_t i = 0; i < edges.size(); ++i)
      if (edges[i] == e) return static_cast<int>(i);
    return -1;
  }

  bool has_edge(int a, int b) const { return edge_index(a, b) >= 0; }

  int degree(int k) const {
    int d = 0;
    for (const auto& e : edges)
      if (e.k == k || e.l == k) ++d;
    return d;
  }

  /// Neighbor lists, indexed by vertex (entry 0 unused).
  std::vector<std::vector<int>> adjacency() const {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n) + 1);
    for (const auto& e : edges) {
      adj[e.k].push_back(e.l);
      adj[e.l].push_back(e.k);
    }
    return adj;
  }
};

/// Builds a graph from edge list plus uniform or per-edge parameters.
inline NetworkGraph make_graph(int n, std::vector<Edge> edges,
                               std::vector<double> coupling,
                               std::vector<double> decay,
                               std::vector<double> onsite) {
  if (n < 1) throw std::invalid_argument("make_graph: n must be >= 1");
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  for (const auto& e : edges) {
    if (e.k < 1 || e.l > n)
      throw std::invalid_argument("make_graph: edge vertex out of range");
    if (e.k == e.l) throw std::invalid_argument("make_graph: self-loop");
  }
  if (coupling.size() == 1) coupling.assign(edges.size(), coupling[0]);
  if (decay.size() == 1) decay.assign(edges.size(), decay[0]);
  if (coupling.size() != edges.size() || decay.size() != edges.size())
    throw std::invalid_argument("make_graph: J/gamma size mismatch");
  if (onsite.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("make_graph: omega size mismatch");
  return NetworkGraph{n, std::move(edges), std::move(coupling),
                      std::move(decay), std::move(onsite)};
}

struct ValidationResult {
  bool ok = true;
  std::vector<std::string> violations;
};

/// Checks the standing model assumptions: n >= 2, connected, no isolated
/// vertices, strictly positive decay rates. Violations are data, not
/// exceptions.
inline ValidationResult validate_graph(const NetworkGraph& g) {
  ValidationResult r;
  auto fail = [&r](std::string msg) {
    r.ok = false;
    r.violations.push_back(std::move(msg));
  };
  if (g.n < 2) fail("fewer than two vertices");
  if (g.onsite.size() != static_cast<std::size_t>(g.n))
    fail("onsite energy list has wrong size");
  if (g.coupling.size() != g.edges.size() || g.decay.size() != g.edges.size())
    fail("edge parameter lists have wrong size");
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const auto& e = g.edges[i];
    if (e.k < 1 || e.l > g.n || e.k == e.l) {
      fail("malformed edge (" + std::to_string(e.k) + "," +
           std::to_string(e.l) + ")");
      continue;
    }
    if (i < g.decay.size() && !(g.decay[i] > 0.0))
      fail("nonpositive decay rate on edge (" + std::to_string(e.k) + "," +
           std::to_string(e.l) + ")");
  }
  if (!r.ok) return r;

  // Connectivity by BFS from vertex 1 (also catches isolated vertices).
  auto adj = g.adjacency();
  std::vector<char> seen(static_cast<std::size_t>(g.n) + 1, 0);
  std::queue<int> q;
  q.push(1);
  seen[1] = 1;
  int reached = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int w : adj[v])
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        q.push(w);
      }
  }
  if (reached != g.n) fail("disconnected");
  return r;
}

enum class Topology { Bipartite, OddCycle };

struct TopologyClass {
  Topology cls = Topology::Bipartite;
  std::vector<int> odd_cycle; // witness vertex list, only for OddCycle
};

/// Two-coloring traversal. On a coloring conflict the witness odd cycle is
/// reconstructed from the BFS tree (paths to the lowest common ancestor
/// plus the conflicting edge).
inline TopologyClass classify_topology(const NetworkGraph& g) {
  auto adj = g.adjacency();
  std::vector<int> color(static_cast<std::size_t>(g.n) + 1, -1);
  std::vector<int> parent(static_cast<std::size_t>(g.n) + 1, 0);
  std::vector<int> depth(static_cast<std::size_t>(g.n) + 1, 0);

  for (int root = 1; root <= g.n; ++root) {
    if (color[root] >= 0) continue;
    color[root] = 0;
    parent[root] = 0;
    std::queue<int> q;
    q.push(root);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int w : adj[v]) {
        if (color[w] < 0) {
          color[w] = 1 - color[v];
          parent[w] = v;
          depth[w] = depth[v] + 1;
          q.push(w);
        } else if (color[w] == color[v]) {
          // Odd cycle: climb both endpoints to their common ancestor.
          std::vector<int> up_v, up_w;
          int a = v, b = w;
          while (depth[a] > depth[b]) {
            up_v.push_back(a);
            a = parent[a];
          }
          while (depth[b] > depth[a]) {
            up_w.push_back(b);
            b = parent[b];
          }
          while (a != b) {
            up_v.push_back(a);
            up_w.push_back(b);
            a = parent[a];
            b = parent[b];
          }
          std::vector<int> cycle = std::move(up_v);
          cycle.push_back(a);
          cycle.insert(cycle.end(), up_w.rbegin(), up_w.rend());
          return TopologyClass{Topology::OddCycle, std::move(cycle)};
        }
      }
    }
  }
  return TopologyClass{Topology::Bipartite, {}};
}

/// Alternating-sign labeling over the bipartition, anchored at vertex 1.
struct ParityLabeling {
  std::vector<int> signs; // size n+1, entry 0 unused; values in {+1,-1}

  int sign(int k) const { return signs[static_cast<std::size_t>(k)]; }
};

/// Signs from breadth-first shortest-path parity off vertex 1. Throws
/// PreconditionError if the graph carries an odd cycle (no consistent
/// labeling exists); every edge is checked after the traversal.
inline ParityLabeling parity_signs(const NetworkGraph& g) {
  auto adj = g.adjacency();
  std::vector<int> dist(static_cast<std::size_t>(g.n) + 1, -1);
  std::queue<int> q;
  dist[1] = 0;
  q.push(1);
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int w : adj[v])
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        q.push(w);
      }
  }
  ParityLabeling lab;
  lab.signs.assign(static_cast<std::size_t>(g.n) + 1, 0);
  for (int v = 1; v <= g.n; ++v) {
    if (dist[v] < 0)
      throw PreconditionError("parity_signs: vertex " + std::to_string(v) +
                              " unreachable from vertex 1");
    lab.signs[v] = (dist[v] % 2 == 0) ? +1 : -1;
  }
  for (const auto& e : g.edges)
    if (lab.signs[e.k] == lab.signs[e.l])
      throw PreconditionError(
          "parity_signs: odd cycle through edge (" + std::to_string(e.k) +
          "," + std::to_string(e.l) + "), no consistent labeling");
  return lab;
}

enum class ResonanceClass { Degenerate, ResonantNonzero, OffResonant };

/// Per-vertex detunings d_k = omega_k - sum_{l adjacent k} J_{k,l} and
/// their classification at the given equality tolerance.
struct ResonanceReport {
  std::vector<double> detuning; // size n+1, entry 0 unused
  ResonanceClass cls = ResonanceClass::OffResonant;
  double tolerance = 0.0;

  double d(int k) const { return detuning[static_cast<std::size_t>(k)]; }
};

inline ResonanceReport resonance_check(const NetworkGraph& g,
                                       double tolerance = 1e-10) {
  ResonanceReport r;
  r.tolerance = tolerance;
  r.detuning.assign(static_cast<std::size_t>(g.n) + 1, 0.0);
  for (int k = 1; k <= g.n; ++k)
    r.detuning[k] = g.onsite[static_cast<std::size_t>(k - 1)];
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    r.detuning[g.edges[i].k] -= g.coupling[i];
    r.detuning[g.edges[i].l] -= g.coupling[i];
  }
  double max_abs = 0.0, max_dev = 0.0;
  for (int k = 1; k <= g.n; ++k) {
    max_abs = std::max(max_abs, std::abs(r.detuning[k]));
    max_dev = std::max(max_dev, std::abs(r.detuning[k] - r.detuning[1]));
  }
  if (max_abs <= tolerance)
    r.cls = ResonanceClass::Degenerate;
  else if (max_dev <= tolerance && std::abs(r.detuning[1]) > tolerance)
    r.cls = ResonanceClass::ResonantNonzero;
  else
    r.cls = ResonanceClass::OffResonant;
  return r;
}

enum class GraphKind { Chain, Ring, Star, Complete };

/// Onsite-energy recipe for the named factories. Degenerate sets
/// omega_k = deg(k) * J so every detuning d_k vanishes.
struct OmegaSpec {
  enum class Mode { Degenerate, Uniform };
  Mode mode = Mode::Degenerate;
  double value = 0.0;

  static OmegaSpec degenerate() { return {}; }
  static OmegaSpec uniform(double w0) { return {Mode::Uniform, w0}; }
};

inline NetworkGraph make_named_topology(GraphKind kind, int n, double J,
                                        double gamma,
                                        OmegaSpec omega = OmegaSpec::degenerate()) {
  if (n < 2) throw std::invalid_argument("make_named_topology: n must be >= 2");
  std::vector<Edge> edges;
  switch (kind) {
    case GraphKind::Chain:
      for (int k = 1; k < n; ++k) edges.emplace_back(k, k + 1);
      break;
    case GraphKind::Ring:
      if (n < 3)
        throw std::invalid_argument("make_named_topology: ring needs n >= 3");
      for (int k = 1; k < n; ++k) edges.emplace_back(k, k + 1);
      edges.emplace_back(n, 1);
      break;
    case GraphKind::Star:
      for (int k = 2; k <= n; ++k) edges.emplace_back(1, k);
      break;
    case GraphKind::Complete:
      for (int k = 1; k <= n; ++k)
        for (int l = k + 1; l <= n; ++l) edges.emplace_back(k, l);
      break;
  }
  NetworkGraph g = make_graph(n, std::move(edges), {J}, {gamma},
                              std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (int k = 1; k <= n; ++k)
    g.onsite[static_cast<std::size_t>(k - 1)] =
        omega.mode == OmegaSpec::Mode::Degenerate ? g.degree(k) * J
                                                  : omega.value;
  return g;
}

} // namespace qnet
