#pragma once

// JSON schemas for graphs, states, run configs and reports, plus the CSV
// emitters. All artifacts are deterministic: identical inputs produce
// byte-identical output.

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qnet/concurrence.hpp"
#include "qnet/dark_state.hpp"
#include "qnet/graph.hpp"
#include "qnet/liouvillian.hpp"
#include "qnet/optimizer.hpp"
#include "qnet/polariton.hpp"
#include "qnet/states.hpp"

namespace qnet {

using nlohmann::json;

namespace detail {

inline std::vector<double> broadcast(const json& j, std::size_t count,
                                     const char* field) {
  if (j.is_number()) return std::vector<double>(count, j.get<double>());
  if (j.is_array()) {
    auto v = j.get<std::vector<double>>();
    if (v.size() != count)
      throw std::invalid_argument(std::string("config: field '") + field +
                                  "' has wrong length");
    return v;
  }
  throw std::invalid_argument(std::string("config: field '") + field +
                              "' must be a number or list");
}

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

} // namespace detail

/// Accepts the explicit schema {"n", "edges", "J", "gamma", "omega"} or a
/// named one {"kind", "n", "J", "gamma"[, "omega"]}. "omega" is a list or
/// {"mode": "degenerate"}, which sets omega_k to the sum of adjacent J so
/// every detuning vanishes.
inline NetworkGraph graph_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("graph: expected an object");
  NetworkGraph g;
  if (j.contains("kind")) {
    const std::string kind = j.at("kind").get<std::string>();
    GraphKind gk;
    if (kind == "chain") gk = GraphKind::Chain;
    else if (kind == "ring") gk = GraphKind::Ring;
    else if (kind == "star") gk = GraphKind::Star;
    else if (kind == "complete") gk = GraphKind::Complete;
    else throw std::invalid_argument("graph: unknown kind '" + kind + "'");
    OmegaSpec mode = OmegaSpec::degenerate();
    if (j.contains("omega") && j.at("omega").is_object()) {
      const auto& om = j.at("omega");
      const std::string m = om.at("mode").get<std::string>();
      if (m == "degenerate") mode = OmegaSpec::degenerate();
      else if (m == "uniform") mode = OmegaSpec::uniform(om.at("value").get<double>());
      else throw std::invalid_argument("graph: unknown omega mode '" + m + "'");
    }
    g = make_named_topology(gk, j.at("n").get<int>(),
                            j.at("J").get<double>(),
                            j.at("gamma").get<double>(), mode);
    if (j.contains("omega") && j.at("omega").is_array())
      g.onsite = detail::broadcast(j.at("omega"),
                                   static_cast<std::size_t>(g.n), "omega");
    return g;
  }

  const int n = j.at("n").get<int>();
  std::vector<Edge> edges;
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2)
      throw std::invalid_argument("graph: edges must be [k, l] pairs");
    edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  auto J = detail::broadcast(j.at("J"), edges.size(), "J");
  auto gamma = detail::broadcast(j.at("gamma"), edges.size(), "gamma");
  std::vector<double> omega;
  if (j.at("omega").is_object()) {
    const std::string m = j.at("omega").at("mode").get<std::string>();
    if (m != "degenerate")
      throw std::invalid_argument("graph: unknown omega mode '" + m + "'");
    omega.assign(static_cast<std::size_t>(n), 0.0);
    for (std::size_t i = 0; i < edges.size(); ++i) {
      omega[static_cast<std::size_t>(edges[i].k - 1)] += J[i];
      omega[static_cast<std::size_t>(edges[i].l - 1)] += J[i];
    }
  } else {
    omega = detail::broadcast(j.at("omega"), static_cast<std::size_t>(n), "omega");
  }
  return make_graph(n, std::move(edges), std::move(J), std::move(gamma),
                    std::move(omega));
}

inline json graph_to_json(const NetworkGraph& g) {
  json j;
  j["n"] = g.n;
  json edges = json::array();
  for (const auto& e : g.edges) edges.push_back({e.k, e.l});
  j["edges"] = std::move(edges);
  j["J"] = g.coupling;
  j["gamma"] = g.decay;
  j["omega"] = g.onsite;
  return j;
}

inline json state_to_json(const PureState& psi) {
  json j;
  j["basis"] = {{"n", psi.basis.sites()}, {"N_max", psi.basis.max_excitations()}};
  json amps = json::array();
  for (int i = 0; i < psi.basis.dim(); ++i)
    amps.push_back({psi.amp(i).real(), psi.amp(i).imag()});
  j["amplitudes"] = std::move(amps);
  return j;
}

inline PureState state_from_json(const json& j) {
  const auto& b = j.at("basis");
  ExcitationBasis basis(b.at("n").get<int>(), b.at("N_max").get<int>());
  const auto& amps = j.at("amplitudes");
  if (!amps.is_array() || static_cast<int>(amps.size()) != basis.dim())
    throw std::invalid_argument("state: amplitude list length mismatch");
  CVector v(basis.dim());
  for (int i = 0; i < basis.dim(); ++i) {
    const auto& a = amps[static_cast<std::size_t>(i)];
    if (!a.is_array() || a.size() != 2)
      throw std::invalid_argument("state: amplitudes must be [re, im] pairs");
    v(i) = Complex(a[0].get<double>(), a[1].get<double>());
  }
  return make_pure_state(std::move(basis), std::move(v));
}

struct InitialStateSpec {
  enum class Kind { Vacuum, Aleph, Single, Optm, Custom };
  Kind kind = Kind::Vacuum;
  int site = 1;              // Single
  std::vector<int> support;  // Optm
  json custom;               // Custom
};

inline InitialStateSpec initial_state_from_json(const json& j) {
  InitialStateSpec s;
  const std::string type = j.at("type").get<std::string>();
  if (type == "vacuum") s.kind = InitialStateSpec::Kind::Vacuum;
  else if (type == "aleph") s.kind = InitialStateSpec::Kind::Aleph;
  else if (type == "single") {
    s.kind = InitialStateSpec::Kind::Single;
    s.site = j.at("k").get<int>();
  } else if (type == "optm") {
    s.kind = InitialStateSpec::Kind::Optm;
    s.support = j.at("support").get<std::vector<int>>();
  } else if (type == "custom") {
    s.kind = InitialStateSpec::Kind::Custom;
    s.custom = j.at("state");
  } else {
    throw std::invalid_argument("initial_state: unknown type '" + type + "'");
  }
  return s;
}

/// Materializes the initial state on a basis with the given excitation cap.
inline PureState build_initial_state(const InitialStateSpec& s,
                                     const NetworkGraph& g, int n_max) {
  ExcitationBasis basis(g.n, n_max);
  switch (s.kind) {
    case InitialStateSpec::Kind::Vacuum:
      return basis_state(basis, 0);
    case InitialStateSpec::Kind::Aleph:
      return aleph_state(g, basis);
    case InitialStateSpec::Kind::Single:
      if (s.site < 1 || s.site > g.n)
        throw std::invalid_argument("initial_state: site out of range");
      return basis_state(basis, 1u << (s.site - 1));
    case InitialStateSpec::Kind::Optm:
      return optimal_initial_state(g, s.support, basis);
    case InitialStateSpec::Kind::Custom: {
      PureState psi = state_from_json(s.custom);
      if (psi.basis.sites() != g.n)
        throw std::invalid_argument("initial_state: qubit count mismatch");
      return psi;
    }
  }
  throw std::invalid_argument("initial_state: unreachable");
}

/// Smallest excitation cap that contains the spec'ed state (at least 1 so
/// the dark-state overlap is representable).
inline int minimal_n_max(const InitialStateSpec& s, const NetworkGraph& g) {
  if (s.kind == InitialStateSpec::Kind::Custom)
    return std::max(1, s.custom.at("basis").at("N_max").get<int>());
  return 1;
}

inline SteadyMethod steady_method_from_string(const std::string& name) {
  if (name == "kernel_projection") return SteadyMethod::KernelProjection;
  if (name == "long_time") return SteadyMethod::LongTime;
  if (name == "null_space") return SteadyMethod::NullSpace;
  throw std::invalid_argument("config: unknown steady_method '" + name + "'");
}

struct RunConfig {
  NetworkGraph graph;
  bool has_graph = false;
  InitialStateSpec initial_state;
  double t_final = 50.0;
  double dt = 0.0; // 0 -> auto
  int stride = 1;
  SteadyMethod steady_method = SteadyMethod::KernelProjection;
  std::string trajectory_csv; // empty -> skip
  std::string report_json;    // empty -> skip
  std::string summary_csv;    // conjecture table, empty -> skip
  std::uint64_t seed = 0;
  int n_max_override = -1;
  double tolerance = 1e-5; // verify comparison tolerance
  bool trajectory_concurrence = false;
  // conjecture section
  int conjecture_n_cap = 0; // 0 -> up to n
  long conjecture_budget = 5000;
  int conjecture_restarts = 20;
  // polariton section
  std::optional<CavityChainParams> polariton;
  std::vector<double> polariton_gamma;
};

inline RunConfig parse_run_config(const json& j) {
  RunConfig c;
  if (j.contains("graph")) {
    c.graph = graph_from_json(j.at("graph"));
    c.has_graph = true;
  }
  if (j.contains("initial_state"))
    c.initial_state = initial_state_from_json(j.at("initial_state"));
  if (j.contains("evolution")) {
    const auto& e = j.at("evolution");
    if (e.contains("t_final")) c.t_final = e.at("t_final").get<double>();
    if (e.contains("dt")) c.dt = e.at("dt").get<double>();
    if (e.contains("stride")) c.stride = e.at("stride").get<int>();
  }
  if (j.contains("steady_method"))
    c.steady_method = steady_method_from_string(j.at("steady_method").get<std::string>());
  if (j.contains("outputs")) {
    const auto& o = j.at("outputs");
    if (o.contains("trajectory_csv")) c.trajectory_csv = o.at("trajectory_csv").get<std::string>();
    if (o.contains("report_json")) c.report_json = o.at("report_json").get<std::string>();
    if (o.contains("summary_csv")) c.summary_csv = o.at("summary_csv").get<std::string>();
  }
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("N_max")) c.n_max_override = j.at("N_max").get<int>();
  if (j.contains("tolerance")) c.tolerance = j.at("tolerance").get<double>();
  if (j.contains("trajectory_concurrence"))
    c.trajectory_concurrence = j.at("trajectory_concurrence").get<bool>();
  if (j.contains("conjecture")) {
    const auto& cj = j.at("conjecture");
    if (cj.contains("N_max")) c.conjecture_n_cap = cj.at("N_max").get<int>();
    if (cj.contains("budget")) c.conjecture_budget = cj.at("budget").get<long>();
    if (cj.contains("restarts")) c.conjecture_restarts = cj.at("restarts").get<int>();
  }
  if (j.contains("polariton")) {
    const auto& pj = j.at("polariton");
    CavityChainParams p;
    p.n = pj.at("n").get<int>();
    const auto sites = static_cast<std::size_t>(p.n);
    const auto links = sites - 1;
    p.omega_c = detail::broadcast(pj.at("omega_c"), sites, "omega_c");
    p.omega_a = pj.contains("omega_a")
                    ? detail::broadcast(pj.at("omega_a"), sites, "omega_a")
                    : p.omega_c;
    p.f = detail::broadcast(pj.at("f"), sites, "f");
    p.J_fiber = detail::broadcast(pj.at("J_fiber"), links, "J_fiber");
    p.omega_f = detail::broadcast(pj.at("omega_f"), links, "omega_f");
    if (pj.contains("omega_e"))
      p.omega_e = detail::broadcast(pj.at("omega_e"), links, "omega_e");
    if (pj.contains("kappa_a")) p.kappa_a = pj.at("kappa_a").get<double>();
    if (pj.contains("kappa_c")) p.kappa_c = pj.at("kappa_c").get<double>();
    if (pj.contains("strong_coupling_ratio"))
      p.strong_coupling_ratio = pj.at("strong_coupling_ratio").get<double>();
    c.polariton = std::move(p);
    c.polariton_gamma = pj.contains("gamma")
                            ? detail::broadcast(pj.at("gamma"), links, "gamma")
                            : std::vector<double>(links, 1.0);
  }
  return c;
}

inline const char* topology_name(Topology t) {
  return t == Topology::Bipartite ? "bipartite" : "odd_cycle";
}

inline const char* resonance_name(ResonanceClass c) {
  switch (c) {
    case ResonanceClass::Degenerate: return "degenerate";
    case ResonanceClass::ResonantNonzero: return "resonant_nonzero";
    default: return "off_resonant";
  }
}

inline json pair_prediction_json(double p, const NetworkGraph& g,
                                 const std::vector<PairPrediction>& pairs) {
  json j;
  j["p"] = p;
  j["n"] = g.n;
  json arr = json::array();
  for (const auto& pp : pairs)
    arr.push_back({{"k", pp.k},
                   {"j", pp.j},
                   {"sign", pp.sign},
                   {"concurrence", pp.concurrence}});
  j["pairs"] = std::move(arr);
  return j;
}

inline json conjecture_report_json(const ConjectureReport& r) {
  return json{{"n", r.n},
              {"N", r.N},
              {"m", r.m},
              {"support", r.support},
              {"best_value", r.best_value},
              {"formula_value", r.formula_value},
              {"holds", r.conjecture_holds},
              {"restarts", r.restarts},
              {"evaluations", r.evaluations},
              {"converged", r.converged},
              {"best_state", state_to_json(r.best_state)}};
}

inline json effective_params_json(const EffectiveChainParams& p) {
  return json{{"omega_prime", p.omega_prime},
              {"J_prime", p.J_prime},
              {"omega_e_prime", p.omega_e_prime},
              {"eta_scale", p.eta_scale},
              {"omega_convention", p.omega_convention},
              {"warnings", p.warnings}};
}

/// Trajectory CSV: t, trace, excitation_number, p_overlap (bipartite
/// graphs only), purity, then optional per-pair concurrence columns.
class TrajectoryCsv {
 public:
  TrajectoryCsv(const NetworkGraph& g, bool with_overlap, bool with_pairs)
      : n_(g.n), with_overlap_(with_overlap), with_pairs_(with_pairs) {
    out_ += "t,trace,excitation_number";
    if (with_overlap_) out_ += ",p_overlap";
    out_ += ",purity";
    if (with_pairs_)
      for (int k = 1; k <= n_; ++k)
        for (int j = k + 1; j <= n_; ++j)
          out_ += ",c_" + std::to_string(k) + "_" + std::to_string(j);
    out_ += "\n";
  }

  void row(double t, const DensityMatrix& rho,
           const PureState* aleph = nullptr) {
    out_ += detail::fmt(t);
    out_ += "," + detail::fmt(rho.mat.trace().real());
    out_ += "," + detail::fmt(excitation_number(rho));
    if (with_overlap_)
      out_ += "," + detail::fmt(aleph ? overlap(rho, *aleph) : 0.0);
    out_ += "," + detail::fmt(rho.purity());
    if (with_pairs_)
      for (int k = 1; k <= n_; ++k)
        for (int j = k + 1; j <= n_; ++j)
          out_ += "," + detail::fmt(wootters_concurrence(
                            partial_trace_pair(rho, k, j), 1e-6));
    out_ += "\n";
  }

  const std::string& str() const { return out_; }

 private:
  int n_;
  bool with_overlap_;
  bool with_pairs_;
  std::string out_;
};

inline std::string concurrence_map_csv(const ConcurrenceMap& map) {
  std::string out = "k,j,concurrence\n";
  for (const auto& e : map.entries)
    out += std::to_string(e.k) + "," + std::to_string(e.j) + "," +
           detail::fmt(e.concurrence) + "\n";
  return out;
}

inline std::string conjecture_summary_csv(const std::vector<ConjectureReport>& rs) {
  std::string out = "n,N,m,best_value,formula_value,holds\n";
  for (const auto& r : rs)
    out += std::to_string(r.n) + "," + std::to_string(r.N) + "," +
           std::to_string(r.m) + "," + detail::fmt(r.best_value) + "," +
           detail::fmt(r.formula_value) + "," + (r.conjecture_holds ? "1" : "0") +
           "\n";
  return out;
}

} // namespace qnet
