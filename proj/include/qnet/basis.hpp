#pragma once

// Excitation-number-truncated bases for n qubits and the ladder operators
// restricted to them. A basis holds every occupation pattern of Hamming
// weight <= N_max in a fixed canonical order: ascending weight, then
// ascending lexicographic order of the occupied-site list, so 100 comes
// before 010 before 001. Bit k-1 of a pattern is the occupation of site k.

#include <Eigen/Dense>

#include <bit>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace qnet {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

class ExcitationBasis {
 public:
  ExcitationBasis() = default;

  ExcitationBasis(int n, int n_max) : n_(n), n_max_(n_max) {
    if (n < 1 || n > 24)
      throw std::invalid_argument("ExcitationBasis: n out of supported range");
    if (n_max < 0 || n_max > n)
      throw std::invalid_argument("ExcitationBasis: N_max must be in [0, n]");
    for (int w = 0; w <= n_max; ++w)
      emit_weight_class(w);
    // Secondary index sorted by raw pattern value for O(log dim) lookup.
    lookup_.resize(patterns_.size());
    for (std::size_t i = 0; i < patterns_.size(); ++i)
      lookup_[i] = {patterns_[i], static_cast<int>(i)};
    std::sort(lookup_.begin(), lookup_.end());
  }

  int sites() const { return n_; }
  int max_excitations() const { return n_max_; }
  int dim() const { return static_cast<int>(patterns_.size()); }
  std::uint32_t pattern(int i) const {
    return patterns_[static_cast<std::size_t>(i)];
  }

  /// Position of a pattern in the canonical order, -1 if outside the basis.
  int find(std::uint32_t p) const {
    auto it = std::lower_bound(lookup_.begin(), lookup_.end(),
                               std::make_pair(p, 0));
    if (it == lookup_.end() || it->first != p) return -1;
    return it->second;
  }

  int index_of(std::uint32_t p) const {
    int i = find(p);
    if (i < 0) throw std::invalid_argument("ExcitationBasis: pattern not in basis");
    return i;
  }

  static int weight(std::uint32_t p) { return std::popcount(p); }

  /// Occupation of 1-indexed `site` in pattern `p`.
  static bool occupied(std::uint32_t p, int site) {
    return (p >> (site - 1)) & 1u;
  }

  /// Same span: equal qubit count and excitation cap.
  bool compatible(const ExcitationBasis& other) const {
    return n_ == other.n_ && n_max_ == other.n_max_;
  }

 private:
  void emit_weight_class(int w) {
    // Combinations of w occupied sites in lexicographic order.
    if (w == 0) {
      patterns_.push_back(0);
      return;
    }
    std::vector<int> comb(static_cast<std::size_t>(w));
    for (int i = 0; i < w; ++i) comb[static_cast<std::size_t>(i)] = i + 1;
    while (true) {
      std::uint32_t p = 0;
      for (int site : comb) p |= 1u << (site - 1);
      patterns_.push_back(p);
      int i = w - 1;
      while (i >= 0 && comb[static_cast<std::size_t>(i)] == n_ - w + i + 1) --i;
      if (i < 0) break;
      ++comb[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < w; ++j)
        comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
    }
  }

  int n_ = 0;
  int n_max_ = 0;
  std::vector<std::uint32_t> patterns_;
  std::vector<std::pair<std::uint32_t, int>> lookup_;
};

inline ExcitationBasis build_basis(int n, int n_max) {
  return ExcitationBasis(n, n_max);
}

/// sigma_k restricted to the sector basis. Lowering never leaves the
/// truncation, so every nonzero matrix element of the full-space operator
/// is present.
inline Operator lowering_operator(const ExcitationBasis& basis, int site) {
  if (site < 1 || site > basis.sites())
    throw std::invalid_argument("lowering_operator: site out of range");
  Operator m = Operator::Zero(basis.dim(), basis.dim());
  const std::uint32_t bit = 1u << (site - 1);
  for (int i = 0; i < basis.dim(); ++i) {
    std::uint32_t p = basis.pattern(i);
    if (p & bit) m(basis.index_of(p & ~bit), i) = 1.0;
  }
  return m;
}

/// Total excitation number, diagonal in the occupation basis.
inline Operator number_operator(const ExcitationBasis& basis) {
  Operator m = Operator::Zero(basis.dim(), basis.dim());
  for (int i = 0; i < basis.dim(); ++i)
    m(i, i) = static_cast<double>(ExcitationBasis::weight(basis.pattern(i)));
  return m;
}

/// Pair jump operator L_{k,l} = sigma_k + sigma_l.
inline Operator jump_operator(const ExcitationBasis& basis, int k, int l) {
  if (k == l) throw std::invalid_argument("jump_operator: k and l must differ");
  return lowering_operator(basis, k) + lowering_operator(basis, l);
}

} // namespace qnet
