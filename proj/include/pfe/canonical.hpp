#ifndef PFE_CANONICAL_HPP
#define PFE_CANONICAL_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "pfe/permgrp.hpp"
#include "pfe/quadform.hpp"

namespace pfe {

struct RankDeficient : MathError {
  RankDeficient() : MathError("rays do not span the ambient space") {}
};

/// Complete weighted graph: symmetric rational weights, loops included.
struct WGraph {
  explicit WGraph(int n) : weight(n, n) {}
  int size() const { return weight.rows(); }
  QMat weight;
};

struct LabelingResult {
  Perm order;  // order[i] = vertex placed at canonical position i
  std::vector<Perm> automorphisms;
};

/// Canonical vertex ordering: relabeled weight matrices of two graphs are
/// identical iff the graphs are isomorphic. Also reports generators of the
/// graph automorphism group found during the search.
LabelingResult canonical_labeling_full(const WGraph& g);
Perm canonical_labeling(const WGraph& g);

/// Weight matrix relabeled by a vertex ordering.
QMat relabel(const WGraph& g, const Perm& order);

/// One vertex per +-pair of vecs; weight(i,j) = v_i^t Q v_j, absolute value
/// if requested. Requires the vectors to span Z^d.
WGraph pqf_graph(const PQF& q, const std::vector<IVec>& vecs, bool absolute);

struct CanonicalPQF {
  PQF form;  // primitive integral canonical representative
  uint64_t hash;
};

/// Canonical representative of the unimodular class of Q (up to scaling).
CanonicalPQF canonical_pqf(const PQF& q);

/// Form automorphisms via the spanning vector set: permutation action on the
/// +-classes of vecs, plus the exact order of Aut(Q) (sign symmetries
/// included).
struct FormAutomorphisms {
  PermGroup on_classes;
  Int full_order;
};
FormAutomorphisms form_automorphisms(const PQF& q, const std::vector<IVec>& vecs);

/// Canonical representative of a spanning ray configuration up to linear
/// equivalence: (canonical reduced ray matrix, hash).
std::pair<QMat, uint64_t> canonical_cone(const std::vector<IVec>& rays);

/// Ray ordering behind canonical_cone: order[i] = ray placed at canonical
/// position i. Equivalent configurations get matching orderings.
Perm canonical_cone_labeling(const std::vector<IVec>& rays);

/// Permutations of the rays induced by invertible linear maps preserving the
/// configuration.
PermGroup linear_automorphisms(const std::vector<IVec>& rays);

/// FNV-1a 64 over the pinned byte layout (dimension byte + length-prefixed
/// two's-complement little-endian entries, upper triangle row-major).
uint64_t hash_form(const PQF& integral_form);
uint64_t hash_qmat(const QMat& m);

}  // namespace pfe

#endif
