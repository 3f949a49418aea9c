#ifndef PFE_QUADFORM_HPP
#define PFE_QUADFORM_HPP

#include <utility>
#include <vector>

#include "pfe/linalg.hpp"

namespace pfe {

struct SpanDeficient : MathError {
  SpanDeficient() : MathError("minimal vectors do not span after enlargement") {}
};

/// Positive definite quadratic form given by its Gram matrix.
class PQF {
public:
  PQF() = default;
  explicit PQF(QMat gram);  // checks symmetry; positive definiteness is
                            // checked lazily by the operations that need it

  int dim() const { return gram_.rows(); }
  const QMat& gram() const { return gram_; }
  Rat& at(int i, int j) { return gram_(i, j); }
  const Rat& at(int i, int j) const { return gram_(i, j); }

  /// Q[x] = x^t Q x
  Rat value(const IVec& x) const;
  /// <x,y>_Q = x^t Q y
  Rat pairing(const IVec& x, const IVec& y) const;

  bool positive_definite() const;
  bool operator==(const PQF& o) const { return gram_ == o.gram_; }

private:
  QMat gram_;
};

/// Minimal vectors of a PQF, one per +- pair, first nonzero coordinate
/// positive, sorted lexicographically.
struct MinData {
  Rat lambda1;
  std::vector<IVec> vectors;
};

/// Exact LLL reduction (delta = 99/100) of the form; returns the reduced form
/// U^t Q U together with the unimodular U.
std::pair<PQF, IMat> lll_reduce(const PQF& q);

/// Complete set Min(Q)/+- with exact lambda_1 (LLL + Fincke-Pohst).
MinData minimal_vectors(const PQF& q);

/// All x != 0 up to sign with Q[x] <= bound, with their values.
std::vector<std::pair<IVec, Rat>> enumerate_below(const PQF& q, const Rat& bound);

/// gamma(Q)^d = lambda_1^d / det(Q); callers compare gamma via this power.
Rat hermite_invariant(const PQF& q);

/// Vertex criterion: the dyads xx^t of Min(Q) span the space of symmetric
/// matrices.
bool is_perfect(const PQF& q);

/// lambda_1 of the minimal integral rescaling of Q.
Rat scale(const PQF& q);

/// True iff Min(Q) spans Z^d over the integers.
bool min_vectors_span(const PQF& q);

/// True iff some pair of minimal vectors spans an A2 section with the same
/// minimum: Q[x] = Q[y] = 2*|<x,y>_Q|.
bool has_a2_section(const PQF& q);

/// Exact inverse form.
PQF dual_form(const PQF& q);

/// Smallest spanning vector set ordered by value: Min(Q) if it spans Z^d,
/// otherwise enlarged through successive attained values. Throws SpanDeficient
/// if no spanning set is found within a generous bound.
std::vector<IVec> spanning_vectors(const PQF& q, Rat* lambda1 = nullptr);

/// Apply a basis change: returns U^t Q U.
PQF conjugate(const PQF& q, const IMat& u);

IVec mul(const IMat& u, const IVec& x);  // matrix-vector product

}  // namespace pfe

#endif
