#ifndef PFE_VORONOI_HPP
#define PFE_VORONOI_HPP

#include <string>
#include <vector>

#include "pfe/formdb.hpp"
#include "pfe/polycone.hpp"

namespace pfe {

struct NotPerfect : MathError {
  NotPerfect() : MathError("form is not perfect") {}
};
struct NoNeighbour : MathError {
  NoNeighbour() : MathError("no neighbouring perfect form along this direction") {}
};

/// Gram matrix of the root lattice A_d: 2 on the diagonal, -1 next to it.
PQF root_form(int d);

/// Upper-triangle coordinates (i <= j, row-major) of a symmetric d x d
/// direction; the inverse of sym_unflatten.
IVec sym_flatten(const QMat& s);
QMat sym_unflatten(const IVec& u, int d);

/// Dyad constraint vector of x: pairing(dyad_normal(x), sym_flatten(S)) equals
/// <S, xx^t> for every symmetric S (off-diagonal entries doubled).
IVec dyad_normal(const IVec& x);

/// Extreme rays of the tangent cone {S : <S, xx^t> >= 0 for x in Min(Q)},
/// in sym_flatten coordinates. Throws NotPerfect.
Cone tangent_cone(const PQF& q);

/// The adjacent perfect form along an extreme ray direction: smallest
/// alpha > 0 with lambda_1(Q + alpha*R) = lambda_1(Q) attained outside Min(Q).
PQF neighbour_form(const PQF& q, const IVec& ray);

struct Neighbour {
  IVec ray;        // extreme ray representative, sym_flatten coordinates
  Int orbit_size;  // ray orbit size under Aut(Q)/± (1 without symmetry)
  PQF form;
};

/// One neighbour per extreme-ray orbit of the tangent cone under Aut(Q)/±
/// when use_symmetry, else one per extreme ray.
std::vector<Neighbour> neighbours(const PQF& q, bool use_symmetry,
                                  const AdmOptions& opts = {});

/// |Aut(Q)| including -I, via the canonical-graph automorphisms of a spanning
/// vector set.
Int aut_order(const PQF& q);

struct EnumerateOptions {
  int workers = 1;
  AdmOptions adm;
  std::string checkpoint_path;     // empty: no checkpointing
  double checkpoint_secs = 60.0;
  bool resume = false;             // load checkpoint_path and continue
  int high_incidence_threshold = 116;  // forms above go through the same path
};

/// Complete enumeration of perfect-form similarity classes in dimension d by
/// graph traversal from the root form. Deterministic for any worker count.
FormDB enumerate_perfect_forms(int d, const EnumerateOptions& opts = {});

}  // namespace pfe

#endif
