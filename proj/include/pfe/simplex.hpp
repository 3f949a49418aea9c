#ifndef PFE_SIMPLEX_HPP
#define PFE_SIMPLEX_HPP

#include "pfe/linalg.hpp"

namespace pfe {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status;
  Rat objective;
  QVec x;
};

/// maximize c^T x subject to A x = b, x >= 0, with exact rationals
/// (two-phase primal simplex, Bland's rule).
LpSolution lp_solve_standard(const QMat& a, const QVec& b, const QVec& c);

}  // namespace pfe

#endif
