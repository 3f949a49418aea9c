#include "pfe/simplex.hpp"

#include <vector>

namespace pfe {

namespace {

// Dense tableau with an explicit basis; basis columns are kept reduced to the
// identity by the pivoting.
struct Tableau {
  int m, n;
  QMat a;          // m x n
  QVec b;          // m
  QVec cost;       // n, reduced costs of the current objective
  Rat shift;       // objective value of the current basic solution
  std::vector<int> basis;  // size m, column index of each basic variable

  void pivot(int row, int col) {
    Rat p = a(row, col);
    for (int j = 0; j < n; ++j) a(row, j) /= p;
    b[row] /= p;
    for (int i = 0; i < m; ++i) {
      if (i == row || a(i, col) == 0) continue;
      Rat f = a(i, col);
      for (int j = 0; j < n; ++j) a(i, j) -= f * a(row, j);
      b[i] -= f * b[row];
    }
    if (cost[col] != 0) {
      Rat f = cost[col];
      for (int j = 0; j < n; ++j) cost[j] -= f * a(row, j);
      shift += f * b[row];
    }
    basis[row] = col;
  }

  // Bland's rule: smallest improving column, smallest-index tie break on the
  // leaving row. Returns Optimal or Unbounded.
  LpStatus iterate() {
    while (true) {
      int col = -1;
      for (int j = 0; j < n; ++j)
        if (cost[j] > 0) {
          col = j;
          break;
        }
      if (col < 0) return LpStatus::Optimal;
      int row = -1;
      for (int i = 0; i < m; ++i) {
        if (a(i, col) <= 0) continue;
        if (row < 0) {
          row = i;
          continue;
        }
        Rat cur = b[i] / a(i, col), best = b[row] / a(row, col);
        if (cur < best || (cur == best && basis[i] < basis[row])) row = i;
      }
      if (row < 0) return LpStatus::Unbounded;
      pivot(row, col);
    }
  }
};

}  // namespace

LpSolution lp_solve_standard(const QMat& a0, const QVec& b0, const QVec& c) {
  const int m = a0.rows();
  const int n = a0.cols();
  // phase 1: artificial variables, identity start basis
  Tableau t;
  t.m = m;
  t.n = n + m;
  t.a = QMat(m, n + m);
  t.b = b0;
  t.basis.resize(m);
  for (int i = 0; i < m; ++i) {
    int sign = (b0[i] < 0) ? -1 : 1;
    for (int j = 0; j < n; ++j) t.a(i, j) = Rat(sign) * a0(i, j);
    t.b[i] = Rat(sign) * b0[i];
    t.a(i, n + i) = 1;
    t.basis[i] = n + i;
  }
  // maximize -(sum of artificials)
  t.cost = QVec(n + m, Rat(0));
  t.shift = 0;
  for (int i = 0; i < m; ++i) {
    // cost row reduced against the start basis: -sum of rows
    for (int j = 0; j < n; ++j) t.cost[j] += t.a(i, j);
    t.shift -= t.b[i];
  }
  // reduced cost of artificial j is 0 after subtracting its own row
  t.iterate();
  if (t.shift != 0) return {LpStatus::Infeasible, Rat(0), {}};
  // drive remaining artificials out of the basis
  for (int i = 0; i < m; ++i) {
    if (t.basis[i] < n) continue;
    int col = -1;
    for (int j = 0; j < n; ++j)
      if (t.a(i, j) != 0) {
        col = j;
        break;
      }
    if (col >= 0) t.pivot(i, col);
    // else: redundant row, harmless to keep with the artificial at zero
  }
  // phase 2: real objective, artificial columns frozen
  for (int j = 0; j < n; ++j) t.cost[j] = c[j];
  for (int j = n; j < n + m; ++j) {
    t.cost[j] = 0;
    for (int i = 0; i < m; ++i) t.a(i, j) = 0;  // forbid re-entering
  }
  t.shift = 0;
  for (int i = 0; i < m; ++i) {
    if (t.basis[i] >= n) continue;
    Rat f = t.cost[t.basis[i]];
    if (f == 0) continue;
    for (int j = 0; j < t.n; ++j) t.cost[j] -= f * t.a(i, j);
    t.shift += f * t.b[i];
  }
  LpStatus s = t.iterate();
  if (s == LpStatus::Unbounded) return {LpStatus::Unbounded, Rat(0), {}};
  QVec x(n, Rat(0));
  for (int i = 0; i < m; ++i)
    if (t.basis[i] < n) x[t.basis[i]] = t.b[i];
  return {LpStatus::Optimal, t.shift, std::move(x)};
}

}  // namespace pfe
