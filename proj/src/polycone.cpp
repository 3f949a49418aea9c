#include "pfe/polycone.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "pfe/simplex.hpp"

namespace pfe {

namespace {

Rat dot(const IVec& a, const IVec& b) {
  Int s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return Rat(s);
}

Rat dotq(const IVec& a, const QVec& b) {
  Rat s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += Rat(a[i]) * b[i];
  return s;
}

IMat rows_of(const std::vector<IVec>& v, int n) {
  IMat m(int(v.size()), n);
  for (size_t i = 0; i < v.size(); ++i)
    for (int j = 0; j < n; ++j) m(int(i), j) = v[i][j];
  return m;
}

// Rational nullspace basis (columns x with m x = 0).
std::vector<QVec> nullspace(const QMat& m) {
  int r = m.rows(), c = m.cols();
  QMat a = m;
  std::vector<int> pivot_col;
  int row = 0;
  for (int col = 0; col < c && row < r; ++col) {
    int piv = -1;
    for (int i = row; i < r; ++i)
      if (a(i, col) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    if (piv != row)
      for (int j = 0; j < c; ++j) swap(a(piv, j), a(row, j));
    Rat p = a(row, col);
    for (int j = 0; j < c; ++j) a(row, j) /= p;
    for (int i = 0; i < r; ++i) {
      if (i == row || a(i, col) == 0) continue;
      Rat f = a(i, col);
      for (int j = 0; j < c; ++j) a(i, j) -= f * a(row, j);
    }
    pivot_col.push_back(col);
    ++row;
  }
  std::vector<char> is_pivot(c, 0);
  for (int p : pivot_col) is_pivot[p] = 1;
  std::vector<QVec> basis;
  for (int free = 0; free < c; ++free) {
    if (is_pivot[free]) continue;
    QVec x(c, Rat(0));
    x[free] = 1;
    for (size_t k = 0; k < pivot_col.size(); ++k) x[pivot_col[k]] = -a(int(k), free);
    basis.push_back(std::move(x));
  }
  return basis;
}

IVec primitive_of(const QVec& v) {
  Int den = 1;
  for (const Rat& x : v) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x.get_den().get_mpz_t());
  IVec out(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    Rat s = v[i] * den;
    out[i] = s.get_num();
  }
  make_primitive(out);
  return out;
}

}  // namespace

std::vector<IVec> dual_description(int n, const std::vector<IVec>& rays0) {
  // primitive, deduplicated, lexicographically sorted constraints
  std::vector<IVec> cons;
  for (const IVec& r : rays0) {
    IVec p = r;
    make_primitive(p);
    cons.push_back(std::move(p));
  }
  std::sort(cons.begin(), cons.end());
  cons.erase(std::unique(cons.begin(), cons.end()), cons.end());
  const int m = int(cons.size());
  if (rank(rows_of(cons, n).to_rational()) != n) throw NotFullDim();

  // greedy independent start basis in sorted order
  std::vector<int> start;
  for (int i = 0; i < m && int(start.size()) < n; ++i) {
    std::vector<int> cand = start;
    cand.push_back(i);
    std::vector<IVec> sub;
    for (int k : cand) sub.push_back(cons[k]);
    if (rank(rows_of(sub, n).to_rational()) == int(cand.size())) start = cand;
  }
  std::vector<IVec> base;
  for (int k : start) base.push_back(cons[k]);
  QMat binv = inverse(rows_of(base, n).to_rational());

  struct DRay {
    IVec v;
    FaceSet inc;  // over constraint indices
  };
  std::vector<DRay> cur;
  std::vector<char> processed(m, 0);
  for (int k : start) processed[k] = 1;
  for (int j = 0; j < n; ++j) {
    QVec col(n);
    for (int i = 0; i < n; ++i) col[i] = binv(i, j);
    DRay r{primitive_of(col), FaceSet(m)};
    for (int k : start)
      if (dot(cons[k], r.v) == 0) r.inc.set(k);
    cur.push_back(std::move(r));
  }

  auto adjacent = [&](const DRay& a, const DRay& b) {
    std::vector<IVec> tight;
    for (int k = 0; k < m; ++k)
      if (processed[k] && a.inc.test(k) && b.inc.test(k)) tight.push_back(cons[k]);
    if (int(tight.size()) < n - 2) return false;
    return rank(rows_of(tight, n).to_rational()) == n - 2;
  };

  for (int k = 0; k < m; ++k) {
    if (processed[k]) continue;
    const IVec& a = cons[k];
    std::vector<int> pos, neg;
    std::vector<Rat> val(cur.size());
    for (size_t i = 0; i < cur.size(); ++i) {
      val[i] = dot(a, cur[i].v);
      if (val[i] > 0) pos.push_back(int(i));
      else if (val[i] < 0) neg.push_back(int(i));
    }
    processed[k] = 1;
    if (neg.empty()) {
      for (size_t i = 0; i < cur.size(); ++i)
        if (val[i] == 0) cur[i].inc.set(k);
      continue;
    }
    std::vector<DRay> next;
    for (size_t i = 0; i < cur.size(); ++i) {
      if (val[i] < 0) continue;
      if (val[i] == 0) cur[i].inc.set(k);
      next.push_back(cur[i]);
    }
    for (int p : pos)
      for (int q : neg) {
        if (!adjacent(cur[p], cur[q])) continue;
        QVec w(n);
        for (int j = 0; j < n; ++j)
          w[j] = val[p] * Rat(cur[q].v[j]) - val[q] * Rat(cur[p].v[j]);
        DRay nr{primitive_of(w), FaceSet(m)};
        for (int t = 0; t < m; ++t)
          if (processed[t] && dot(cons[t], nr.v) == 0) nr.inc.set(t);
        next.push_back(std::move(nr));
      }
    cur = std::move(next);
  }

  std::vector<IVec> out;
  for (DRay& r : cur) out.push_back(std::move(r.v));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (rank(rows_of(out, n).to_rational()) != n) throw NotPointed();
  return out;
}

FaceSet facet_incidence(const Cone& c, const IVec& normal) {
  const int m = int(c.rays.size());
  FaceSet inc(m);
  std::vector<IVec> tight;
  for (int i = 0; i < m; ++i) {
    Rat d = dot(normal, c.rays[i]);
    if (d < 0) throw NotSupporting();
    if (d == 0) {
      inc.set(i);
      tight.push_back(c.rays[i]);
    }
  }
  if (tight.empty() || rank(rows_of(tight, c.dim).to_rational()) != c.dim - 1)
    throw NotSupporting();
  return inc;
}

IVec flip(const Cone& c, const FaceSet& f, const IVec& fnormal, const IVec& rnormal) {
  const int m = int(c.rays.size());
  bool found = false;
  Rat beta;
  for (int i = 0; i < m; ++i) {
    if (f.test(i)) continue;
    Rat df = dot(fnormal, c.rays[i]);
    Rat dr = dot(rnormal, c.rays[i]);
    Rat cand = -dr / df;
    if (!found || cand > beta) {
      beta = cand;
      found = true;
    }
  }
  if (!found) throw NoAdjacent();
  QVec fp(c.dim);
  for (int j = 0; j < c.dim; ++j) fp[j] = Rat(rnormal[j]) + beta * Rat(fnormal[j]);
  IVec out = primitive_of(fp);
  for (const IVec& v : c.rays)
    if (dot(out, v) < 0) throw NoAdjacent();
  return out;
}

namespace {

// greedy independent subset of the given rays (indices)
std::vector<int> independent_subset(const std::vector<IVec>& rays, int n,
                                    const std::vector<int>& among) {
  std::vector<int> idx;
  std::vector<QVec> basis;  // pivot-reduced accepted rows
  std::vector<int> pivcol;
  for (int j : among) {
    QVec v(n);
    for (int k = 0; k < n; ++k) v[k] = Rat(rays[j][k]);
    for (size_t b = 0; b < basis.size(); ++b) {
      if (v[pivcol[b]] == 0) continue;
      Rat f = v[pivcol[b]] / basis[b][pivcol[b]];
      for (int k = 0; k < n; ++k) v[k] -= f * basis[b][k];
    }
    int pc = -1;
    for (int k = 0; k < n; ++k)
      if (v[k] != 0) {
        pc = k;
        break;
      }
    if (pc < 0) continue;
    idx.push_back(j);
    basis.push_back(std::move(v));
    pivcol.push_back(pc);
    if (int(idx.size()) == n) break;
  }
  return idx;
}

}  // namespace

IVec ridge_normal_from_incidence(const Cone& c, const FaceSet& facet,
                                 const FaceSet& ridge) {
  return ridge_normal_from_incidence(
      c, facet, ridge, independent_subset(c.rays, c.dim, facet.elements()));
}

IVec ridge_normal_from_incidence(const Cone& c, const FaceSet& facet,
                                 const FaceSet& ridge,
                                 const std::vector<int>& bidx) {
  const int n = c.dim;
  std::vector<int> fidx = facet.elements();
  std::vector<int> ridx = ridge.elements();
  const int rho = int(bidx.size());
  // y = B^t z with R B^t z = 0
  IMat mat(int(ridx.size()), rho);
  for (size_t i = 0; i < ridx.size(); ++i)
    for (int j = 0; j < rho; ++j) {
      Int s = 0;
      for (int k = 0; k < n; ++k) s += c.rays[ridx[i]][k] * c.rays[bidx[j]][k];
      mat(int(i), j) = s;
    }
  IVec z;
  auto modp = kernel_vector_mod_p(mat);
  if (!modp.empty()) {
    QVec lifted(rho);
    bool ok = true;
    try {
      for (int j = 0; j < rho; ++j) lifted[j] = rational_lift(modp[j]);
    } catch (const LiftFailed&) {
      ok = false;
    }
    if (ok) {
      IVec cand = primitive_of(lifted);
      // verify the lifted kernel vector exactly
      bool zero = true;
      for (int i = 0; i < mat.rows() && zero; ++i) {
        Int s = 0;
        for (int j = 0; j < rho; ++j) s += mat(i, j) * cand[j];
        if (s != 0) zero = false;
      }
      if (zero) z = std::move(cand);
    }
  }
  if (z.empty()) {
    try {
      z = kernel_vector(mat);
    } catch (const WrongCorank&) {
      throw BadIncidence();
    }
  }
  IVec y(n, Int(0));
  for (int j = 0; j < rho; ++j)
    for (int k = 0; k < n; ++k) y[k] += z[j] * c.rays[bidx[j]][k];
  make_primitive(y);
  // orient nonnegative on the facet's rays
  int sign = 0;
  for (int i : fidx) {
    Rat d = dot(y, c.rays[i]);
    if (d == 0) continue;
    int s = d > 0 ? 1 : -1;
    if (sign == 0) sign = s;
    else if (sign != s) throw BadIncidence();
  }
  if (sign == 0) throw BadIncidence();
  if (sign < 0)
    for (Int& v : y) v = -v;
  return y;
}

namespace {

// facet normal from a rank-(n-1) incidence, nonnegative on all rays
IVec normal_from_incidence(const Cone& c, const FaceSet& inc) {
  std::vector<int> idx = inc.elements();
  std::vector<int> bidx = independent_subset(c.rays, c.dim, idx);
  IMat mat(int(bidx.size()), c.dim);
  for (size_t i = 0; i < bidx.size(); ++i)
    for (int j = 0; j < c.dim; ++j) mat(int(i), j) = c.rays[bidx[i]][j];
  IVec y = kernel_vector(mat);
  int sign = 0;
  for (const IVec& v : c.rays) {
    Rat d = dot(y, v);
    if (d == 0) continue;
    int s = d > 0 ? 1 : -1;
    if (sign == 0) sign = s;
    else if (sign != s) throw BadIncidence();
  }
  if (sign < 0)
    for (Int& v : y) v = -v;
  return y;
}

IVec initial_facet(const Cone& c) {
  const int n = c.dim;
  const int m = int(c.rays.size());
  // interior dual point: <v_i, y> >= 1 via LP on y = p - q with slacks
  QMat a(m, 2 * n + m);
  QVec b(m, Rat(1)), obj(2 * n + m, Rat(0));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      a(i, j) = Rat(c.rays[i][j]);
      a(i, n + j) = -Rat(c.rays[i][j]);
    }
    a(i, 2 * n + i) = -1;
  }
  LpSolution sol = lp_solve_standard(a, b, obj);
  if (sol.status != LpStatus::Optimal) throw NotPointed();
  QVec y(n);
  for (int j = 0; j < n; ++j) y[j] = sol.x[j] - sol.x[n + j];
  // tighten until the tight rays have rank n-1
  while (true) {
    std::vector<int> tight;
    for (int i = 0; i < m; ++i)
      if (dotq(c.rays[i], y) == 0) tight.push_back(i);
    std::vector<IVec> tv;
    for (int i : tight) tv.push_back(c.rays[i]);
    int rho = tv.empty() ? 0 : rank(rows_of(tv, n).to_rational());
    if (rho == n - 1) break;
    QMat tm(int(tv.size()), n);
    for (size_t i = 0; i < tv.size(); ++i)
      for (int j = 0; j < n; ++j) tm(int(i), j) = Rat(tv[i][j]);
    std::vector<QVec> dirs = nullspace(tm);
    // any direction independent of y works: it cannot shoot into the apex and
    // it always meets some constraint (else the rays would not span)
    QVec u;
    for (QVec& d : dirs) {
      QMat pair(2, n);
      for (int j = 0; j < n; ++j) {
        pair(0, j) = y[j];
        pair(1, j) = d[j];
      }
      if (rank(pair) == 2) {
        u = std::move(d);
        break;
      }
    }
    if (u.empty()) throw NotFullDim();
    bool has_pos = false;
    for (int i = 0; i < m; ++i)
      if (dotq(c.rays[i], u) > 0) {
        has_pos = true;
        break;
      }
    if (!has_pos)
      for (Rat& x : u) x = -x;
    bool first = true;
    Rat step;
    for (int i = 0; i < m; ++i) {
      Rat du = dotq(c.rays[i], u);
      if (du <= 0) continue;
      Rat cand = dotq(c.rays[i], y) / du;
      if (first || cand < step) {
        step = cand;
        first = false;
      }
    }
    for (int j = 0; j < n; ++j) y[j] -= step * u[j];
  }
  IVec f = primitive_of(y);
  return f;
}

// permutation restricted to the selected points
Perm restrict_perm(const Perm& p, const std::vector<int>& sel,
                   const std::vector<int>& pos_of) {
  Perm out(sel.size());
  for (size_t i = 0; i < sel.size(); ++i) out[i] = pos_of[p[sel[i]]];
  return out;
}

struct SubCone {
  Cone cone;              // projected to its span, integer coordinates
  std::vector<int> sel;   // cone ray index per sub ray
};

SubCone project_facet(const Cone& c, const FaceSet& f) {
  SubCone s;
  s.sel = f.elements();
  const int n = c.dim;
  // lattice basis of the span: HNF of the ray columns
  IMat cols(n, int(s.sel.size()));
  for (size_t j = 0; j < s.sel.size(); ++j)
    for (int i = 0; i < n; ++i) cols(i, int(j)) = c.rays[s.sel[j]][i];
  IMat h = hnf(cols);
  const int rho = h.cols();
  // independent rows of H make the coordinate system square
  std::vector<int> rsel;
  for (int i = 0; i < n && int(rsel.size()) < rho; ++i) {
    std::vector<int> cand = rsel;
    cand.push_back(i);
    QMat sub(int(cand.size()), rho);
    for (size_t a = 0; a < cand.size(); ++a)
      for (int b = 0; b < rho; ++b) sub(int(a), b) = Rat(h(cand[a], b));
    if (rank(sub) == int(cand.size())) rsel = cand;
  }
  QMat hq(rho, rho);
  for (int a = 0; a < rho; ++a)
    for (int b = 0; b < rho; ++b) hq(a, b) = Rat(h(rsel[a], b));
  s.cone.dim = rho;
  for (size_t j = 0; j < s.sel.size(); ++j) {
    QVec rhs(rho);
    for (int a = 0; a < rho; ++a) rhs[a] = Rat(c.rays[s.sel[j]][rsel[a]]);
    QVec x = solve_linear(hq, rhs);
    IVec xi(rho);
    for (int i = 0; i < rho; ++i) {
      if (x[i].get_den() != 1) throw MathError("non-integral facet coordinates");
      xi[i] = x[i].get_num();
    }
    s.cone.rays.push_back(std::move(xi));
  }
  return s;
}

}  // namespace

bool balinski_certified_stop(const Cone& c,
                             const std::vector<FacetOrbit>& untreated,
                             const PermGroup& g) {
  if (untreated.empty()) return true;
  const int n = c.dim;
  Int total = 0;
  for (const FacetOrbit& o : untreated) total += o.orbit_size;
  if (total <= n - 2) return true;
  if (total > 4096) return false;  // do not spend time certifying huge sets
  std::vector<FaceSet> all;
  for (const FacetOrbit& o : untreated)
    for (const FaceSet& f : orbit(g, o.incidence)) all.push_back(f);
  // common extreme ray across every untreated facet
  FaceSet common = all[0];
  for (const FaceSet& f : all) {
    FaceSet next(int(c.rays.size()));
    for (int e : common.elements())
      if (f.test(e)) next.set(e);
    common = next;
    if (common.count() == 0) break;
  }
  if (common.count() > 0) return true;
  // rank of the untreated facet normals
  if (int(all.size()) <= 64) {
    std::vector<IVec> normals;
    for (const FaceSet& f : all) {
      normals.push_back(normal_from_incidence(c, f));
      if (int(normals.size()) >= n - 1 &&
          rank(rows_of(normals, n).to_rational()) > n - 2)
        return false;
    }
    if (rank(rows_of(normals, n).to_rational()) <= n - 2) return true;
  }
  return false;
}

namespace {

// ridge orbit representatives of a facet under the stabilizer, as incidence
// sets over the cone's rays
std::vector<FaceSet> facet_ridges(const Cone& c, const FaceSet& f,
                                  const PermGroup& g, const AdmOptions& opts);

std::vector<FaceSet> lift_sub_incidences(const std::vector<FaceSet>& subs,
                                         const SubCone& sc, int m) {
  std::vector<FaceSet> out;
  for (const FaceSet& s : subs) {
    FaceSet inc(m);
    for (int e : s.elements()) inc.set(sc.sel[e]);
    out.push_back(inc);
  }
  return out;
}

std::vector<FaceSet> facet_ridges(const Cone& c, const FaceSet& f,
                                  const PermGroup& g, const AdmOptions& opts) {
  const int m = int(c.rays.size());
  SubCone sc = project_facet(c, f);
  const int k = int(sc.sel.size());
  const int rho = sc.cone.dim;
  // a 1-dimensional facet has a single ridge: the apex, with empty incidence
  if (rho == 1) return {FaceSet(m)};
  // stabilizer of the facet, restricted to its rays
  PermGroup stab = set_stabilizer(g, f);
  std::vector<int> pos_of(m, -1);
  for (int i = 0; i < k; ++i) pos_of[sc.sel[i]] = i;
  std::vector<Perm> sub_gens;
  for (const Perm& p : stab.generators())
    sub_gens.push_back(restrict_perm(p, sc.sel, pos_of));
  PermGroup sub_group(k, sub_gens);

  if (k - rho <= opts.direct_threshold) {
    std::vector<IVec> facets = dual_description(rho, sc.cone.rays);
    std::set<FaceSet> reps;
    for (const IVec& fn : facets)
      reps.insert(canonical_image(sub_group, facet_incidence(sc.cone, fn)));
    return lift_sub_incidences({reps.begin(), reps.end()}, sc, m);
  }

  if (k - rho > opts.symmetry_threshold) {
    // try a larger linear symmetry group of the subcone
    PermGroup big = linear_automorphisms(sc.cone.rays);
    bool contains_stab = true;
    for (const Perm& p : sub_group.generators())
      if (!big.contains(p)) {
        contains_stab = false;
        break;
      }
    if (contains_stab && big.order() > sub_group.order()) {
      FacetOrbitList wide = adm_facet_orbits(sc.cone, big, opts);
      std::set<FaceSet> reps;
      for (const FacetOrbit& o : wide.orbits)
        for (const FaceSet& r : double_coset_split(big, sub_group, o.incidence))
          reps.insert(r);
      return lift_sub_incidences({reps.begin(), reps.end()}, sc, m);
    }
  }

  FacetOrbitList rec = adm_facet_orbits(sc.cone, sub_group, opts);
  std::vector<FaceSet> subs;
  for (const FacetOrbit& o : rec.orbits) subs.push_back(o.incidence);
  return lift_sub_incidences(subs, sc, m);
}

}  // namespace

FacetOrbitList adm_facet_orbits(const Cone& c, const PermGroup& g,
                                const AdmOptions& opts) {
  if (opts.bank) {
    auto hit = opts.bank->lookup(c, g);
    if (hit) return *hit;
  }
  auto t0 = std::chrono::steady_clock::now();

  struct Entry {
    FaceSet inc;
    IVec normal;
    Int osize;
    bool treated = false;
  };
  std::map<FaceSet, Entry> reg;  // canonical incidence -> representative
  auto insert = [&](const FaceSet& inc, const IVec& normal) {
    FaceSet key = canonical_image(g, inc);
    if (reg.count(key)) return;
    Int osize = g.order() / set_stabilizer(g, inc).order();
    reg.emplace(key, Entry{inc, normal, osize, false});
  };

  IVec f0 = initial_facet(c);
  insert(facet_incidence(c, f0), f0);

  bool any_treated = false;
  while (true) {
    // untreated representative with the fewest incident rays
    auto pick = reg.end();
    std::vector<FacetOrbit> untreated;
    for (auto it = reg.begin(); it != reg.end(); ++it) {
      if (it->second.treated) continue;
      untreated.push_back({it->second.inc, it->second.normal, it->second.osize});
      if (pick == reg.end() ||
          it->second.inc.count() < pick->second.inc.count())
        pick = it;
    }
    if (pick == reg.end()) break;
    // connectivity argument needs a treated facet whose neighbors are known
    if (any_treated && balinski_certified_stop(c, untreated, g)) break;

    Entry& e = pick->second;
    std::vector<int> bidx =
        independent_subset(c.rays, c.dim, e.inc.elements());
    for (const FaceSet& ridge : facet_ridges(c, e.inc, g, opts)) {
      IVec r = ridge_normal_from_incidence(c, e.inc, ridge, bidx);
      IVec fn = flip(c, e.inc, e.normal, r);
      insert(facet_incidence(c, fn), fn);
    }
    e.treated = true;
    any_treated = true;
  }

  FacetOrbitList out;
  out.total = 0;
  for (auto& [key, e] : reg) {
    out.orbits.push_back({e.inc, e.normal, e.osize});
    out.total += e.osize;
  }

  if (opts.bank) {
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > opts.bank_cost_threshold) opts.bank->store(c, g, out);
  }
  return out;
}

// --- saving bank -----------------------------------------------------------

SavingBank::SavingBank(std::string dir) : dir_(std::move(dir)) {
  namespace fs = std::filesystem;
  if (dir_.empty()) return;
  fs::create_directories(dir_);
  for (const auto& ent : fs::directory_iterator(dir_)) {
    if (!ent.is_regular_file()) continue;
    std::ifstream in(ent.path());
    uint64_t key;
    std::string tag;
    if (!(in >> tag >> std::hex >> key >> std::dec)) continue;
    if (tag != "cone") continue;
    Record r;
    int ngens, norb;
    in >> r.n >> r.m >> ngens >> norb;
    bool ok = bool(in);
    for (int i = 0; i < ngens && ok; ++i) {
      Perm p(r.m);
      for (int j = 0; j < r.m; ++j) ok = ok && bool(in >> p[j]);
      r.group.push_back(std::move(p));
    }
    for (int i = 0; i < norb && ok; ++i) {
      int sz;
      ok = ok && bool(in >> sz);
      std::vector<int> pos(sz);
      for (int j = 0; j < sz && ok; ++j) ok = ok && bool(in >> pos[j]);
      r.orbits.push_back(std::move(pos));
    }
    if (ok) mem_.emplace(key, std::move(r));
  }
}

size_t SavingBank::size() const {
  std::lock_guard<std::mutex> lk(mu_);
  return mem_.size();
}

std::optional<FacetOrbitList> SavingBank::lookup(const Cone& c,
                                                 const PermGroup& g) {
  uint64_t key = canonical_cone(c.rays).second;
  Record rec;
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = mem_.find(key);
    if (it == mem_.end()) return std::nullopt;
    rec = it->second;
  }
  const int m = int(c.rays.size());
  if (rec.m != m || rec.n != c.dim) return std::nullopt;
  // canonical position -> current ray index
  Perm order = canonical_cone_labeling(c.rays);
  // stored group mapped into current indexing
  std::vector<Perm> mapped;
  for (const Perm& p : rec.group) {
    Perm q(m);
    for (int i = 0; i < m; ++i) q[order[i]] = order[p[i]];
    mapped.push_back(std::move(q));
  }
  PermGroup stored(m, mapped);
  // orbit incidences in current indexing
  std::vector<FaceSet> reps;
  for (const std::vector<int>& pos : rec.orbits) {
    FaceSet f(m);
    for (int p : pos) f.set(order[p]);
    reps.push_back(f);
  }
  // adapt representatives to the requested group
  bool g_le_stored = true;
  for (const Perm& p : g.generators())
    if (!stored.contains(p)) {
      g_le_stored = false;
      break;
    }
  std::set<FaceSet> out_reps;
  if (g_le_stored) {
    for (const FaceSet& r : reps)
      for (const FaceSet& s : double_coset_split(stored, g, r)) out_reps.insert(s);
  } else {
    try {
      for (const FaceSet& r : reps)
        for (const FaceSet& f : orbit(stored, r))
          out_reps.insert(canonical_image(g, f));
    } catch (const OrbitTooLarge&) {
      return std::nullopt;
    }
  }
  FacetOrbitList out;
  out.total = 0;
  for (const FaceSet& f : out_reps) {
    IVec normal = normal_from_incidence(c, f);
    Int osize = g.order() / set_stabilizer(g, f).order();
    out.orbits.push_back({f, normal, osize});
    out.total += osize;
  }
  return out;
}

void SavingBank::store(const Cone& c, const PermGroup& g,
                       const FacetOrbitList& res) {
  uint64_t key = canonical_cone(c.rays).second;
  Perm order = canonical_cone_labeling(c.rays);
  const int m = int(c.rays.size());
  Perm inv = perm_inverse(order);
  Record r;
  r.n = c.dim;
  r.m = m;
  for (const Perm& p : g.generators()) {
    Perm q(m);
    for (int i = 0; i < m; ++i) q[inv[i]] = inv[p[i]];
    r.group.push_back(std::move(q));
  }
  for (const FacetOrbit& o : res.orbits) {
    std::vector<int> pos;
    for (int e : o.incidence.elements()) pos.push_back(inv[e]);
    std::sort(pos.begin(), pos.end());
    r.orbits.push_back(std::move(pos));
  }
  {
    std::lock_guard<std::mutex> lk(mu_);
    mem_[key] = r;
  }
  persist(key, r);
}

void SavingBank::persist(uint64_t key, const Record& r) {
  if (dir_.empty()) return;
  std::ostringstream name;
  name << std::hex << key << ".bank";
  std::ofstream out(std::filesystem::path(dir_) / name.str());
  out << "cone " << std::hex << key << std::dec << "\n";
  out << r.n << " " << r.m << " " << r.group.size() << " " << r.orbits.size() << "\n";
  for (const Perm& p : r.group) {
    for (size_t j = 0; j < p.size(); ++j) out << p[j] << (j + 1 < p.size() ? " " : "\n");
    if (p.empty()) out << "\n";
  }
  for (const std::vector<int>& o : r.orbits) {
    out << o.size();
    for (int x : o) out << " " << x;
    out << "\n";
  }
}

}  // namespace pfe
