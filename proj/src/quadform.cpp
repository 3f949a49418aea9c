#include "pfe/quadform.hpp"

#include <algorithm>
#include <cmath>

namespace pfe {

PQF::PQF(QMat gram) : gram_(std::move(gram)) {
  if (gram_.rows() != gram_.cols()) throw NonSquare();
  for (int i = 0; i < gram_.rows(); ++i)
    for (int j = 0; j < i; ++j)
      if (gram_(i, j) != gram_(j, i)) throw MathError("gram matrix not symmetric");
}

Rat PQF::value(const IVec& x) const {
  Rat v = 0;
  const int d = dim();
  for (int i = 0; i < d; ++i) {
    if (x[i] == 0) continue;
    v += gram_(i, i) * Rat(x[i] * x[i]);
    for (int j = i + 1; j < d; ++j)
      if (x[j] != 0) v += 2 * gram_(i, j) * Rat(x[i] * x[j]);
  }
  return v;
}

Rat PQF::pairing(const IVec& x, const IVec& y) const {
  Rat v = 0;
  const int d = dim();
  for (int i = 0; i < d; ++i) {
    if (x[i] == 0) continue;
    for (int j = 0; j < d; ++j)
      if (y[j] != 0) v += gram_(i, j) * Rat(x[i] * y[j]);
  }
  return v;
}

bool PQF::positive_definite() const { return cholesky_probe(gram_).positive_definite; }

IVec mul(const IMat& u, const IVec& x) {
  IVec r(u.rows());
  for (int i = 0; i < u.rows(); ++i) {
    Int s = 0;
    for (int j = 0; j < u.cols(); ++j) s += u(i, j) * x[j];
    r[i] = s;
  }
  return r;
}

PQF conjugate(const PQF& q, const IMat& u) {
  QMat ut = u.transpose().to_rational();
  return PQF(ut * q.gram() * u.to_rational());
}

namespace {

// Gram-Schmidt data of a form: mu (unit lower) and squared norms b.
struct Gso {
  QMat mu;
  QVec b;
};

Gso gso(const QMat& g) {
  const int d = g.rows();
  Gso r{QMat::identity(d), QVec(d)};
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < i; ++j) {
      Rat s = g(i, j);
      for (int k = 0; k < j; ++k) s -= r.mu(i, k) * r.mu(j, k) * r.b[k];
      r.mu(i, j) = s / r.b[j];
    }
    Rat s = g(i, i);
    for (int k = 0; k < i; ++k) s -= r.mu(i, k) * r.mu(i, k) * r.b[k];
    r.b[i] = s;
    if (r.b[i] <= 0) throw NotPositiveDefinite();
  }
  return r;
}

// b_i <- b_i + c * b_j on the gram matrix and transform.
void add_row(QMat& g, IMat& u, int i, int j, const Int& c) {
  const int d = g.rows();
  for (int k = 0; k < d; ++k) u(k, i) += c * u(k, j);
  Rat gij = g(i, j);  // before the sweep touches it
  for (int k = 0; k < d; ++k) {
    if (k == i) continue;
    g(i, k) += Rat(c) * g(j, k);
    g(k, i) = g(i, k);
  }
  g(i, i) += 2 * Rat(c) * gij + Rat(c * c) * g(j, j);
}

void swap_rows(QMat& g, IMat& u, int i, int j) {
  const int d = g.rows();
  for (int k = 0; k < d; ++k) swap(u(k, i), u(k, j));
  for (int k = 0; k < d; ++k) {
    swap(g(i, k), g(j, k));
  }
  for (int k = 0; k < d; ++k) {
    swap(g(k, i), g(k, j));
  }
}

Int round_rat(const Rat& x) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
  if ((x - Rat(q)) * 2 >= 1) q += 1;
  return q;
}

}  // namespace

std::pair<PQF, IMat> lll_reduce(const PQF& q) {
  const int d = q.dim();
  const Rat delta(99, 100);
  QMat g = q.gram();
  IMat u = IMat::identity(d);
  if (d <= 1) return {PQF(g), u};
  Gso s = gso(g);
  int k = 1;
  while (k < d) {
    // size-reduce b_k against b_{k-1}..b_0
    for (int j = k - 1; j >= 0; --j) {
      Int c = round_rat(s.mu(k, j));
      if (c != 0) {
        add_row(g, u, k, j, -c);
        s = gso(g);
      }
    }
    if (s.b[k] >= (delta - s.mu(k, k - 1) * s.mu(k, k - 1)) * s.b[k - 1]) {
      ++k;
    } else {
      swap_rows(g, u, k, k - 1);
      s = gso(g);
      k = std::max(k - 1, 1);
    }
  }
  return {PQF(g), u};
}

namespace {

// Largest integer t with t <= x, for rational x.
Int floor_rat(const Rat& x) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
  return q;
}

// floor(sqrt(x)) for x >= 0 rational, exact.
Int floor_sqrt(const Rat& x) {
  if (x < 0) throw MathError("negative radicand");
  // floor(sqrt(n/d)) = floor(sqrt(n*d)/d)
  Int nd = x.get_num() * x.get_den();
  Int r;
  mpz_sqrt(r.get_mpz_t(), nd.get_mpz_t());
  Int f;
  mpz_fdiv_q(f.get_mpz_t(), r.get_mpz_t(), x.get_den().get_mpz_t());
  // fix-up against rounding at the boundary
  while (Rat(f + 1) * Rat(f + 1) <= x) f += 1;
  while (f > 0 && Rat(f) * Rat(f) > x) f -= 1;
  return f;
}

// Enumerate x (one per +- pair) with Q[x] <= bound in the *reduced* basis,
// reporting through a callback; L,dvec from the LDL^T of the reduced gram.
template <typename F>
void enumerate_ldlt(const QMat& l, const QVec& dvec, const Rat& bound, F&& emit) {
  const int d = l.rows();
  IVec x(d, 0);
  QVec partial(d + 1, Rat(0));  // partial[i] = sum_{k>=i} d_k y_k^2
  QVec center(d, Rat(0));       // c_i = sum_{j>i} L(j,i) x_j
  std::vector<Int> lo(d), hi(d);
  int level = d - 1;
  bool descending = true;
  while (level < d) {
    if (descending) {
      // compute range at this level
      Rat rem = bound - partial[level + 1];
      Rat c = 0;
      for (int j = level + 1; j < d; ++j)
        if (x[j] != 0) c += l(j, level) * Rat(x[j]);
      center[level] = c;
      if (rem < 0) { descending = false; ++level; continue; }
      // the admissible interval is centered at -c; it contains an integer
      // iff the nearest integer to -c lies in it
      Int t0 = round_rat(-c);
      if (dvec[level] * (Rat(t0) + c) * (Rat(t0) + c) > rem) {
        descending = false;
        ++level;
        continue;
      }
      Rat f = rem / dvec[level];
      // |t + c| <= sqrt(f)
      Int s = floor_sqrt(f);
      // hi = floor(sqrt(f) - c), refine exactly around the float estimate
      Int h = floor_rat(Rat(s) - c);
      while (dvec[level] * (Rat(h + 1) + c) * (Rat(h + 1) + c) <= rem) h += 1;
      while (dvec[level] * (Rat(h) + c) * (Rat(h) + c) > rem) h -= 1;
      Int lo_v = floor_rat(Rat(-s) - c);
      while (dvec[level] * (Rat(lo_v) + c) * (Rat(lo_v) + c) > rem) lo_v += 1;
      while (dvec[level] * (Rat(lo_v - 1) + c) * (Rat(lo_v - 1) + c) <= rem) lo_v -= 1;
      bool all_zero_above = true;
      for (int j = level + 1; j < d; ++j)
        if (x[j] != 0) { all_zero_above = false; break; }
      if (all_zero_above && lo_v < 0) lo_v = 0;  // one representative per +- pair
      if (lo_v > h) { descending = false; ++level; continue; }
      lo[level] = lo_v;
      hi[level] = h;
      x[level] = lo_v;
    } else {
      if (level == d) break;
      if (x[level] >= hi[level]) { ++level; continue; }
      x[level] += 1;
    }
    // accept x[level], push down or emit
    Rat y = Rat(x[level]) + center[level];
    partial[level] = partial[level + 1] + dvec[level] * y * y;
    if (level == 0) {
      bool nonzero = false;
      for (const Int& t : x) if (t != 0) { nonzero = true; break; }
      if (nonzero) emit(x, partial[0]);
      descending = false;
      // stay at level 0 and advance
    } else {
      --level;
      descending = true;
    }
  }
}

}  // namespace

std::vector<std::pair<IVec, Rat>> enumerate_below(const PQF& q, const Rat& bound) {
  if (bound <= 0) throw MathError("enumeration bound must be positive");
  auto [red, u] = lll_reduce(q);
  LdltResult ld = cholesky(red.gram());
  std::vector<std::pair<IVec, Rat>> out;
  enumerate_ldlt(ld.lower, ld.diag, bound, [&](const IVec& x, const Rat& val) {
    IVec orig = mul(u, x);
    normalize_sign(orig);
    out.emplace_back(std::move(orig), val);
  });
  std::sort(out.begin(), out.end());
  return out;
}

MinData minimal_vectors(const PQF& q) {
  auto [red, u] = lll_reduce(q);
  LdltResult ld = cholesky(red.gram());
  Rat bound = red.gram()(0, 0);
  for (int i = 1; i < red.dim(); ++i) bound = std::min(bound, red.gram()(i, i));
  Rat best = bound;
  std::vector<IVec> vecs;
  enumerate_ldlt(ld.lower, ld.diag, bound, [&](const IVec& x, const Rat& val) {
    if (val > best) return;
    if (val < best) {
      best = val;
      vecs.clear();
    }
    IVec orig = mul(u, x);
    normalize_sign(orig);
    vecs.push_back(std::move(orig));
  });
  std::sort(vecs.begin(), vecs.end());
  return MinData{best, std::move(vecs)};
}

Rat hermite_invariant(const PQF& q) {
  MinData md = minimal_vectors(q);
  Rat num = 1;
  for (int i = 0; i < q.dim(); ++i) num *= md.lambda1;
  return num / det(q.gram());
}

bool is_perfect(const PQF& q) {
  const int d = q.dim();
  const int n = d * (d + 1) / 2;
  MinData md = minimal_vectors(q);
  if (int(md.vectors.size()) < n) return false;
  QMat dyads(int(md.vectors.size()), n);
  for (size_t r = 0; r < md.vectors.size(); ++r) {
    const IVec& x = md.vectors[r];
    int c = 0;
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) dyads(int(r), c++) = Rat(x[i] * x[j]);
  }
  return rank(dyads) == n;
}

Rat scale(const PQF& q) {
  Int l = 1;
  for (int i = 0; i < q.dim(); ++i)
    for (int j = 0; j < q.dim(); ++j)
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.at(i, j).get_den().get_mpz_t());
  Int g = 0;
  for (int i = 0; i < q.dim(); ++i)
    for (int j = 0; j < q.dim(); ++j) {
      Rat v = q.at(i, j) * l;
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_num().get_mpz_t());
    }
  Rat s{l, g};
  s.canonicalize();
  return minimal_vectors(q).lambda1 * s;
}

bool min_vectors_span(const PQF& q) {
  MinData md = minimal_vectors(q);
  const int d = q.dim();
  IMat m(d, int(md.vectors.size()));
  for (size_t c = 0; c < md.vectors.size(); ++c)
    for (int i = 0; i < d; ++i) m(i, int(c)) = md.vectors[c][i];
  IMat h = hnf(m);
  return h == IMat::identity(d);
}

bool has_a2_section(const PQF& q) {
  MinData md = minimal_vectors(q);
  for (size_t i = 0; i < md.vectors.size(); ++i)
    for (size_t j = i + 1; j < md.vectors.size(); ++j) {
      Rat p = q.pairing(md.vectors[i], md.vectors[j]);
      if (2 * abs(p) == md.lambda1) return true;
    }
  return false;
}

PQF dual_form(const PQF& q) { return PQF(inverse(q.gram())); }

std::vector<IVec> spanning_vectors(const PQF& q, Rat* lambda1) {
  const int d = q.dim();
  MinData md = minimal_vectors(q);
  if (lambda1) *lambda1 = md.lambda1;
  auto spans = [&](const std::vector<IVec>& vs) {
    IMat m(d, int(vs.size()));
    for (size_t c = 0; c < vs.size(); ++c)
      for (int i = 0; i < d; ++i) m(i, int(c)) = vs[c][i];
    return hnf(m) == IMat::identity(d);
  };
  if (spans(md.vectors)) return md.vectors;
  // Enlarge through successive attained values.
  Rat bound = md.lambda1;
  for (int attempt = 0; attempt < 16; ++attempt) {
    bound *= 2;
    auto all = enumerate_below(q, bound);
    std::vector<Rat> values;
    for (auto& [v, val] : all) values.push_back(val);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (const Rat& cut : values) {
      std::vector<IVec> vs;
      for (auto& [v, val] : all)
        if (val <= cut) vs.push_back(v);
      if (spans(vs)) {
        std::sort(vs.begin(), vs.end());
        return vs;
      }
    }
  }
  throw SpanDeficient();
}

}  // namespace pfe
