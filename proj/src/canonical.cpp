#include "pfe/canonical.hpp"

#include <algorithm>
#include <deque>

namespace pfe {

namespace {

// Weights replaced by ranks in the sorted weight alphabet; all search work
// happens on small integers.
struct CodeGraph {
  int n = 0;
  std::vector<int> code;
  int at(int i, int j) const { return code[i * n + j]; }
};

CodeGraph encode(const WGraph& g) {
  const int n = g.size();
  std::vector<Rat> alphabet;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) alphabet.push_back(g.weight(i, j));
  std::sort(alphabet.begin(), alphabet.end());
  alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());
  CodeGraph c{n, std::vector<int>(size_t(n) * n)};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      auto it = std::lower_bound(alphabet.begin(), alphabet.end(), g.weight(i, j));
      c.code[i * n + j] = int(it - alphabet.begin());
    }
  return c;
}

int count_colors(const std::vector<int>& color) {
  std::vector<int> c = color;
  std::sort(c.begin(), c.end());
  return int(std::unique(c.begin(), c.end()) - c.begin());
}

// Iterated weight refinement to a stable coloring; new color ids are ranks of
// sorted vertex signatures, so they are isomorphism-invariant.
std::vector<int> refine(const CodeGraph& g, std::vector<int> color) {
  const int n = g.n;
  int ncol = count_colors(color);
  while (true) {
    std::vector<std::pair<std::vector<int>, int>> sig(n);
    for (int v = 0; v < n; ++v) {
      std::vector<std::pair<int, int>> adj;
      adj.reserve(n - 1);
      for (int u = 0; u < n; ++u)
        if (u != v) adj.emplace_back(color[u], g.at(v, u));
      std::sort(adj.begin(), adj.end());
      std::vector<int>& s = sig[v].first;
      s.reserve(2 * n);
      s.push_back(color[v]);
      s.push_back(g.at(v, v));
      for (auto& [c, w] : adj) {
        s.push_back(c);
        s.push_back(w);
      }
      sig[v].second = v;
    }
    std::sort(sig.begin(), sig.end());
    std::vector<int> next(n);
    int rank = 0;
    for (int k = 0; k < n; ++k) {
      if (k > 0 && sig[k].first != sig[k - 1].first) ++rank;
      next[sig[k].second] = rank;
    }
    int nnext = rank + 1;
    if (nnext == ncol) return next;
    color = std::move(next);
    ncol = nnext;
  }
}

struct Searcher {
  const CodeGraph& g;
  std::vector<int> best;  // flattened canonical code matrix
  Perm best_perm;
  bool have = false;
  std::vector<Perm> autos;

  explicit Searcher(const CodeGraph& cg) : g(cg) {}

  void leaf(const std::vector<int>& color) {
    const int n = g.n;
    Perm p(n);
    for (int v = 0; v < n; ++v) p[color[v]] = v;
    std::vector<int> m(size_t(n) * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m[i * n + j] = g.at(p[i], p[j]);
    if (!have || m < best) {
      best = std::move(m);
      best_perm = std::move(p);
      have = true;
    } else if (m == best) {
      Perm a = perm_compose(p, perm_inverse(best_perm));
      bool id = true;
      for (int i = 0; i < n; ++i)
        if (a[i] != i) {
          id = false;
          break;
        }
      if (!id) autos.push_back(std::move(a));
    }
  }

  void run(std::vector<int> color, std::vector<int>& fixed) {
    const int n = g.n;
    color = refine(g, std::move(color));
    if (count_colors(color) == n) {
      leaf(color);
      return;
    }
    // smallest non-singleton cell, lowest color on ties
    std::vector<int> size(n, 0);
    for (int v = 0; v < n; ++v) ++size[color[v]];
    int target = -1;
    for (int c = 0; c < n; ++c)
      if (size[c] > 1 && (target < 0 || size[c] < size[target])) target = c;
    std::vector<int> cell;
    for (int v = 0; v < n; ++v)
      if (color[v] == target) cell.push_back(v);
    std::vector<char> done(n, 0);
    for (int v : cell) {
      if (done[v]) continue;
      std::vector<int> c2 = color;
      c2[v] = -1;
      fixed.push_back(v);
      run(std::move(c2), fixed);
      fixed.pop_back();
      // close the orbit of v under the automorphisms fixing the current path
      std::vector<const Perm*> gens;
      for (const Perm& a : autos) {
        bool ok = true;
        for (int f : fixed)
          if (a[f] != f) {
            ok = false;
            break;
          }
        if (ok) gens.push_back(&a);
      }
      std::deque<int> q{v};
      done[v] = 1;
      while (!q.empty()) {
        int x = q.front();
        q.pop_front();
        for (const Perm* a : gens) {
          if (!done[(*a)[x]]) {
            done[(*a)[x]] = 1;
            q.push_back((*a)[x]);
          }
        }
      }
    }
  }
};

}  // namespace

LabelingResult canonical_labeling_full(const WGraph& g) {
  CodeGraph cg = encode(g);
  if (cg.n == 0) return {Perm{}, {}};
  Searcher s(cg);
  std::vector<int> fixed;
  s.run(std::vector<int>(cg.n, 0), fixed);
  return {std::move(s.best_perm), std::move(s.autos)};
}

Perm canonical_labeling(const WGraph& g) {
  return canonical_labeling_full(g).order;
}

QMat relabel(const WGraph& g, const Perm& order) {
  const int n = g.size();
  QMat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = g.weight(order[i], order[j]);
  return m;
}

WGraph pqf_graph(const PQF& q, const std::vector<IVec>& vecs, bool absolute) {
  const int d = q.dim();
  const int m = int(vecs.size());
  IMat span(d, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < d; ++i) span(i, j) = vecs[j][i];
  if (hnf(span) != IMat::identity(d)) throw SpanDeficient();
  WGraph g(m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      Rat w = q.pairing(vecs[i], vecs[j]);
      if (absolute) w = abs(w);
      g.weight(i, j) = w;
      g.weight(j, i) = w;
    }
  return g;
}

namespace {

PQF integral_primitive(const PQF& q) {
  const int d = q.dim();
  Int l = 1;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.at(i, j).get_den().get_mpz_t());
  Int g = 0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Rat v = q.at(i, j) * l;
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_num().get_mpz_t());
    }
  QMat out(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Rat v = q.at(i, j) * l / g;
      out(i, j) = v;
    }
  return PQF(std::move(out));
}

// Pairing matrix of the chosen representatives, in the given order.
QMat ordered_pairings(const QMat& p, const Perm& order) {
  const int m = p.rows();
  QMat r(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) r(i, j) = p(order[i], order[j]);
  return r;
}

// Does the +-class permutation sigma lift to a form automorphism? Signs are
// propagated over nonzero pairings and then verified globally.
bool lifts_to_form(const QMat& p, const Perm& sigma) {
  const int m = p.rows();
  std::vector<int> delta(m, 0);
  for (int r = 0; r < m; ++r) {
    if (delta[r] != 0) continue;
    delta[r] = 1;
    std::deque<int> q{r};
    while (!q.empty()) {
      int i = q.front();
      q.pop_front();
      for (int j = 0; j < m; ++j) {
        if (j == i || p(i, j) == 0) continue;
        if (abs(p(sigma[i], sigma[j])) != abs(p(i, j))) return false;
        int s = (p(sigma[i], sigma[j]) > 0) == (p(i, j) > 0) ? 1 : -1;
        int dj = delta[i] * s;
        if (delta[j] == 0) {
          delta[j] = dj;
          q.push_back(j);
        } else if (delta[j] != dj) {
          return false;
        }
      }
    }
  }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (p(sigma[i], sigma[j]) != Rat(delta[i] * delta[j]) * p(i, j)) return false;
  return true;
}

// Fix representative signs by BFS over each connected component of the
// nonzero-pairing graph: tree edges are forced positive. Flipping any subset
// of input signs changes every eps of a component by one common factor, so
// the gauged Gram is invariant.
QMat gauge_gram(const QMat& pc) {
  const int m = pc.rows();
  std::vector<int> eps(m, 0);
  for (int r = 0; r < m; ++r) {
    if (eps[r] != 0) continue;
    eps[r] = 1;
    std::deque<int> q{r};
    while (!q.empty()) {
      int i = q.front();
      q.pop_front();
      for (int j = 0; j < m; ++j) {
        if (eps[j] != 0 || pc(i, j) == 0) continue;
        eps[j] = eps[i] * (pc(i, j) > 0 ? 1 : -1);
        q.push_back(j);
      }
    }
  }
  QMat g(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) g(i, j) = Rat(eps[i] * eps[j]) * pc(i, j);
  return g;
}

// Rebuild a d-dimensional form from the Gram matrix of an ordered spanning
// vector set: basis = HNF-reduced coordinate lattice of the vectors relative
// to the first d independent ones.
PQF reconstruct_form(const QMat& g, int d) {
  const int m = g.rows();
  std::vector<int> idx;
  for (int j = 0; j < m && int(idx.size()) < d; ++j) {
    std::vector<int> cand = idx;
    cand.push_back(j);
    QMat sub(int(cand.size()), int(cand.size()));
    for (size_t a = 0; a < cand.size(); ++a)
      for (size_t b = 0; b < cand.size(); ++b) sub(int(a), int(b)) = g(cand[a], cand[b]);
    if (rank(sub) == int(cand.size())) idx = cand;
  }
  if (int(idx.size()) != d) throw RankDeficient();
  QMat gi(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) gi(a, b) = g(idx[a], idx[b]);
  QMat gi_inv = inverse(gi);
  QMat coords(d, m);
  for (int j = 0; j < m; ++j) {
    QVec rhs(d);
    for (int a = 0; a < d; ++a) rhs[a] = g(idx[a], j);
    for (int a = 0; a < d; ++a) {
      Rat s = 0;
      for (int b = 0; b < d; ++b) s += gi_inv(a, b) * rhs[b];
      coords(a, j) = s;
    }
  }
  Int den = 1;
  for (int a = 0; a < d; ++a)
    for (int j = 0; j < m; ++j)
      mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), coords(a, j).get_den().get_mpz_t());
  IMat ci(d, m);
  for (int a = 0; a < d; ++a)
    for (int j = 0; j < m; ++j) {
      Rat v = coords(a, j) * den;
      ci(a, j) = v.get_num();
    }
  IMat h = hnf(ci);
  if (h.cols() != d) throw RankDeficient();
  QMat hq = h.to_rational();
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) hq(a, b) /= den;
  QMat c = hq.transpose() * gi * hq;
  return integral_primitive(PQF(std::move(c)));
}

std::vector<IVec> with_negatives(const std::vector<IVec>& vecs) {
  std::vector<IVec> out = vecs;
  for (const IVec& v : vecs) {
    IVec n(v.size());
    for (size_t i = 0; i < v.size(); ++i) n[i] = -v[i];
    out.push_back(std::move(n));
  }
  return out;
}

WGraph signed_graph(const PQF& q, const std::vector<IVec>& both) {
  const int n = int(both.size());
  WGraph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Rat w = q.pairing(both[i], both[j]);
      g.weight(i, j) = w;
      g.weight(j, i) = w;
    }
  return g;
}

}  // namespace

CanonicalPQF canonical_pqf(const PQF& q0) {
  PQF q = integral_primitive(q0);
  std::vector<IVec> vecs = spanning_vectors(q);
  const int m = int(vecs.size());
  QMat pair(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) pair(i, j) = q.pairing(vecs[i], vecs[j]);

  WGraph ga(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) ga.weight(i, j) = abs(pair(i, j));
  LabelingResult lr = canonical_labeling_full(ga);

  bool all_lift = true;
  for (const Perm& a : lr.automorphisms)
    if (!lifts_to_form(pair, a)) {
      all_lift = false;
      break;
    }

  QMat gram(0, 0);
  if (all_lift) {
    gram = gauge_gram(ordered_pairings(pair, lr.order));
  } else {
    // absolute weights were ambiguous: use the full signed configuration
    std::vector<IVec> both = with_negatives(vecs);
    WGraph gs = signed_graph(q, both);
    Perm order = canonical_labeling(gs);
    QMat canon = relabel(gs, order);
    // first occurrence of each +-class in canonical position order
    std::vector<int> pos;
    std::vector<char> seen(m, 0);
    for (int i = 0; i < 2 * m; ++i) {
      int cls = order[i] % m;
      if (!seen[cls]) {
        seen[cls] = 1;
        pos.push_back(i);
      }
    }
    gram = QMat(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) gram(i, j) = canon(pos[i], pos[j]);
  }

  PQF canon_form = reconstruct_form(gram, q.dim());
  return {canon_form, hash_form(canon_form)};
}

FormAutomorphisms form_automorphisms(const PQF& q,
                                     const std::vector<IVec>& vecs) {
  const int m = int(vecs.size());
  std::vector<IVec> both = with_negatives(vecs);
  WGraph gs = signed_graph(q, both);
  LabelingResult lr = canonical_labeling_full(gs);
  PermGroup full(2 * m, lr.automorphisms);
  std::vector<Perm> proj;
  for (const Perm& a : lr.automorphisms) {
    Perm p(m);
    for (int i = 0; i < m; ++i) p[i] = a[i] % m;
    proj.push_back(std::move(p));
  }
  return {PermGroup(m, std::move(proj)), full.order()};
}

namespace {

WGraph cone_graph(const std::vector<IVec>& rays) {
  if (rays.empty()) throw RankDeficient();
  const int n = int(rays[0].size());
  const int m = int(rays.size());
  QMat s(n, n);
  for (const IVec& v : rays)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s(i, j) += Rat(Int(v[i] * v[j]));
  if (rank(s) != n) throw RankDeficient();
  QMat sinv = inverse(s);
  WGraph g(m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      Rat w = 0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) w += Rat(Int(rays[i][a] * rays[j][b])) * sinv(a, b);
      g.weight(i, j) = w;
      g.weight(j, i) = w;
    }
  return g;
}

}  // namespace

Perm canonical_cone_labeling(const std::vector<IVec>& rays) {
  return canonical_labeling(cone_graph(rays));
}

std::pair<QMat, uint64_t> canonical_cone(const std::vector<IVec>& rays) {
  const int n = int(rays[0].size());
  const int m = int(rays.size());
  Perm order = canonical_labeling(cone_graph(rays));
  QMat r(n, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) r(i, j) = Rat(rays[order[j]][i]);
  // reduced row echelon form: the unique representative under left GL_n
  int row = 0;
  for (int col = 0; col < m && row < n; ++col) {
    int piv = -1;
    for (int i = row; i < n; ++i)
      if (r(i, col) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    if (piv != row)
      for (int j = 0; j < m; ++j) swap(r(piv, j), r(row, j));
    Rat p = r(row, col);
    for (int j = 0; j < m; ++j) r(row, j) /= p;
    for (int i = 0; i < n; ++i) {
      if (i == row || r(i, col) == 0) continue;
      Rat f = r(i, col);
      for (int j = 0; j < m; ++j) r(i, j) -= f * r(row, j);
    }
    ++row;
  }
  return {r, hash_qmat(r)};
}

PermGroup linear_automorphisms(const std::vector<IVec>& rays) {
  const int n = int(rays[0].size());
  const int m = int(rays.size());
  WGraph g = cone_graph(rays);
  LabelingResult lr = canonical_labeling_full(g);
  // verify each generator really is linear: solve for the map on a basis of
  // rays and check it permutes the whole configuration as claimed
  std::vector<int> idx;
  {
    QMat acc(n, 0);
    for (int j = 0; j < m && int(idx.size()) < n; ++j) {
      std::vector<int> cand = idx;
      cand.push_back(j);
      QMat sub(n, int(cand.size()));
      for (size_t c = 0; c < cand.size(); ++c)
        for (int i = 0; i < n; ++i) sub(i, int(c)) = Rat(rays[cand[c]][i]);
      if (rank(sub) == int(cand.size())) idx = cand;
    }
  }
  std::vector<Perm> verified;
  for (const Perm& a : lr.automorphisms) {
    QMat vi(n, n), vs(n, n);
    for (int c = 0; c < n; ++c)
      for (int i = 0; i < n; ++i) {
        vi(i, c) = Rat(rays[idx[c]][i]);
        vs(i, c) = Rat(rays[a[idx[c]]][i]);
      }
    QMat b = vs * inverse(vi);
    bool ok = true;
    for (int j = 0; j < m && ok; ++j)
      for (int i = 0; i < n; ++i) {
        Rat img = 0;
        for (int k = 0; k < n; ++k) img += b(i, k) * Rat(rays[j][k]);
        if (img != Rat(rays[a[j]][i])) {
          ok = false;
          break;
        }
      }
    if (ok) verified.push_back(a);
  }
  return PermGroup(m, std::move(verified));
}

namespace {

struct Fnv {
  uint64_t h = 14695981039346656037ull;
  void byte(uint8_t b) {
    h ^= b;
    h *= 1099511628211ull;
  }
};

void hash_int(Fnv& f, const Int& x) {
  std::vector<uint8_t> b;
  if (x == 0) {
    b = {0};
  } else {
    Int ax = abs(x);
    size_t count = 0;
    b.resize((mpz_sizeinbase(ax.get_mpz_t(), 2) + 7) / 8);
    mpz_export(b.data(), &count, -1, 1, 0, 0, ax.get_mpz_t());
    b.resize(count);
    if (x > 0) {
      if (b.back() & 0x80) b.push_back(0);
    } else {
      for (auto& c : b) c = uint8_t(~c);
      int carry = 1;
      for (auto& c : b) {
        int s = c + carry;
        c = uint8_t(s);
        carry = s >> 8;
        if (!carry) break;
      }
      if (!(b.back() & 0x80)) b.push_back(0xff);
    }
  }
  uint32_t len = uint32_t(b.size());
  for (int k = 0; k < 4; ++k) f.byte(uint8_t(len >> (8 * k)));
  for (uint8_t c : b) f.byte(c);
}

}  // namespace

uint64_t hash_form(const PQF& q) {
  Fnv f;
  f.byte(uint8_t(q.dim()));
  for (int i = 0; i < q.dim(); ++i)
    for (int j = i; j < q.dim(); ++j) {
      if (q.at(i, j).get_den() != 1) throw MathError("hash_form needs an integral form");
      hash_int(f, q.at(i, j).get_num());
    }
  return f.h;
}

uint64_t hash_qmat(const QMat& m) {
  Fnv f;
  f.byte(uint8_t(m.rows()));
  f.byte(uint8_t(m.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      hash_int(f, m(i, j).get_num());
      hash_int(f, m(i, j).get_den());
    }
  return f.h;
}

}  // namespace pfe
