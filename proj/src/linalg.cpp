#include "pfe/linalg.hpp"

#include <algorithm>
#include <sstream>

namespace pfe {

QMat QMat::identity(int n) {
  QMat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

QMat QMat::transpose() const {
  QMat t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

QMat QMat::operator*(const QMat& o) const {
  if (cols_ != o.rows_) throw MathError("dimension mismatch in product");
  QMat r(rows_, o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const Rat& a = (*this)(i, k);
      if (a == 0) continue;
      for (int j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
    }
  return r;
}

QMat QMat::operator+(const QMat& o) const {
  QMat r(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r(i, j) = (*this)(i, j) + o(i, j);
  return r;
}

QMat QMat::operator-(const QMat& o) const {
  QMat r(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r(i, j) = (*this)(i, j) - o(i, j);
  return r;
}

QMat QMat::scaled(const Rat& s) const {
  QMat r(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r(i, j) = (*this)(i, j) * s;
  return r;
}

IMat IMat::identity(int n) {
  IMat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IMat IMat::transpose() const {
  IMat t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

IMat IMat::operator*(const IMat& o) const {
  if (cols_ != o.rows_) throw MathError("dimension mismatch in product");
  IMat r(rows_, o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const Int& a = (*this)(i, k);
      if (a == 0) continue;
      for (int j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
    }
  return r;
}

QMat IMat::to_rational() const {
  QMat r(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r(i, j) = (*this)(i, j);
  return r;
}

namespace {

// Clears denominators row-wise so elimination can run over the integers.
IMat clear_denominators(const QMat& m) {
  IMat r(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i) {
    Int l = 1;
    for (int j = 0; j < m.cols(); ++j) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(),
                                          m(i, j).get_den().get_mpz_t());
    for (int j = 0; j < m.cols(); ++j) {
      Rat v = m(i, j) * l;
      r(i, j) = v.get_num();
    }
  }
  return r;
}

// Fraction-free (Bareiss) elimination in place; returns the rank.
// If detp is nonnull the matrix must be square and *detp receives det.
int bareiss(IMat& a, Int* detp) {
  const int rows = a.rows(), cols = a.cols();
  Int prev = 1;
  int r = 0;
  int sign = 1;
  for (int c = 0; c < cols && r < rows; ++c) {
    int piv = -1;
    for (int i = r; i < rows; ++i)
      if (a(i, c) != 0) { piv = i; break; }
    if (piv < 0) continue;
    if (piv != r) {
      for (int j = 0; j < cols; ++j) swap(a(piv, j), a(r, j));
      sign = -sign;
    }
    for (int i = r + 1; i < rows; ++i) {
      for (int j = c + 1; j < cols; ++j) {
        Int t = a(r, c) * a(i, j) - a(i, c) * a(r, j);
        mpz_divexact(a(i, j).get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      a(i, c) = 0;
    }
    prev = a(r, c);
    ++r;
  }
  if (detp) {
    if (r < rows) *detp = 0;
    else *detp = sign > 0 ? prev : -prev;
  }
  return r;
}

}  // namespace

int rank(const IMat& m) {
  IMat a = m;
  return bareiss(a, nullptr);
}

int rank(const QMat& m) {
  IMat a = clear_denominators(m);
  return bareiss(a, nullptr);
}

Rat det(const QMat& m) {
  if (m.rows() != m.cols()) throw NonSquare();
  if (m.rows() == 0) return 1;
  // Track the row scaling introduced when clearing denominators.
  Rat scale = 1;
  IMat a(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i) {
    Int l = 1;
    for (int j = 0; j < m.cols(); ++j) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(),
                                          m(i, j).get_den().get_mpz_t());
    scale *= Rat(l);
    for (int j = 0; j < m.cols(); ++j) {
      Rat v = m(i, j) * l;
      a(i, j) = v.get_num();
    }
  }
  Int d;
  bareiss(a, &d);
  Rat r(d);
  r /= scale;
  return r;
}

IMat hnf(const IMat& m) {
  const int rows = m.rows(), cols = m.cols();
  IMat a = m;
  // Column operations only, working top row down.
  int c = 0;  // next column to fix
  for (int r = 0; r < rows && c < cols; ++r) {
    // Euclidean sweep: make all columns > c have zero in row r.
    while (true) {
      int piv = -1;
      for (int j = c; j < cols; ++j)
        if (a(r, j) != 0) { piv = j; break; }
      if (piv < 0) break;
      // Move a nonzero with minimal |value| to column c.
      for (int j = piv + 1; j < cols; ++j)
        if (a(r, j) != 0 && mpz_cmpabs(a(r, j).get_mpz_t(), a(r, piv).get_mpz_t()) < 0)
          piv = j;
      if (piv != c)
        for (int i = 0; i < rows; ++i) swap(a(i, piv), a(i, c));
      bool done = true;
      for (int j = c + 1; j < cols; ++j) {
        if (a(r, j) == 0) continue;
        Int q;
        // round-to-nearest keeps entries small
        Int num = a(r, j), den = a(r, c);
        mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
        if ((num - q * den) * 2 > abs(den)) q += 1;
        if (q != 0)
          for (int i = 0; i < rows; ++i) a(i, j) -= q * a(i, c);
        if (a(r, j) != 0) done = false;
      }
      if (done) break;
    }
    if (a(r, c) == 0) continue;  // row r had no pivot; stay on column c
    if (a(r, c) < 0)
      for (int i = 0; i < rows; ++i) a(i, c) = -a(i, c);
    // Reduce earlier columns against the new pivot.
    for (int j = 0; j < c; ++j) {
      Int q;
      mpz_fdiv_q(q.get_mpz_t(), a(r, j).get_mpz_t(), a(r, c).get_mpz_t());
      if (q != 0)
        for (int i = 0; i < rows; ++i) a(i, j) -= q * a(i, c);
    }
    ++c;
  }
  // Keep only the pivot columns.
  IMat h(rows, c);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < c; ++j) h(i, j) = a(i, j);
  return h;
}

IVec kernel_vector(const QMat& m) {
  const int cols = m.cols();
  // Rational Gaussian elimination with column pivots recorded.
  QMat a = m;
  std::vector<int> pivot_col;
  int r = 0;
  for (int c = 0; c < cols && r < a.rows(); ++c) {
    int piv = -1;
    for (int i = r; i < a.rows(); ++i)
      if (a(i, c) != 0) { piv = i; break; }
    if (piv < 0) continue;
    if (piv != r)
      for (int j = 0; j < cols; ++j) swap(a(piv, j), a(r, j));
    Rat inv = 1 / a(r, c);
    for (int j = c; j < cols; ++j) a(r, j) *= inv;
    for (int i = 0; i < a.rows(); ++i) {
      if (i == r || a(i, c) == 0) continue;
      Rat f = a(i, c);
      for (int j = c; j < cols; ++j) a(i, j) -= f * a(r, j);
    }
    pivot_col.push_back(c);
    ++r;
  }
  if (int(pivot_col.size()) != cols - 1) throw WrongCorank();
  // The single free column.
  std::vector<bool> is_pivot(cols, false);
  for (int c : pivot_col) is_pivot[c] = true;
  int free_col = 0;
  while (is_pivot[free_col]) ++free_col;
  QVec v(cols);
  v[free_col] = 1;
  for (int i = 0; i < r; ++i) v[pivot_col[i]] = -a(i, free_col);
  // Scale to a primitive integer vector.
  Int l = 1;
  for (const Rat& x : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den().get_mpz_t());
  IVec iv(cols);
  for (int j = 0; j < cols; ++j) {
    Rat x = v[j] * l;
    iv[j] = x.get_num();
  }
  make_primitive(iv);
  normalize_sign(iv);
  return iv;
}

IVec kernel_vector(const IMat& m) { return kernel_vector(m.to_rational()); }

namespace {

inline uint64_t mulmod(uint64_t a, uint64_t b, uint64_t p) { return a * b % p; }

uint64_t powmod(uint64_t a, uint64_t e, uint64_t p) {
  uint64_t r = 1;
  while (e) {
    if (e & 1) r = mulmod(r, a, p);
    a = mulmod(a, a, p);
    e >>= 1;
  }
  return r;
}

inline uint64_t invmod(uint64_t a, uint64_t p) { return powmod(a, p - 2, p); }

}  // namespace

std::vector<uint32_t> kernel_vector_mod_p(const IMat& m, uint32_t p) {
  const int rows = m.rows(), cols = m.cols();
  std::vector<std::vector<uint64_t>> a(rows, std::vector<uint64_t>(cols));
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      Int e = m(i, j) % p;
      if (e < 0) e += p;
      a[i][j] = e.get_ui();
    }
  std::vector<int> pivot_col;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int piv = -1;
    for (int i = r; i < rows; ++i)
      if (a[i][c] != 0) { piv = i; break; }
    if (piv < 0) continue;
    std::swap(a[piv], a[r]);
    uint64_t inv = invmod(a[r][c], p);
    for (int j = c; j < cols; ++j) a[r][j] = mulmod(a[r][j], inv, p);
    for (int i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      uint64_t f = a[i][c];
      for (int j = c; j < cols; ++j)
        a[i][j] = (a[i][j] + p - mulmod(f, a[r][j], p)) % p;
    }
    pivot_col.push_back(c);
    ++r;
  }
  if (int(pivot_col.size()) != cols - 1) return {};
  std::vector<bool> is_pivot(cols, false);
  for (int c : pivot_col) is_pivot[c] = true;
  int free_col = 0;
  while (is_pivot[free_col]) ++free_col;
  std::vector<uint32_t> v(cols, 0);
  v[free_col] = 1;
  for (int i = 0; i < r; ++i)
    v[pivot_col[i]] = uint32_t((p - a[i][free_col]) % p);
  return v;
}

Rat rational_lift(uint32_t a, uint32_t p) {
  // Lagrange (Gauss) reduction on the lattice spanned by (p,0) and (a,1);
  // every (b,c) with b = c*a mod p is a lattice point, and the lift is the
  // shortest one.
  using I128 = __int128;
  I128 u0 = p, u1 = 0;      // u, the longer vector
  I128 v0 = a, v1 = 1;      // v
  auto norm = [](I128 x, I128 y) { return x * x + y * y; };
  while (true) {
    I128 nv = norm(v0, v1);
    if (nv == 0) throw LiftFailed();
    // r = u - round(<u,v>/<v,v>) * v
    I128 dot = u0 * v0 + u1 * v1;
    I128 q = (2 * dot + (dot >= 0 ? nv : -nv)) / (2 * nv);
    I128 r0 = u0 - q * v0, r1 = u1 - q * v1;
    if (norm(r0, r1) >= nv) break;
    u0 = v0; u1 = v1;
    v0 = r0; v1 = r1;
  }
  I128 b = v0, c = v1;
  if (c < 0) { b = -b; c = -c; }
  if (c == 0 || b * b >= I128(p) || c * c >= I128(p)) throw LiftFailed();
  Rat res{Int(int64_t(b)), Int(int64_t(c))};
  res.canonicalize();
  return res;
}

LdltResult cholesky(const QMat& q) {
  LdltProbe pr = cholesky_probe(q);
  if (!pr.positive_definite) throw NotPositiveDefinite();
  return std::move(pr.ldlt);
}

LdltProbe cholesky_probe(const QMat& q) {
  if (q.rows() != q.cols()) throw NonSquare();
  const int n = q.rows();
  LdltProbe out;
  QMat l = QMat::identity(n);
  QVec d(n);
  QMat a = q;  // working copy of the trailing submatrix
  for (int k = 0; k < n; ++k) {
    d[k] = a(k, k);
    if (d[k] <= 0) {
      // Witness: y with L^t y = e_k has y^t Q y = d_k <= 0.
      QVec y(n);
      y[k] = 1;
      for (int i = k - 1; i >= 0; --i) {
        Rat s = 0;
        for (int j = i + 1; j <= k; ++j) s += l(j, i) * y[j];
        y[i] = -s;
      }
      Int lc = 1;
      for (int i = 0; i < n; ++i)
        mpz_lcm(lc.get_mpz_t(), lc.get_mpz_t(), y[i].get_den().get_mpz_t());
      IVec w(n);
      for (int i = 0; i < n; ++i) {
        Rat v = y[i] * lc;
        w[i] = v.get_num();
      }
      make_primitive(w);
      out.positive_definite = false;
      out.witness = std::move(w);
      return out;
    }
    for (int i = k + 1; i < n; ++i) l(i, k) = a(i, k) / d[k];
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j <= i; ++j) {
        a(i, j) -= l(i, k) * a(j, k);
        a(j, i) = a(i, j);
      }
  }
  out.positive_definite = true;
  out.ldlt = LdltResult{std::move(l), std::move(d)};
  return out;
}

Int vec_content(const IVec& v) {
  Int g = 0;
  for (const Int& x : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  return g;
}

void make_primitive(IVec& v) {
  Int g = vec_content(v);
  if (g == 0 || g == 1) return;
  for (Int& x : v) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
}

void normalize_sign(IVec& v) {
  for (const Int& x : v) {
    if (x > 0) return;
    if (x < 0) {
      for (Int& y : v) y = -y;
      return;
    }
  }
}

QVec solve_linear(const QMat& a, const QVec& b) {
  if (a.rows() != a.cols() || int(b.size()) != a.rows()) throw MathError("bad system");
  const int n = a.rows();
  QMat m(n, n + 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = a(i, j);
    m(i, n) = b[i];
  }
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int i = c; i < n; ++i)
      if (m(i, c) != 0) { piv = i; break; }
    if (piv < 0) throw MathError("singular system");
    if (piv != c)
      for (int j = 0; j <= n; ++j) swap(m(piv, j), m(c, j));
    Rat inv = 1 / m(c, c);
    for (int j = c; j <= n; ++j) m(c, j) *= inv;
    for (int i = 0; i < n; ++i) {
      if (i == c || m(i, c) == 0) continue;
      Rat f = m(i, c);
      for (int j = c; j <= n; ++j) m(i, j) -= f * m(c, j);
    }
  }
  QVec x(n);
  for (int i = 0; i < n; ++i) x[i] = m(i, n);
  return x;
}

QMat inverse(const QMat& m) {
  if (m.rows() != m.cols()) throw NonSquare();
  const int n = m.rows();
  QMat a(n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = m(i, j);
    a(i, n + i) = 1;
  }
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int i = c; i < n; ++i)
      if (a(i, c) != 0) { piv = i; break; }
    if (piv < 0) throw MathError("singular matrix");
    if (piv != c)
      for (int j = 0; j < 2 * n; ++j) swap(a(piv, j), a(c, j));
    Rat inv = 1 / a(c, c);
    for (int j = c; j < 2 * n; ++j) a(c, j) *= inv;
    for (int i = 0; i < n; ++i) {
      if (i == c || a(i, c) == 0) continue;
      Rat f = a(i, c);
      for (int j = c; j < 2 * n; ++j) a(i, j) -= f * a(c, j);
    }
  }
  QMat r(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r(i, j) = a(i, n + j);
  return r;
}

std::string to_string(const QMat& m) {
  std::ostringstream os;
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) os << (j ? " " : "") << m(i, j);
    os << "\n";
  }
  return os.str();
}

}  // namespace pfe
