#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "pfe/linalg.hpp"

using namespace pfe;

namespace {

QMat qmat(int r, int c, std::vector<long> v) {
  QMat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = v[i * c + j];
  return m;
}

IMat imat(int r, int c, std::vector<long> v) {
  IMat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = v[i * c + j];
  return m;
}

std::mt19937 rng(12345);

IMat random_imat(int r, int c, int lo = -5, int hi = 5) {
  std::uniform_int_distribution<int> d(lo, hi);
  IMat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = d(rng);
  return m;
}

// Random unimodular matrix as a product of elementary row operations.
IMat random_unimodular(int n, int steps = 12) {
  std::uniform_int_distribution<int> pick(0, n - 1), coef(-3, 3);
  IMat u = IMat::identity(n);
  for (int s = 0; s < steps; ++s) {
    int i = pick(rng), j = pick(rng);
    if (i == j) continue;
    Int c = coef(rng);
    for (int k = 0; k < n; ++k) u(i, k) += c * u(j, k);
  }
  return u;
}

}  // namespace

TEST_CASE("rank basics") {
  CHECK(rank(QMat::identity(2)) == 2);
  CHECK(rank(QMat(3, 3)) == 0);
  CHECK(rank(qmat(3, 2, {1, 0, 2, 0, 0, 0})) == 1);
}

TEST_CASE("det basics") {
  CHECK(det(QMat::identity(3)) == Rat(1));
  CHECK(det(qmat(2, 2, {2, -1, -1, 2})) == Rat(3));
  CHECK(det(qmat(2, 2, {1, 2, 2, 4})) == Rat(0));
  CHECK_THROWS_AS(det(QMat(2, 3)), NonSquare);
}

TEST_CASE("det multiplicative and unimodular") {
  for (int t = 0; t < 20; ++t) {
    IMat a = random_imat(4, 4), b = random_imat(4, 4);
    CHECK(det((a * b).to_rational()) == det(a.to_rational()) * det(b.to_rational()));
  }
  for (int t = 0; t < 20; ++t) {
    Rat d = det(random_unimodular(5).to_rational());
    CHECK((d == 1 || d == -1));
  }
}

TEST_CASE("hnf identity and empty") {
  CHECK(hnf(IMat::identity(4)) == IMat::identity(4));
  IMat e(0, 0);
  CHECK(hnf(e).rows() == 0);
}

TEST_CASE("hnf lattice of index 2") {
  // columns (2,0),(0,2),(1,1): index-2 sublattice of Z^2
  IMat m = imat(2, 3, {2, 0, 1, 0, 2, 1});
  IMat h = hnf(m);
  REQUIRE(h.cols() == 2);
  Rat d = det(h.to_rational());
  CHECK(abs(d.get_num()) == 2);
}

TEST_CASE("hnf idempotent and span-preserving") {
  for (int t = 0; t < 30; ++t) {
    IMat m = random_imat(3, 5);
    IMat h = hnf(m);
    CHECK(hnf(h) == h);
    // every column of m must be an integer combination of h's columns and
    // vice versa (checked via HNF of the concatenation)
    IMat cat(3, m.cols() + h.cols());
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < m.cols(); ++j) cat(i, j) = m(i, j);
      for (int j = 0; j < h.cols(); ++j) cat(i, m.cols() + j) = h(i, j);
    }
    CHECK(hnf(cat) == h);
  }
}

TEST_CASE("kernel_vector") {
  CHECK(kernel_vector(qmat(1, 2, {1, 0})) == IVec{Int(0), Int(1)});
  CHECK(kernel_vector(qmat(2, 3, {1, 1, 0, 0, 1, 1})) == IVec{Int(1), Int(-1), Int(1)});
  CHECK_THROWS_AS(kernel_vector(QMat::identity(2)), WrongCorank);
}

TEST_CASE("rational lift") {
  const uint32_t p = kModPrime;
  uint64_t half = (uint64_t(p) + 1) / 2;
  CHECK(rational_lift(uint32_t(half)) == Rat(1, 2));
  CHECK(rational_lift(3) == Rat(3));
}

TEST_CASE("rational lift roundtrip on random small fractions") {
  // |b|, c below sqrt(p/2): the regime where the lift is unique.
  std::uniform_int_distribution<long> num(-32000, 32000);
  std::uniform_int_distribution<long> den(1, 32000);
  const uint64_t p = kModPrime;
  for (int t = 0; t < 200; ++t) {
    long b = num(rng), c = den(rng);
    Rat x(b, c);
    x.canonicalize();
    // residue of x mod p
    Int n = x.get_num() % long(p), d = x.get_den();
    if (n < 0) n += long(p);
    uint64_t dinv = 1, base = d.get_ui() % p, e = p - 2;
    while (e) {
      if (e & 1) dinv = dinv * base % p;
      base = base * base % p;
      e >>= 1;
    }
    uint32_t a = uint32_t(n.get_ui() * dinv % p);
    CHECK(rational_lift(a) == x);
  }
}

TEST_CASE("mod-p kernel agrees with exact kernel") {
  int done = 0;
  while (done < 100) {
    // random corank-1 integer matrix: (c-1) random rows spanning c-1 dims
    int c = 3 + int(rng() % 4);
    IMat m = random_imat(c - 1, c);
    if (rank(m) != c - 1) continue;
    ++done;
    IVec exact = kernel_vector(m);
    auto modp = kernel_vector_mod_p(m);
    REQUIRE(!modp.empty());
    // lift and compare after clearing denominators
    QVec lifted(c);
    for (int j = 0; j < c; ++j) lifted[j] = rational_lift(modp[j]);
    Int l = 1;
    for (auto& x : lifted) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den().get_mpz_t());
    IVec iv(c);
    for (int j = 0; j < c; ++j) {
      Rat v = lifted[j] * l;
      iv[j] = v.get_num();
    }
    make_primitive(iv);
    normalize_sign(iv);
    CHECK(iv == exact);
  }
}

TEST_CASE("cholesky ldlt") {
  auto r = cholesky(QMat::identity(3));
  CHECK(r.diag == QVec{Rat(1), Rat(1), Rat(1)});

  auto r2 = cholesky(qmat(2, 2, {2, -1, -1, 2}));
  CHECK(r2.diag == QVec{Rat(2), Rat(3, 2)});

  CHECK_THROWS_AS(cholesky(qmat(2, 2, {1, 2, 2, 1})), NotPositiveDefinite);
}

TEST_CASE("cholesky witness certifies nonpositive value") {
  for (int t = 0; t < 30; ++t) {
    IMat a = random_imat(4, 4);
    QMat s = (a.transpose() * a).to_rational();
    s(2, 2) -= 20;  // break definiteness most of the time
    s(2, 2) += 0;
    auto pr = cholesky_probe(s);
    if (!pr.positive_definite) {
      Rat v = 0;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) v += Rat(pr.witness[i] * pr.witness[j]) * s(i, j);
      CHECK(v <= 0);
    }
  }
}

TEST_CASE("cholesky matches leading principal minors") {
  for (int t = 0; t < 30; ++t) {
    IMat a = random_imat(4, 4, -3, 3);
    QMat s = a.to_rational() + a.transpose().to_rational();
    bool pd = true;
    for (int k = 1; k <= 4 && pd; ++k) {
      QMat lead(k, k);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) lead(i, j) = s(i, j);
      if (det(lead) <= 0) pd = false;
    }
    CHECK(cholesky_probe(s).positive_definite == pd);
  }
}
