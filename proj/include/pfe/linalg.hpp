#ifndef PFE_LINALG_HPP
#define PFE_LINALG_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace pfe {

using Int = mpz_class;
using Rat = mpq_class;

struct MathError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonSquare : MathError {
  NonSquare() : MathError("matrix is not square") {}
};
struct WrongCorank : MathError {
  WrongCorank() : MathError("kernel is not one-dimensional") {}
};
struct NotPositiveDefinite : MathError {
  NotPositiveDefinite() : MathError("matrix is not positive definite") {}
};
struct LiftFailed : MathError {
  LiftFailed() : MathError("rational lifting failed") {}
};

/// Dense row-major matrix over the rationals.
class QMat {
public:
  QMat() : rows_(0), cols_(0) {}
  QMat(int rows, int cols) : rows_(rows), cols_(cols), e_(size_t(rows) * cols) {}
  QMat(int rows, int cols, std::vector<Rat> entries)
      : rows_(rows), cols_(cols), e_(std::move(entries)) {
    if (e_.size() != size_t(rows) * cols) throw MathError("entry count mismatch");
  }

  static QMat identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Rat& operator()(int i, int j) { return e_[size_t(i) * cols_ + j]; }
  const Rat& operator()(int i, int j) const { return e_[size_t(i) * cols_ + j]; }

  bool operator==(const QMat& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && e_ == o.e_;
  }

  QMat transpose() const;
  QMat operator*(const QMat& o) const;
  QMat operator+(const QMat& o) const;
  QMat operator-(const QMat& o) const;
  QMat scaled(const Rat& s) const;

private:
  int rows_, cols_;
  std::vector<Rat> e_;
};

/// Dense row-major matrix over the integers.
class IMat {
public:
  IMat() : rows_(0), cols_(0) {}
  IMat(int rows, int cols) : rows_(rows), cols_(cols), e_(size_t(rows) * cols) {}
  IMat(int rows, int cols, std::vector<Int> entries)
      : rows_(rows), cols_(cols), e_(std::move(entries)) {
    if (e_.size() != size_t(rows) * cols) throw MathError("entry count mismatch");
  }

  static IMat identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Int& operator()(int i, int j) { return e_[size_t(i) * cols_ + j]; }
  const Int& operator()(int i, int j) const { return e_[size_t(i) * cols_ + j]; }

  bool operator==(const IMat& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && e_ == o.e_;
  }

  IMat transpose() const;
  IMat operator*(const IMat& o) const;
  QMat to_rational() const;

private:
  int rows_, cols_;
  std::vector<Int> e_;
};

using IVec = std::vector<Int>;
using QVec = std::vector<Rat>;

/// Rank over the rationals, fraction-free elimination.
int rank(const QMat& m);
int rank(const IMat& m);

/// Exact determinant via Bareiss-style elimination. Throws NonSquare.
Rat det(const QMat& m);

/// Column-style Hermite normal form: returns H = M * V with V unimodular,
/// H lower-triangular-ish with positive pivots and reduced entries left of them.
/// Zero columns are dropped, so H has rank(M) columns.
IMat hnf(const IMat& m);

/// A primitive integer vector spanning the kernel of M (pre: corank exactly 1).
IVec kernel_vector(const QMat& m);
IVec kernel_vector(const IMat& m);

/// Largest prime below 2^31; all mod-p kernel work is done over F_p.
inline constexpr uint32_t kModPrime = 2147483647u;

/// Kernel vector over F_p; empty result if corank != 1 mod p.
std::vector<uint32_t> kernel_vector_mod_p(const IMat& m, uint32_t p = kModPrime);

/// Lift a mod-p residue to a small rational b/c with |b|,|c| < sqrt(p).
/// Throws LiftFailed if no such pair exists.
Rat rational_lift(uint32_t a, uint32_t p = kModPrime);

struct LdltResult {
  QMat lower;       // unit lower triangular
  QVec diag;        // positive iff input positive definite
};

/// Exact LDL^T decomposition of a symmetric matrix; throws NotPositiveDefinite
/// as soon as a nonpositive pivot appears.
LdltResult cholesky(const QMat& q);

/// LDL^T that does not throw: runs to the first nonpositive pivot and reports it.
/// pivot_index == -1 means positive definite. On failure, `witness` is an
/// integer vector y with y^t Q y <= 0.
struct LdltProbe {
  bool positive_definite;
  LdltResult ldlt;     // valid only when positive definite
  IVec witness;        // valid only when not positive definite
};
LdltProbe cholesky_probe(const QMat& q);

// Helpers shared across modules.
Int vec_content(const IVec& v);            // gcd of entries (0 for zero vector)
void make_primitive(IVec& v);              // divide by content; no-op on zero
void normalize_sign(IVec& v);              // first nonzero entry positive
QVec solve_linear(const QMat& a, const QVec& b);  // unique solution; throws if singular
QMat inverse(const QMat& m);

std::string to_string(const QMat& m);

}  // namespace pfe

#endif
