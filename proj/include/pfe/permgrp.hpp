#ifndef PFE_PERMGRP_HPP
#define PFE_PERMGRP_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "pfe/linalg.hpp"

namespace pfe {

struct OrbitTooLarge : MathError {
  OrbitTooLarge() : MathError("orbit exceeds the configured cap") {}
};

/// Permutation on {0..m-1} as an image list.
using Perm = std::vector<int>;

Perm perm_identity(int m);
Perm perm_compose(const Perm& a, const Perm& b);  // (a*b)(x) = a(b(x))
Perm perm_inverse(const Perm& a);

/// Subset of {0..m-1}, kept as a bitset with a fixed universe size.
class FaceSet {
public:
  FaceSet() = default;
  explicit FaceSet(int m) : m_(m), w_((m + 63) / 64, 0) {}
  FaceSet(int m, std::initializer_list<int> pts) : FaceSet(m) {
    for (int p : pts) set(p);
  }

  int universe() const { return m_; }
  bool test(int i) const { return (w_[i >> 6] >> (i & 63)) & 1; }
  void set(int i) { w_[i >> 6] |= uint64_t(1) << (i & 63); }
  void reset(int i) { w_[i >> 6] &= ~(uint64_t(1) << (i & 63)); }
  int count() const;
  std::vector<int> elements() const;

  FaceSet apply(const Perm& s) const;  // {s(i) : i in this}

  bool operator==(const FaceSet& o) const { return m_ == o.m_ && w_ == o.w_; }
  bool operator<(const FaceSet& o) const;  // lex order on sorted elements

private:
  int m_ = 0;
  std::vector<uint64_t> w_;
};

/// Permutation group given by generators; base and strong generating set built
/// on first use (deterministic Schreier-Sims) and shared afterwards.
class PermGroup {
public:
  PermGroup() = default;
  PermGroup(int degree, std::vector<Perm> gens);

  static PermGroup trivial(int degree);
  static PermGroup symmetric(int degree);

  int degree() const { return degree_; }
  const std::vector<Perm>& generators() const { return gens_; }

  Int order() const;
  bool contains(const Perm& p) const;

  /// Pointwise stabilizer of a single point.
  PermGroup point_stabilizer(int p) const;

  /// Orbit of a point with transversal: reps[x] maps p to x.
  std::map<int, Perm> point_orbit(int p) const;

  struct Bsgs;

private:
  struct Lazy;
  const Bsgs& bsgs() const;

  int degree_ = 0;
  std::vector<Perm> gens_;
  mutable std::shared_ptr<Lazy> lazy_;  // shared cache: copies reuse the BSGS
};

constexpr long kOrbitCap = 10000000L;

std::vector<FaceSet> orbit(const PermGroup& g, const FaceSet& s,
                           long cap = kOrbitCap);
PermGroup set_stabilizer(const PermGroup& g, const FaceSet& s);
std::optional<Perm> are_equivalent(const PermGroup& g, const FaceSet& s,
                                   const FaceSet& t);
FaceSet canonical_image(const PermGroup& g, const FaceSet& s);
std::vector<FaceSet> double_coset_split(const PermGroup& g1,
                                        const PermGroup& g2, const FaceSet& s);

}  // namespace pfe

#endif
