#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "pfe/permgrp.hpp"

using namespace pfe;

namespace {

std::mt19937 rng(4242);

Perm random_perm(int m) {
  Perm p = perm_identity(m);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

PermGroup random_group(int m, int ngens) {
  std::vector<Perm> g;
  for (int i = 0; i < ngens; ++i) g.push_back(random_perm(m));
  return PermGroup(m, std::move(g));
}

FaceSet random_set(int m) {
  FaceSet s(m);
  for (int i = 0; i < m; ++i)
    if (rng() & 1) s.set(i);
  return s;
}

// All group elements by brute force BFS (small groups only).
std::set<Perm> all_elements(const PermGroup& g) {
  std::set<Perm> seen{perm_identity(g.degree())};
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<Perm> cur(seen.begin(), seen.end());
    for (const Perm& a : cur)
      for (const Perm& s : g.generators())
        if (seen.insert(perm_compose(s, a)).second) grew = true;
  }
  return seen;
}

}  // namespace

TEST_CASE("perm primitives") {
  Perm a{1, 2, 0}, b{1, 0, 2};
  CHECK(perm_compose(a, perm_inverse(a)) == perm_identity(3));
  CHECK(perm_compose(a, b) == Perm{2, 1, 0});
  FaceSet s(4, {0, 2});
  CHECK(s.count() == 2);
  CHECK(s.elements() == std::vector<int>{0, 2});
  Perm c{1, 2, 3, 0};
  CHECK(s.apply(c) == FaceSet(4, {1, 3}));
  CHECK(FaceSet(4, {0, 3}) < FaceSet(4, {1, 2}));
  CHECK(FaceSet(4, {0, 1}) < FaceSet(4, {0, 2}));
}

TEST_CASE("group order") {
  CHECK(PermGroup::symmetric(3).order() == 6);
  CHECK(PermGroup::symmetric(6).order() == 720);
  CHECK(PermGroup::trivial(5).order() == 1);
  // dihedral group of the square: rotation + reflection
  PermGroup d4(4, {{1, 2, 3, 0}, {1, 0, 3, 2}});
  CHECK(d4.order() == 8);
  // order via brute force on random groups
  for (int t = 0; t < 10; ++t) {
    PermGroup g = random_group(5, 2);
    CHECK(g.order() == Int(long(all_elements(g).size())));
  }
}

TEST_CASE("membership") {
  PermGroup a4(4, {{1, 2, 0, 3}, {0, 2, 3, 1}});  // alternating group
  CHECK(a4.order() == 12);
  CHECK(a4.contains(perm_identity(4)));
  CHECK(a4.contains(Perm{1, 0, 3, 2}));
  CHECK_FALSE(a4.contains(Perm{1, 0, 2, 3}));  // odd permutation
  for (int t = 0; t < 10; ++t) {
    PermGroup g = random_group(6, 2);
    auto elems = all_elements(g);
    for (int u = 0; u < 10; ++u) {
      Perm p = random_perm(6);
      CHECK(g.contains(p) == (elems.count(p) > 0));
    }
  }
}

TEST_CASE("point stabilizer") {
  PermGroup s4 = PermGroup::symmetric(4);
  CHECK(s4.point_stabilizer(2).order() == 6);
  PermGroup t = PermGroup::trivial(3);
  CHECK(t.point_stabilizer(0).order() == 1);
  for (int t2 = 0; t2 < 10; ++t2) {
    PermGroup g = random_group(6, 2);
    int p = int(rng() % 6);
    PermGroup st = g.point_stabilizer(p);
    for (const Perm& q : st.generators()) CHECK(q[p] == p);
    CHECK(g.order() == st.order() * Int(long(g.point_orbit(p).size())));
  }
}

TEST_CASE("orbit of sets") {
  PermGroup s3 = PermGroup::symmetric(3);
  auto o = orbit(s3, FaceSet(3, {0}));
  CHECK(o.size() == 3);
  auto o2 = orbit(PermGroup::trivial(3), FaceSet(3, {1}));
  REQUIRE(o2.size() == 1);
  CHECK(o2[0] == FaceSet(3, {1}));
  CHECK(orbit(PermGroup::symmetric(4), FaceSet(4, {0, 1})).size() == 6);
  CHECK_THROWS_AS(orbit(PermGroup::symmetric(12), FaceSet(12, {0, 1, 2, 3, 4, 5}), 100),
                  OrbitTooLarge);
}

TEST_CASE("set stabilizer") {
  PermGroup s3 = PermGroup::symmetric(3);
  CHECK(set_stabilizer(s3, FaceSet(3, {0, 1})).order() == 2);
  PermGroup t = PermGroup::trivial(4);
  CHECK(set_stabilizer(t, FaceSet(4, {0, 2})).order() == 1);
  // orbit-stabilizer on random groups
  for (int t2 = 0; t2 < 20; ++t2) {
    PermGroup g = random_group(7, 2);
    FaceSet s = random_set(7);
    PermGroup st = set_stabilizer(g, s);
    for (const Perm& q : st.generators()) CHECK(s.apply(q) == s);
    CHECK(g.order() == st.order() * Int(long(orbit(g, s).size())));
  }
}

TEST_CASE("equivalence of sets") {
  PermGroup s3 = PermGroup::symmetric(3);
  auto r = are_equivalent(s3, FaceSet(3, {0}), FaceSet(3, {2}));
  REQUIRE(r.has_value());
  CHECK(FaceSet(3, {0}).apply(*r) == FaceSet(3, {2}));
  CHECK_FALSE(are_equivalent(PermGroup::trivial(3), FaceSet(3, {0}), FaceSet(3, {1})));
  for (int t = 0; t < 30; ++t) {
    PermGroup g = random_group(7, 2);
    FaceSet s = random_set(7), u = random_set(7);
    auto eq = are_equivalent(g, s, u);
    bool same_can = canonical_image(g, s) == canonical_image(g, u);
    CHECK(eq.has_value() == same_can);
    if (eq) CHECK(s.apply(*eq) == u);
  }
}

TEST_CASE("canonical image basics") {
  FaceSet s(5, {1, 3});
  CHECK(canonical_image(PermGroup::trivial(5), s) == s);
  CHECK(canonical_image(PermGroup::symmetric(5), s) == FaceSet(5, {0, 1}));
  CHECK(canonical_image(PermGroup::symmetric(6), FaceSet(6, {2, 4, 5})) ==
        FaceSet(6, {0, 1, 2}));
}

TEST_CASE("canonical image is orbit-constant and idempotent") {
  for (int t = 0; t < 1000; ++t) {
    PermGroup g = random_group(8, 2);
    FaceSet s = random_set(8);
    FaceSet c = canonical_image(g, s);
    CHECK(canonical_image(g, c) == c);
    // random sigma in g as a product of generators
    Perm sigma = perm_identity(8);
    for (int k = 0; k < 4; ++k)
      if (!g.generators().empty())
        sigma = perm_compose(g.generators()[rng() % g.generators().size()], sigma);
    CHECK(canonical_image(g, s.apply(sigma)) == c);
  }
}

TEST_CASE("double coset split basics") {
  PermGroup s3 = PermGroup::symmetric(3);
  auto r = double_coset_split(s3, s3, FaceSet(3, {0}));
  CHECK(r.size() == 1);
  auto r2 = double_coset_split(s3, PermGroup::trivial(3), FaceSet(3, {0}));
  CHECK(r2.size() == 3);
}

TEST_CASE("double coset split covers the orbit") {
  for (int t = 0; t < 25; ++t) {
    PermGroup g1 = random_group(6, 2);
    // subgroup: point stabilizer (guaranteed <= g1)
    PermGroup g2 = g1.point_stabilizer(int(rng() % 6));
    FaceSet s = random_set(6);
    auto reps = double_coset_split(g1, g2, s);
    // union of g2-orbits of reps == g1-orbit of s, pairwise disjoint
    std::set<FaceSet> full;
    for (const FaceSet& f : orbit(g1, s)) full.insert(f);
    std::set<FaceSet> got;
    for (const FaceSet& r : reps) {
      for (const FaceSet& f : orbit(g2, r)) {
        CHECK(!got.count(f));
        got.insert(f);
      }
    }
    CHECK(got == full);
  }
}
