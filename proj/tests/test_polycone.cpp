#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <random>
#include <set>

#include "pfe/polycone.hpp"
#include "pfe/simplex.hpp"

using namespace pfe;

namespace {

std::mt19937 rng(20240915);

IVec iv(std::vector<long> v) {
  IVec out;
  for (long x : v) out.push_back(Int(x));
  return out;
}

std::vector<IVec> orthant3() {
  return {iv({1, 0, 0}), iv({0, 1, 0}), iv({0, 0, 1})};
}

std::vector<IVec> square_cone() {
  return {iv({1, 1, 1}), iv({1, 1, -1}), iv({1, -1, 1}), iv({1, -1, -1})};
}

// pointed full-dimensional cone: rays in the open halfspace x0 > 0
std::vector<IVec> random_cone(int n, int m) {
  std::uniform_int_distribution<int> first(1, 3), rest(-4, 4);
  while (true) {
    std::set<IVec> rays;
    for (int i = 0; i < m; ++i) {
      IVec v(n);
      v[0] = first(rng);
      for (int j = 1; j < n; ++j) v[j] = rest(rng);
      make_primitive(v);
      rays.insert(v);
    }
    std::vector<IVec> out(rays.begin(), rays.end());
    IMat mat(int(out.size()), n);
    for (size_t i = 0; i < out.size(); ++i)
      for (int j = 0; j < n; ++j) mat(int(i), j) = out[i][j];
    if (int(out.size()) >= n && rank(mat) == n) return out;
  }
}

Rat ray_dot(const IVec& a, const IVec& b) {
  Int s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return Rat(s);
}

}  // namespace

TEST_CASE("exact simplex") {
  // max 3x+2y st x+y<=4, x<=2 via slacks
  QMat a(2, 4);
  a(0, 0) = 1; a(0, 1) = 1; a(0, 2) = 1;
  a(1, 0) = 1; a(1, 3) = 1;
  QVec b{Rat(4), Rat(2)};
  QVec c{Rat(3), Rat(2), Rat(0), Rat(0)};
  LpSolution s = lp_solve_standard(a, b, c);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.objective == 10);
  CHECK(s.x[0] == 2);
  CHECK(s.x[1] == 2);

  // infeasible: x = -1, x >= 0
  QMat a2(1, 1);
  a2(0, 0) = 1;
  CHECK(lp_solve_standard(a2, {Rat(-1)}, {Rat(0)}).status == LpStatus::Infeasible);

  // unbounded: max x st x - s = 1
  QMat a3(1, 2);
  a3(0, 0) = 1; a3(0, 1) = -1;
  CHECK(lp_solve_standard(a3, {Rat(1)}, {Rat(1), Rat(0)}).status ==
        LpStatus::Unbounded);
}

TEST_CASE("dual description of named cones") {
  // output is sorted lexicographically
  std::vector<IVec> self{iv({0, 0, 1}), iv({0, 1, 0}), iv({1, 0, 0})};
  CHECK(dual_description(3, orthant3()) == self);

  // non-extreme input ray is dropped by the roundtrip
  std::vector<IVec> redundant{iv({1, 0}), iv({1, 1}), iv({0, 1})};
  std::vector<IVec> dd = dual_description(2, redundant);
  CHECK(dd == std::vector<IVec>{iv({0, 1}), iv({1, 0})});

  std::vector<IVec> sq = dual_description(3, square_cone());
  std::vector<IVec> expect{iv({1, -1, 0}), iv({1, 0, -1}), iv({1, 0, 1}),
                           iv({1, 1, 0})};
  CHECK(sq == expect);

  CHECK_THROWS_AS(dual_description(3, {iv({1, 0, 0}), iv({0, 1, 0})}),
                  NotFullDim);
  CHECK_THROWS_AS(dual_description(2, {iv({1, 0}), iv({-1, 0}), iv({0, 1})}),
                  NotPointed);
}

TEST_CASE("dual description roundtrip on random cones") {
  for (int t = 0; t < 40; ++t) {
    int n = 2 + t % 4;
    std::vector<IVec> rays = random_cone(n, n + 2 + t % 5);
    std::vector<IVec> facets = dual_description(n, rays);
    // every ray satisfies every facet
    for (const IVec& f : facets)
      for (const IVec& r : rays) CHECK(ray_dot(f, r) >= 0);
    std::vector<IVec> back = dual_description(n, facets);
    // roundtrip returns exactly the extreme rays, a subset of the input
    for (const IVec& r : back)
      CHECK(std::find(rays.begin(), rays.end(), r) != rays.end());
    // each extreme ray lies on >= n-1 independent facets: cross-check via a
    // third dualization
    CHECK(dual_description(n, back) == facets);
  }
}

TEST_CASE("facet incidence") {
  Cone c{3, orthant3()};
  FaceSet inc = facet_incidence(c, iv({1, 0, 0}));
  CHECK(inc.elements() == std::vector<int>{1, 2});
  CHECK_THROWS_AS(facet_incidence(c, iv({1, 1, 1})), NotSupporting);
  CHECK_THROWS_AS(facet_incidence(c, iv({-1, 0, 0})), NotSupporting);
}

TEST_CASE("ridge normal and flip on the orthant") {
  Cone c{3, orthant3()};
  FaceSet f = facet_incidence(c, iv({1, 0, 0}));  // rays e2, e3
  FaceSet ridge(3);
  ridge.set(2);  // ray e3
  IVec rn = ridge_normal_from_incidence(c, f, ridge);
  CHECK(rn == iv({0, 1, 0}));
  CHECK(flip(c, f, iv({1, 0, 0}), rn) == iv({0, 1, 0}));

  // ridge incidence equal to the whole facet has no normal
  CHECK_THROWS_AS(ridge_normal_from_incidence(c, f, f), BadIncidence);
}

TEST_CASE("flip is an involution across every ridge") {
  for (int t = 0; t < 12; ++t) {
    int n = 3 + t % 2;
    std::vector<IVec> rays = random_cone(n, n + 3 + t % 3);
    Cone c{n, rays};
    std::vector<IVec> facets = dual_description(n, rays);
    for (const IVec& fn : facets) {
      FaceSet f = facet_incidence(c, fn);
      // ridges of this facet: facets of the facet's subcone, found by brute
      // force over pairs of facets
      for (const IVec& gn : facets) {
        if (gn == fn) continue;
        FaceSet g = facet_incidence(c, gn);
        FaceSet ridge(int(rays.size()));
        std::vector<IVec> common;
        for (int e : f.elements())
          if (g.test(e)) {
            ridge.set(e);
            common.push_back(rays[e]);
          }
        if (common.empty()) continue;
        IMat mat(int(common.size()), n);
        for (size_t i = 0; i < common.size(); ++i)
          for (int j = 0; j < n; ++j) mat(int(i), j) = common[i][j];
        if (rank(mat) != n - 2) continue;
        IVec rn = ridge_normal_from_incidence(c, f, ridge);
        IVec flipped = flip(c, f, fn, rn);
        CHECK(flipped == gn);
        // and back again
        IVec rn2 = ridge_normal_from_incidence(c, g, ridge);
        CHECK(flip(c, g, gn, rn2) == fn);
      }
    }
  }
}

namespace {

void check_adm_matches_dd(const Cone& c, const PermGroup& g,
                          const AdmOptions& opts) {
  std::vector<IVec> facets = dual_description(c.dim, c.rays);
  FacetOrbitList res = adm_facet_orbits(c, g, opts);
  CHECK(res.total == Int(long(facets.size())));
  std::set<FaceSet> keys;
  for (const FacetOrbit& o : res.orbits)
    keys.insert(canonical_image(g, o.incidence));
  CHECK(keys.size() == res.orbits.size());
  for (const IVec& fn : facets)
    CHECK(keys.count(canonical_image(g, facet_incidence(c, fn))) == 1);
}

}  // namespace

TEST_CASE("adm agrees with plain dual description") {
  // low thresholds force flipping and recursion on small instances
  AdmOptions hard;
  hard.direct_threshold = 0;
  hard.symmetry_threshold = 2;
  for (int t = 0; t < 30; ++t) {
    int n = 2 + t % 5;
    std::vector<IVec> rays = random_cone(n, n + 2 + t % 6);
    Cone c{n, rays};
    PermGroup triv = PermGroup::trivial(int(rays.size()));
    check_adm_matches_dd(c, triv, AdmOptions{});
    check_adm_matches_dd(c, triv, hard);
    PermGroup lin = linear_automorphisms(rays);
    check_adm_matches_dd(c, lin, AdmOptions{});
    check_adm_matches_dd(c, lin, hard);
  }
}

TEST_CASE("adm on symmetric cones") {
  Cone sq{3, square_cone()};
  PermGroup g = linear_automorphisms(square_cone());
  CHECK(g.order() == 8);
  FacetOrbitList res = adm_facet_orbits(sq, g);
  CHECK(res.total == 4);
  CHECK(res.orbits.size() == 1);

  Cone orth{3, orthant3()};
  FacetOrbitList res2 = adm_facet_orbits(orth, linear_automorphisms(orthant3()));
  CHECK(res2.total == 3);
  CHECK(res2.orbits.size() == 1);
}

TEST_CASE("balinski certified stop") {
  Cone sq{3, square_cone()};
  PermGroup g = linear_automorphisms(square_cone());
  CHECK(balinski_certified_stop(sq, {}, g));

  IVec fn = iv({1, 1, 0});
  FaceSet inc = facet_incidence(sq, fn);
  // a single orbit of size 4 in dimension 3 cannot be skipped
  CHECK(!balinski_certified_stop(sq, {{inc, fn, Int(4)}}, g));
  // one untreated facet (orbit size 1 <= n-2) can be skipped
  PermGroup triv = PermGroup::trivial(4);
  CHECK(balinski_certified_stop(sq, {{inc, fn, Int(1)}}, triv));
}

TEST_CASE("saving bank stores and transports results") {
  std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "pfe_bank_test";
  std::filesystem::remove_all(dir);

  AdmOptions opts;
  opts.bank_cost_threshold = 0.0;  // bank everything
  {
    SavingBank bank(dir.string());
    opts.bank = &bank;
    std::vector<IVec> rays = random_cone(4, 9);
    Cone c{4, rays};
    PermGroup g = linear_automorphisms(rays);
    FacetOrbitList res = adm_facet_orbits(c, g, opts);
    CHECK(bank.size() >= 1);
    // direct hit
    auto hit = bank.lookup(c, g);
    REQUIRE(hit.has_value());
    CHECK(hit->total == res.total);
    CHECK(hit->orbits.size() == res.orbits.size());

    // hit transports through an invertible integer map and a ray shuffle
    IMat u = IMat::identity(4);
    u(0, 1) = 2;
    u(2, 3) = -1;
    u(1, 2) = 1;
    std::vector<IVec> img;
    for (const IVec& v : rays) img.push_back(mul(u, v));
    std::shuffle(img.begin(), img.end(), rng);
    Cone c2{4, img};
    auto hit2 = bank.lookup(c2, linear_automorphisms(img));
    REQUIRE(hit2.has_value());
    CHECK(hit2->total == res.total);
    CHECK(hit2->orbits.size() == res.orbits.size());
    std::vector<IVec> facets = dual_description(4, img);
    std::set<FaceSet> keys;
    PermGroup g2 = linear_automorphisms(img);
    for (const FacetOrbit& o : hit2->orbits)
      keys.insert(canonical_image(g2, o.incidence));
    for (const IVec& fn : facets)
      CHECK(keys.count(canonical_image(g2, facet_incidence(c2, fn))) == 1);

    // lookup under a smaller group splits orbits but covers everything
    PermGroup triv = PermGroup::trivial(int(img.size()));
    auto hit3 = bank.lookup(c2, triv);
    REQUIRE(hit3.has_value());
    CHECK(hit3->total == Int(long(facets.size())));
    CHECK(hit3->orbits.size() == facets.size());

    // unseen cone misses
    CHECK(!bank.lookup(Cone{3, orthant3()}, PermGroup::trivial(3)).has_value());

    // reload from disk
    SavingBank bank2(dir.string());
    CHECK(bank2.size() == bank.size());
    auto hit4 = bank2.lookup(c, g);
    REQUIRE(hit4.has_value());
    CHECK(hit4->total == res.total);
  }
  std::filesystem::remove_all(dir);
}
