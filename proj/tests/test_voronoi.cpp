#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "pfe/canonical.hpp"
#include "pfe/voronoi.hpp"

using namespace pfe;

namespace {

std::mt19937 rng(4242);

PQF form(int d, std::vector<long> v) {
  QMat m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = v[i * d + j];
  return PQF(std::move(m));
}

PQF d4() {
  return form(4, {2, -1, 0, 0, -1, 2, -1, -1, 0, -1, 2, 0, 0, -1, 0, 2});
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("root forms") {
  PQF a2 = root_form(2);
  CHECK(a2.gram() == form(2, {2, -1, -1, 2}).gram());
  PQF a3 = root_form(3);
  MinData md = minimal_vectors(a3);
  CHECK(md.lambda1 == 2);
  CHECK(md.vectors.size() == 6);
  for (int d = 2; d <= 6; ++d) CHECK(is_perfect(root_form(d)));
}

TEST_CASE("symmetric flattening and dyad pairing") {
  std::uniform_int_distribution<int> coef(-5, 5);
  for (int t = 0; t < 50; ++t) {
    int d = 2 + t % 4;
    QMat s(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        s(i, j) = coef(rng);
        s(j, i) = s(i, j);
      }
    IVec flat = sym_flatten(s);
    CHECK(sym_unflatten(flat, d) == s);
    IVec x(d);
    for (int i = 0; i < d; ++i) x[i] = coef(rng);
    IVec a = dyad_normal(x);
    Int dot = 0;
    for (size_t k = 0; k < a.size(); ++k) dot += a[k] * flat[k];
    Rat xsx = 0;  // x^t S x
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) xsx += Rat(x[i]) * s(i, j) * Rat(x[j]);
    CHECK(Rat(dot) == xsx);
  }
}

TEST_CASE("tangent cone") {
  Cone c = tangent_cone(root_form(2));
  CHECK(c.dim == 3);
  CHECK(c.rays.size() == 3);
  // facet count of the tangent cone equals |Min|/2
  MinData md = minimal_vectors(root_form(2));
  std::vector<IVec> dyads;
  for (const IVec& x : md.vectors) dyads.push_back(dyad_normal(x));
  for (const IVec& a : dyads) {
    int tight = 0;
    for (const IVec& r : c.rays) {
      Int dot = 0;
      for (size_t k = 0; k < a.size(); ++k) dot += a[k] * r[k];
      CHECK(dot >= 0);
      if (dot == 0) ++tight;
    }
    CHECK(tight >= 2);  // each minimal pair supports a facet
  }
  CHECK_THROWS_AS(tangent_cone(PQF(QMat::identity(2))), NotPerfect);
}

TEST_CASE("neighbour form contract") {
  PQF a2 = root_form(2);
  Rat lambda = minimal_vectors(a2).lambda1;
  std::set<IVec> old_min;
  for (const IVec& v : minimal_vectors(a2).vectors) old_min.insert(v);
  uint64_t a2hash = canonical_pqf(a2).hash;
  for (const IVec& ray : tangent_cone(a2).rays) {
    PQF nb = neighbour_form(a2, ray);
    MinData md = minimal_vectors(nb);
    CHECK(md.lambda1 == lambda);
    bool fresh = false;
    for (const IVec& v : md.vectors)
      if (!old_min.count(v)) fresh = true;
    CHECK(fresh);
    // in the plane every neighbour of the hexagonal form is hexagonal again
    CHECK(canonical_pqf(nb).hash == a2hash);
  }
}

TEST_CASE("neighbours with and without symmetry") {
  PQF a2 = root_form(2);
  std::vector<Neighbour> sym = neighbours(a2, true);
  CHECK(sym.size() == 1);
  CHECK(sym[0].orbit_size == 3);
  std::vector<Neighbour> plain = neighbours(a2, false);
  CHECK(plain.size() == 3);
  for (int d = 3; d <= 4; ++d) {
    for (const PQF& q : {root_form(d), d == 4 ? d4() : root_form(d)}) {
      std::vector<Neighbour> s = neighbours(q, true);
      std::vector<Neighbour> p = neighbours(q, false);
      Int total = 0;
      std::set<uint64_t> cs, cp;
      for (const Neighbour& x : s) {
        total += x.orbit_size;
        cs.insert(canonical_pqf(x.form).hash);
      }
      for (const Neighbour& x : p) cp.insert(canonical_pqf(x.form).hash);
      CHECK(total == Int(long(p.size())));
      CHECK(cs == cp);
    }
  }
}

TEST_CASE("automorphism orders") {
  CHECK(aut_order(root_form(2)) == 12);
  CHECK(aut_order(root_form(3)) == 48);
  CHECK(aut_order(d4()) == 1152);
  CHECK(aut_order(root_form(4)) == 240);
}

TEST_CASE("enumeration of small dimensions") {
  CHECK(enumerate_perfect_forms(2).size() == 1);
  CHECK(enumerate_perfect_forms(3).size() == 1);
  FormDB db4 = enumerate_perfect_forms(4);
  REQUIRE(db4.size() == 2);
  CHECK(db4.contains(canonical_pqf(root_form(4)).hash));
  CHECK(db4.contains(canonical_pqf(d4()).hash));
  for (const auto& [h, r] : db4.records()) {
    CHECK(r.treated);
    CHECK(r.nneighbors >= 1);
    CHECK(is_perfect(r.form()));
    CHECK(canonical_pqf(r.form()).hash == h);
  }
  // neighbour closure and symmetry at d = 4
  for (const auto& [h, r] : db4.records()) {
    std::set<uint64_t> nbh;
    for (const Neighbour& x : neighbours(r.form(), true))
      nbh.insert(canonical_pqf(x.form).hash);
    for (uint64_t nh : nbh) {
      CHECK(db4.contains(nh));
      std::set<uint64_t> back;
      for (const Neighbour& x : neighbours(db4.at(nh).form(), true))
        back.insert(canonical_pqf(x.form).hash);
      CHECK(back.count(h) == 1);
    }
  }
}

TEST_CASE("form record and database round-trip") {
  FormDB db = enumerate_perfect_forms(4);
  for (const auto& [h, r] : db.records()) {
    FormRecord back = FormRecord::from_line(r.to_line());
    CHECK(back.to_line() == r.to_line());
    CHECK(back.hash == h);
    CHECK(back.form() == r.form());
  }
  std::filesystem::path tmp =
      std::filesystem::temp_directory_path() / "pfe_db_test.db";
  db.save(tmp.string());
  FormDB loaded = FormDB::load(tmp.string());
  CHECK(loaded.size() == db.size());
  std::filesystem::path tmp2 =
      std::filesystem::temp_directory_path() / "pfe_db_test2.db";
  loaded.save(tmp2.string());
  CHECK(slurp(tmp.string()) == slurp(tmp2.string()));
  std::filesystem::remove(tmp);
  std::filesystem::remove(tmp2);

  CHECK_THROWS_AS(FormRecord::from_line("1; 2; 3"), BadRecord);
  FormRecord a = db.records().begin()->second;
  FormRecord tampered = a;
  tampered.upper[0] += 1;
  FormDB fresh(4);
  fresh.insert(a);
  CHECK_THROWS_AS(fresh.insert(tampered), HashCollision);
}

TEST_CASE("worker count does not change the database") {
  EnumerateOptions one, four;
  four.workers = 4;
  std::filesystem::path p1 =
      std::filesystem::temp_directory_path() / "pfe_w1.db";
  std::filesystem::path p4 =
      std::filesystem::temp_directory_path() / "pfe_w4.db";
  enumerate_perfect_forms(4, one).save(p1.string());
  enumerate_perfect_forms(4, four).save(p4.string());
  CHECK(slurp(p1.string()) == slurp(p4.string()));
  std::filesystem::remove(p1);
  std::filesystem::remove(p4);
}

TEST_CASE("resume from a partial checkpoint") {
  std::filesystem::path ck =
      std::filesystem::temp_directory_path() / "pfe_resume.db";
  // checkpoint holding only the root class as a pending candidate
  CanonicalPQF root = canonical_pqf(root_form(4));
  FormRecord seed = FormRecord::from_form(root.form, root.hash);
  FormDB partial(4);
  partial.insert(seed);
  partial.save(ck.string());

  EnumerateOptions opts;
  opts.checkpoint_path = ck.string();
  opts.resume = true;
  FormDB resumed = enumerate_perfect_forms(4, opts);
  FormDB direct = enumerate_perfect_forms(4);
  REQUIRE(resumed.size() == direct.size());
  for (const auto& [h, r] : direct.records())
    CHECK(resumed.at(h).to_line() == r.to_line());
  std::filesystem::remove(ck);
}
