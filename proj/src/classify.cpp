#include "pfe/classify.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace pfe {

std::string to_string(EutaxyStatus s) {
  switch (s) {
    case EutaxyStatus::NotSemiEutactic: return "not-semi-eutactic";
    case EutaxyStatus::SemiEutactic: return "semi-eutactic";
    case EutaxyStatus::Eutactic: return "eutactic";
    case EutaxyStatus::StronglyEutactic: return "strongly-eutactic";
  }
  return "?";
}

namespace {

// upper-triangle index pairs of a d x d symmetric matrix
std::vector<std::pair<int, int>> upper_pairs(int d) {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) out.emplace_back(i, j);
  return out;
}

}  // namespace

EutaxyResult eutaxy_classify(const PQF& q) {
  const int d = q.dim();
  MinData md = minimal_vectors(q);
  const int m = int(md.vectors.size());
  QMat qinv = inverse(q.gram());
  auto pairs = upper_pairs(d);
  const int neq = int(pairs.size());

  // maximize t with sum (t + s_x) xx^t = Q^{-1}, s_x >= 0, t = tp - tm
  QMat a(neq, 2 + m);
  QVec b(neq);
  for (int e = 0; e < neq; ++e) {
    auto [i, j] = pairs[e];
    Rat tsum = 0;
    for (int x = 0; x < m; ++x) {
      Rat c = Rat(Int(md.vectors[x][i] * md.vectors[x][j]));
      a(e, 2 + x) = c;
      tsum += c;
    }
    a(e, 0) = tsum;
    a(e, 1) = -tsum;
    b[e] = qinv(i, j);
  }
  QVec obj(2 + m, Rat(0));
  obj[0] = 1;
  obj[1] = -1;
  LpSolution sol = lp_solve_standard(a, b, obj);

  EutaxyResult res;
  res.min_vectors = md.vectors;
  if (sol.status != LpStatus::Optimal || sol.objective < 0) {
    res.status = EutaxyStatus::NotSemiEutactic;
    return res;
  }
  Rat t = sol.x[0] - sol.x[1];
  res.witness = QVec(m);
  for (int x = 0; x < m; ++x) res.witness[x] = t + sol.x[2 + x];
  res.status = (t > 0) ? EutaxyStatus::Eutactic : EutaxyStatus::SemiEutactic;

  if (res.status == EutaxyStatus::Eutactic) {
    // the only candidate constant coefficient is fixed by the trace pairing
    Rat c = Rat(d) / (md.lambda1 * m);
    bool constant_works = true;
    for (int e = 0; e < neq && constant_works; ++e) {
      auto [i, j] = pairs[e];
      Rat s = 0;
      for (int x = 0; x < m; ++x)
        s += c * Rat(Int(md.vectors[x][i] * md.vectors[x][j]));
      if (s != qinv(i, j)) constant_works = false;
    }
    if (constant_works) {
      res.status = EutaxyStatus::StronglyEutactic;
      res.witness = QVec(m, c);
    }
  }
  return res;
}

bool is_extreme(const PQF& q) {
  if (!is_perfect(q)) return false;
  EutaxyStatus s = eutaxy_classify(q).status;
  return s == EutaxyStatus::Eutactic || s == EutaxyStatus::StronglyEutactic;
}

Rat bm_invariant_sq(const PQF& q) {
  return minimal_vectors(q).lambda1 * minimal_vectors(dual_form(q)).lambda1;
}

bool dual_extreme_check(const PQF& q) {
  if (!is_perfect(q)) throw NotPositiveDefinite();
  const int d = q.dim();
  MinData mp = minimal_vectors(q);
  MinData mdual = minimal_vectors(dual_form(q));
  const int m1 = int(mp.vectors.size());
  const int m2 = int(mdual.vectors.size());
  auto pairs = upper_pairs(d);
  const int neq = int(pairs.size());

  // Q xx^t Q dyads for the primal side
  std::vector<QMat> adyads;
  for (const IVec& x : mp.vectors) {
    QMat xxt(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) xxt(i, j) = Rat(Int(x[i] * x[j]));
    adyads.push_back(q.gram() * xxt * q.gram());
  }

  // maximize t: lambda_x = t + s_x, mu_y = t + r_y, all slacks >= 0,
  // sum lambda_x Qxx^tQ = sum mu_y yy^t, sum lambda_x = 1
  const int nv = 2 + m1 + m2;
  QMat a(neq + 1, nv);
  QVec b(neq + 1, Rat(0));
  for (int e = 0; e < neq; ++e) {
    auto [i, j] = pairs[e];
    Rat tsum = 0;
    for (int x = 0; x < m1; ++x) {
      a(e, 2 + x) = adyads[x](i, j);
      tsum += adyads[x](i, j);
    }
    for (int y = 0; y < m2; ++y) {
      Rat c = -Rat(Int(mdual.vectors[y][i] * mdual.vectors[y][j]));
      a(e, 2 + m1 + y) = c;
      tsum += c;
    }
    a(e, 0) = tsum;
    a(e, 1) = -tsum;
  }
  for (int x = 0; x < m1; ++x) a(neq, 2 + x) = 1;
  a(neq, 0) = m1;
  a(neq, 1) = -m1;
  b[neq] = 1;
  QVec obj(nv, Rat(0));
  obj[0] = 1;
  obj[1] = -1;
  LpSolution sol = lp_solve_standard(a, b, obj);
  return sol.status == LpStatus::Optimal && sol.objective > 0;
}

ReportTables report(const FormDB& db) {
  std::map<int, int> by_halfmin;
  std::map<std::string, int> by_aut;
  std::map<std::string, int> by_scale;
  std::map<std::string, int> by_eutaxy;
  std::vector<uint64_t> no_a2, no_span;
  uint64_t densest = 0;
  Rat best_gamma;
  bool have_best = false;

  for (const auto& [h, rec] : db.records()) {
    PQF form = rec.form();
    ++by_halfmin[rec.halfmin];
    ++by_aut[rec.autorder.get_str()];
    ++by_scale[scale(form).get_str()];
    ++by_eutaxy[to_string(eutaxy_classify(form).status)];
    Rat g = hermite_invariant(form);
    if (!have_best || g > best_gamma) {
      best_gamma = g;
      densest = h;
      have_best = true;
    }
    if (!has_a2_section(form)) no_a2.push_back(h);
    if (!min_vectors_span(form)) no_span.push_back(h);
  }

  std::ostringstream text, csv;
  auto section = [&](const std::string& name, auto& hist) {
    text << name << "\n";
    for (const auto& [k, v] : hist) {
      std::ostringstream key;
      key << k;
      text << "  " << key.str() << ": " << v << "\n";
      csv << name << "," << key.str() << "," << v << "\n";
    }
  };
  text << "forms: " << db.size() << " (dimension " << db.dim() << ")\n";
  csv << "total,," << db.size() << "\n";
  section("half-kissing", by_halfmin);
  section("aut-order", by_aut);
  section("scale", by_scale);
  section("eutaxy", by_eutaxy);
  if (have_best) {
    text << "densest form: " << std::hex << densest << std::dec
         << " (gamma^d = " << best_gamma.get_str() << ")\n";
    csv << "densest," << std::hex << densest << std::dec << ","
        << best_gamma.get_str() << "\n";
  }
  auto listing = [&](const std::string& name, const std::vector<uint64_t>& v) {
    text << name << ":";
    if (v.empty()) text << " none";
    for (uint64_t h : v) {
      text << " " << std::hex << h << std::dec;
      csv << name << "," << std::hex << h << std::dec << ",1\n";
    }
    text << "\n";
  };
  listing("without-a2-section", no_a2);
  listing("min-not-spanning", no_span);
  return {text.str(), csv.str()};
}

}  // namespace pfe
