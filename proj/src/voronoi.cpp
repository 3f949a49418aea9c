#include "pfe/voronoi.hpp"

#include <atomic>
#include <chrono>
#include <deque>
#include <mutex>
#include <thread>

#include "pfe/canonical.hpp"

namespace pfe {

PQF root_form(int d) {
  if (d < 1) throw MathError("dimension must be positive");
  QMat g(d, d);
  for (int i = 0; i < d; ++i) {
    g(i, i) = 2;
    if (i + 1 < d) {
      g(i, i + 1) = -1;
      g(i + 1, i) = -1;
    }
  }
  return PQF(std::move(g));
}

IVec sym_flatten(const QMat& s) {
  const int d = s.rows();
  IVec out;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      if (s(i, j).get_den() != 1) throw MathError("non-integral direction");
      out.push_back(s(i, j).get_num());
    }
  return out;
}

QMat sym_unflatten(const IVec& u, int d) {
  QMat s(d, d);
  size_t k = 0;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      if (k >= u.size()) throw MathError("short flattened vector");
      s(i, j) = Rat(u[k]);
      s(j, i) = s(i, j);
      ++k;
    }
  if (k != u.size()) throw MathError("long flattened vector");
  return s;
}

IVec dyad_normal(const IVec& x) {
  const int d = int(x.size());
  IVec out;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j)
      out.push_back(i == j ? Int(x[i] * x[i]) : Int(2 * x[i] * x[j]));
  return out;
}

namespace {

// exact positive semidefiniteness test by LDL^T with diagonal pivoting;
// a zero diagonal pivot forces its whole residual row to vanish
bool is_psd(QMat a) {
  const int n = a.rows();
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  for (int k = 0; k < n; ++k) {
    int piv = -1;
    for (int i = k; i < n; ++i)
      if (a(idx[i], idx[i]) > 0) { piv = i; break; }
    if (piv < 0) {
      // all remaining diagonals are <= 0: PSD iff the block is zero
      for (int i = k; i < n; ++i)
        for (int j = k; j < n; ++j)
          if (a(idx[i], idx[j]) != 0) return false;
      return true;
    }
    std::swap(idx[k], idx[piv]);
    const Rat d = a(idx[k], idx[k]);
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j)
        a(idx[i], idx[j]) -= a(idx[i], idx[k]) * a(idx[k], idx[j]) / d;
  }
  return true;
}

std::vector<IVec> min_dyads(const PQF& q, std::vector<IVec>* minv_out) {
  MinData md = minimal_vectors(q);
  std::vector<IVec> dyads;
  for (const IVec& x : md.vectors) dyads.push_back(dyad_normal(x));
  if (minv_out) *minv_out = md.vectors;
  return dyads;
}

}  // namespace

Cone tangent_cone(const PQF& q) {
  if (!is_perfect(q)) throw NotPerfect();
  const int n = q.dim() * (q.dim() + 1) / 2;
  Cone c;
  c.dim = n;
  c.rays = dual_description(n, min_dyads(q, nullptr));
  return c;
}

PQF neighbour_form(const PQF& q, const IVec& ray) {
  const int d = q.dim();
  QMat dir = sym_unflatten(ray, d);
  const Rat lambda = minimal_vectors(q).lambda1;
  auto form_at = [&](const Rat& a) {
    QMat g = q.gram();
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) g(i, j) += a * dir(i, j);
    return PQF(std::move(g));
  };
  auto dir_value = [&](const IVec& y) {
    Rat s = 0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) s += Rat(y[i]) * dir(i, j) * Rat(y[j]);
    return s;
  };

  // the Ryshkov edge in a positive semidefinite direction never ends
  if (is_psd(dir)) throw NoNeighbour();

  // bracket [lo, hi]: lo keeps the old minimum with no new vector, hi is
  // past the target. Non-PD probes bisect (witnesses of indefinite forms can
  // be huge); once positive definite, minimal vectors give exact boundaries.
  Rat lo = 0, hi;
  bool have_hi = false;
  Rat alpha = 1;
  for (int iter = 0; iter < 512; ++iter) {
    PQF cand = form_at(alpha);
    if (!cholesky_probe(cand.gram()).positive_definite) {
      hi = alpha;
      have_hi = true;
      alpha = (lo + hi) / 2;
      continue;
    }
    MinData md = minimal_vectors(cand);
    if (md.lambda1 > lambda)
      throw MathError("minimum rose along a tangent cone ray");
    if (md.lambda1 == lambda) {
      for (const IVec& y : md.vectors)
        if (q.value(y) > lambda) return cand;  // new minimal vector appeared
      lo = alpha;
      alpha = have_hi ? Rat((lo + hi) / 2) : Rat(alpha * 2);
      continue;
    }
    // overshot: every current minimal vector crosses lambda strictly before
    // alpha; the nearest crossing is the next candidate
    hi = alpha;
    have_hi = true;
    bool first = true;
    for (const IVec& y : md.vectors) {
      Rat dv = dir_value(y);
      if (dv >= 0) throw MathError("witness does not decrease along the ray");
      Rat b = (lambda - q.value(y)) / dv;
      if (first || b < alpha) {
        alpha = b;
        first = false;
      }
    }
  }
  throw MathError("neighbour search did not converge");
}

Int aut_order(const PQF& q) {
  return form_automorphisms(q, spanning_vectors(q)).full_order;
}

std::vector<Neighbour> neighbours(const PQF& q, bool use_symmetry,
                                  const AdmOptions& opts) {
  if (!is_perfect(q)) throw NotPerfect();
  const int n = q.dim() * (q.dim() + 1) / 2;
  std::vector<IVec> minv;
  std::vector<IVec> dyads = min_dyads(q, &minv);
  const int m = int(dyads.size());
  std::vector<Neighbour> out;
  if (!use_symmetry) {
    for (const IVec& ray : dual_description(n, dyads))
      out.push_back({ray, Int(1), neighbour_form(q, ray)});
    return out;
  }
  // Aut(Q)/± acting on the minimal +-pairs: restrict the spanning-set action
  // (the minimal vectors head the spanning set, value classes are preserved)
  Rat lambda;
  std::vector<IVec> span = spanning_vectors(q, &lambda);
  FormAutomorphisms fa = form_automorphisms(q, span);
  std::vector<Perm> gens;
  for (const Perm& p : fa.on_classes.generators()) {
    Perm r(m);
    for (int i = 0; i < m; ++i) {
      if (p[i] >= m) throw MathError("automorphism does not preserve Min");
      r[i] = p[i];
    }
    gens.push_back(std::move(r));
  }
  PermGroup g(m, std::move(gens));
  FacetOrbitList orbits = adm_facet_orbits(Cone{n, dyads}, g, opts);
  for (const FacetOrbit& o : orbits.orbits)
    out.push_back({o.normal, o.orbit_size, neighbour_form(q, o.normal)});
  return out;
}

// --- enumeration driver ----------------------------------------------------

namespace {

// metadata derived from the canonical form itself (deterministic)
void complete_record(FormRecord& r) {
  PQF form = r.form();
  MinData md = minimal_vectors(form);
  r.lambda1 = md.lambda1;
  r.halfmin = int(md.vectors.size());
  r.autorder = aut_order(form);
}

struct Shard {
  std::mutex mu;
  std::map<uint64_t, FormRecord> db;
  std::deque<FormRecord> inbox;
};

struct Driver {
  int d;
  EnumerateOptions opts;
  int nworkers;
  std::vector<std::unique_ptr<Shard>> shards;
  std::atomic<long> inflight{0};
  std::atomic<int> busy{0};
  std::atomic<bool> failed{false};
  std::string error;
  std::mutex error_mu;
  std::chrono::steady_clock::time_point last_checkpoint =
      std::chrono::steady_clock::now();
  std::mutex checkpoint_mu;

  Shard& owner(uint64_t hash) { return *shards[hash % nworkers]; }

  void post(FormRecord rec) {
    Shard& s = owner(rec.hash);
    std::lock_guard<std::mutex> lk(s.mu);
    s.inbox.push_back(std::move(rec));
    ++inflight;
  }

  // under the shard lock: fold a candidate into the database
  static void merge(std::map<uint64_t, FormRecord>& db, FormRecord rec) {
    auto it = db.find(rec.hash);
    if (it == db.end()) {
      if (rec.autorder == 0) complete_record(rec);
      db.emplace(rec.hash, std::move(rec));
      return;
    }
    if (it->second.upper != rec.upper) throw HashCollision();
    if (rec.parent < it->second.parent) it->second.parent = rec.parent;
  }

  void checkpoint(bool force) {
    if (opts.checkpoint_path.empty()) return;
    {
      std::lock_guard<std::mutex> lk(checkpoint_mu);
      auto now = std::chrono::steady_clock::now();
      if (!force &&
          std::chrono::duration<double>(now - last_checkpoint).count() <
              opts.checkpoint_secs)
        return;
      last_checkpoint = now;
    }
    FormDB snap(d);
    std::vector<std::unique_lock<std::mutex>> locks;
    for (auto& s : shards) locks.emplace_back(s->mu);
    for (auto& s : shards) {
      for (const auto& [h, r] : s->db) snap.insert(r);
      for (const FormRecord& r : s->inbox) {
        // pending candidates keep autorder 0 and are re-queued on resume
        if (!snap.contains(r.hash)) snap.insert(r);
      }
    }
    locks.clear();
    snap.save(opts.checkpoint_path);
  }

  void fail(const std::string& what) {
    std::lock_guard<std::mutex> lk(error_mu);
    if (!failed.exchange(true)) error = what;
  }

  FormRecord candidate(const PQF& form, uint64_t parent_hash) {
    CanonicalPQF c = canonical_pqf(form);
    FormRecord rec = FormRecord::from_form(c.form, c.hash);
    rec.parent = parent_hash;
    rec.autorder = 0;  // completed by the owning shard
    return rec;
  }

  void work(int w) {
    Shard& s = *shards[w];
    while (!failed) {
      FormRecord job;
      bool have_job = false;
      try {
      {
        std::lock_guard<std::mutex> lk(s.mu);
        while (!s.inbox.empty()) {
          merge(s.db, std::move(s.inbox.front()));
          s.inbox.pop_front();
          --inflight;
        }
        for (auto& [h, rec] : s.db)
          if (!rec.treated) {
            job = rec;
            have_job = true;
            ++busy;
            break;
          }
      }
      if (!have_job) {
        if (inflight == 0 && busy == 0) {
          bool inbox_empty;
          {
            std::lock_guard<std::mutex> lk(s.mu);
            inbox_empty = s.inbox.empty();
          }
          if (inbox_empty && inflight == 0 && busy == 0) break;
        }
        std::this_thread::sleep_for(std::chrono::microseconds(200));
        continue;
      }
      PQF form = job.form();
      std::vector<Neighbour> nb = neighbours(form, true, opts.adm);
      for (const Neighbour& x : nb) post(candidate(x.form, job.hash));
      {
        std::lock_guard<std::mutex> lk(s.mu);
        FormRecord& rec = s.db.at(job.hash);
        rec.nneighbors = int(nb.size());
        rec.treated = true;
      }
      checkpoint(false);
      --busy;
      } catch (const std::exception& e) {
        fail(e.what());
        if (have_job) --busy;
      }
    }
  }
};

}  // namespace

FormDB enumerate_perfect_forms(int d, const EnumerateOptions& opts) {
  if (d < 2) throw MathError("dimension must be at least 2");
  Driver drv;
  drv.d = d;
  drv.opts = opts;
  drv.nworkers = std::max(1, opts.workers);
  for (int i = 0; i < drv.nworkers; ++i)
    drv.shards.push_back(std::make_unique<Shard>());

  if (opts.resume && !opts.checkpoint_path.empty()) {
    FormDB prev = FormDB::load(opts.checkpoint_path);
    if (prev.size() > 0 && prev.dim() != d)
      throw MathError("checkpoint dimension mismatch");
    for (const auto& [h, r] : prev.records()) {
      if (r.autorder == 0) {
        drv.post(r);  // was still in flight when checkpointed
      } else {
        Shard& s = drv.owner(h);
        std::lock_guard<std::mutex> lk(s.mu);
        s.db.emplace(h, r);
      }
    }
  }
  bool empty = true;
  for (auto& s : drv.shards)
    if (!s->db.empty() || !s->inbox.empty()) empty = false;
  if (empty) drv.post(drv.candidate(root_form(d), 0));

  if (drv.nworkers == 1) {
    drv.work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < drv.nworkers; ++w)
      pool.emplace_back([&drv, w] { drv.work(w); });
    for (std::thread& t : pool) t.join();
  }
  if (drv.failed) throw MathError(drv.error);

  FormDB out(d);
  for (auto& s : drv.shards)
    for (const auto& [h, r] : s->db) out.insert(r);
  drv.checkpoint(true);
  return out;
}

}  // namespace pfe
