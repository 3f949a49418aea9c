#ifndef PFE_POLYCONE_HPP
#define PFE_POLYCONE_HPP

#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "pfe/canonical.hpp"
#include "pfe/permgrp.hpp"

namespace pfe {

struct NotPointed : MathError {
  NotPointed() : MathError("cone is not pointed") {}
};
struct NotFullDim : MathError {
  NotFullDim() : MathError("cone is not full-dimensional") {}
};
struct NotSupporting : MathError {
  NotSupporting() : MathError("vector is not a supporting facet normal") {}
};
struct BadIncidence : MathError {
  BadIncidence() : MathError("incidence does not describe a ridge") {}
};
struct NoAdjacent : MathError {
  NoAdjacent() : MathError("no adjacent facet found (inconsistent incidence)") {}
};

/// Pointed full-dimensional polyhedral cone in V-representation.
struct Cone {
  int dim = 0;
  std::vector<IVec> rays;  // primitive integer vectors
};

/// Facet normals of cone(rays), primitive integer, sorted. By duality the
/// same operation maps facet normals back to extreme rays.
std::vector<IVec> dual_description(int n, const std::vector<IVec>& rays);

/// Rays lying on the facet with the given supporting normal.
FaceSet facet_incidence(const Cone& c, const IVec& normal);

/// Adjacent facet across the ridge with inner normal r (nonnegative on the
/// facet's rays): f' = r + beta*f, normalized primitive.
IVec flip(const Cone& c, const FaceSet& f, const IVec& fnormal, const IVec& rnormal);

/// Normal of a ridge inside span(facet): vanishes on the ridge's rays, is
/// nonnegative on the facet's rays. Mod-p kernel with rational lift, exact
/// fallback, always verified exactly.
IVec ridge_normal_from_incidence(const Cone& c, const FaceSet& facet,
                                 const FaceSet& ridge);
/// Same, with the facet's independent ray subset precomputed (it does not
/// depend on the ridge, so callers walking many ridges share it).
IVec ridge_normal_from_incidence(const Cone& c, const FaceSet& facet,
                                 const FaceSet& ridge,
                                 const std::vector<int>& bidx);

struct FacetOrbit {
  FaceSet incidence;
  IVec normal;
  Int orbit_size;
};

struct FacetOrbitList {
  std::vector<FacetOrbit> orbits;
  Int total;  // sum of orbit sizes
};

class SavingBank;

struct AdmOptions {
  int direct_threshold = 8;     // plain DD when incidence <= rank + this
  int symmetry_threshold = 12;  // look for extra symmetry beyond this excess
  double bank_cost_threshold = 0.5;  // seconds; cheaper results are not banked
  SavingBank* bank = nullptr;
};

/// One representative per facet orbit under g (g must permute the rays).
/// Recursive adjacency decomposition with flipping and Balinski early stop.
FacetOrbitList adm_facet_orbits(const Cone& c, const PermGroup& g,
                                const AdmOptions& opts = {});

/// True iff flipping the untreated facets cannot discover anything new:
/// few untreated facets, low-rank untreated normals, or a common ray.
bool balinski_certified_stop(const Cone& c,
                             const std::vector<FacetOrbit>& untreated,
                             const PermGroup& g);

/// Memoized dual descriptions keyed by the canonical cone hash. Orbit lists
/// are stored in canonical ray positions so hits transport to any copy of the
/// cone. Optionally persisted as one text record per hash in a directory.
class SavingBank {
public:
  SavingBank() = default;
  explicit SavingBank(std::string dir);  // loads existing records

  std::optional<FacetOrbitList> lookup(const Cone& c, const PermGroup& g);
  void store(const Cone& c, const PermGroup& g, const FacetOrbitList& res);

  size_t size() const;

private:
  struct Record {
    int n = 0, m = 0;
    std::vector<Perm> group;               // in canonical positions
    std::vector<std::vector<int>> orbits;  // canonical positions per facet
  };
  void persist(uint64_t key, const Record& r);

  mutable std::mutex mu_;
  std::map<uint64_t, Record> mem_;
  std::string dir_;
};

}  // namespace pfe

#endif
