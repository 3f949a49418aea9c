#ifndef PFE_CLASSIFY_HPP
#define PFE_CLASSIFY_HPP

#include <string>
#include <vector>

#include "pfe/formdb.hpp"
#include "pfe/simplex.hpp"

namespace pfe {

enum class EutaxyStatus {
  NotSemiEutactic,
  SemiEutactic,
  Eutactic,
  StronglyEutactic,
};

std::string to_string(EutaxyStatus s);

struct EutaxyResult {
  EutaxyStatus status;
  std::vector<IVec> min_vectors;  // one per +- pair, aligned with witness
  QVec witness;  // lambda_x with sum lambda_x xx^t = Q^{-1}; empty if none
};

/// Exact LP classification: maximize t subject to
/// sum lambda_x xx^t = Q^{-1}, lambda_x >= t over Min(Q)/+-.
EutaxyResult eutaxy_classify(const PQF& q);

/// Perfect and eutactic.
bool is_extreme(const PQF& q);

/// lambda_1(Q) * lambda_1(Q^{-1}), exact; similarity-invariant.
Rat bm_invariant_sq(const PQF& q);

/// Dual eutaxy for a perfect form: strictly positive lambda, mu with
/// Q (sum lambda_x xx^t) Q = sum mu_y yy^t over Min(Q) and Min(Q^{-1}).
bool dual_extreme_check(const PQF& q);

struct ReportTables {
  std::string text;  // aligned plain text
  std::string csv;   // machine-readable
};

/// Histograms over |Min|/2, |Aut|, scale and eutaxy status, plus extremal
/// summaries (densest form, forms without an A2 section, non-spanning Min).
ReportTables report(const FormDB& db);

}  // namespace pfe

#endif
