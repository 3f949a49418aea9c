#ifndef PFE_FORMDB_HPP
#define PFE_FORMDB_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pfe/quadform.hpp"

namespace pfe {

struct BadRecord : MathError {
  explicit BadRecord(const std::string& what) : MathError(what) {}
};
struct HashCollision : MathError {
  HashCollision() : MathError("distinct canonical forms share a hash") {}
};

/// One enumerated similarity class: the canonical integral form plus metadata.
struct FormRecord {
  int d = 0;
  Rat lambda1;
  std::vector<Int> upper;  // upper triangle of the canonical form, row-major
  int halfmin = 0;         // |Min|/2
  Int autorder;
  int nneighbors = -1;     // neighbour orbit count; -1 until treated
  uint64_t hash = 0;
  uint64_t parent = 0;     // smallest hash that discovered this class; 0 = root
  bool treated = false;

  PQF form() const;  // rebuild the canonical form from the upper triangle
  static FormRecord from_form(const PQF& canonical, uint64_t hash);

  std::string to_line() const;
  static FormRecord from_line(const std::string& line);
};

/// Keyed store of form records for one dimension, ordered by hash.
class FormDB {
public:
  FormDB() = default;
  explicit FormDB(int d) : d_(d) {}

  int dim() const { return d_; }
  size_t size() const { return rec_.size(); }
  const std::map<uint64_t, FormRecord>& records() const { return rec_; }

  bool contains(uint64_t hash) const { return rec_.count(hash) != 0; }
  const FormRecord& at(uint64_t hash) const { return rec_.at(hash); }
  FormRecord& at(uint64_t hash) { return rec_.at(hash); }

  /// Insert a record; on a hash hit the stored canonical form must match
  /// byte for byte (HashCollision otherwise). Returns true if newly inserted.
  bool insert(const FormRecord& r);

  void save(const std::string& path) const;  // one line per record, hash order
  static FormDB load(const std::string& path);

private:
  int d_ = 0;
  std::map<uint64_t, FormRecord> rec_;
};

}  // namespace pfe

#endif
