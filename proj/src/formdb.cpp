#include "pfe/formdb.hpp"

#include <fstream>
#include <sstream>

namespace pfe {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep)) out.push_back(trim(tok));
  return out;
}

}  // namespace

PQF FormRecord::form() const {
  QMat g(d, d);
  size_t k = 0;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      if (k >= upper.size()) throw BadRecord("short upper triangle");
      g(i, j) = Rat(upper[k]);
      g(j, i) = g(i, j);
      ++k;
    }
  if (k != upper.size()) throw BadRecord("long upper triangle");
  return PQF(std::move(g));
}

FormRecord FormRecord::from_form(const PQF& canonical, uint64_t hash) {
  FormRecord r;
  r.d = canonical.dim();
  for (int i = 0; i < r.d; ++i)
    for (int j = i; j < r.d; ++j) {
      const Rat& e = canonical.at(i, j);
      if (e.get_den() != 1) throw BadRecord("non-integral canonical form");
      r.upper.push_back(e.get_num());
    }
  r.hash = hash;
  return r;
}

std::string FormRecord::to_line() const {
  std::ostringstream out;
  out << d << "; " << lambda1.get_str() << "; ";
  for (size_t k = 0; k < upper.size(); ++k)
    out << upper[k].get_str() << (k + 1 < upper.size() ? "," : "");
  out << "; " << halfmin << "; " << autorder.get_str() << "; " << nneighbors
      << "; " << std::hex << hash << "; " << parent << std::dec << "; "
      << (treated ? 1 : 0);
  return out.str();
}

FormRecord FormRecord::from_line(const std::string& line) {
  std::vector<std::string> f = split(line, ';');
  if (f.size() != 9) throw BadRecord("expected 9 fields, got " +
                                     std::to_string(f.size()));
  FormRecord r;
  try {
    r.d = std::stoi(f[0]);
    r.lambda1 = Rat(f[1]);
    r.lambda1.canonicalize();
    for (const std::string& tok : split(f[2], ','))
      r.upper.push_back(Int(tok));
    r.halfmin = std::stoi(f[3]);
    r.autorder = Int(f[4]);
    r.nneighbors = std::stoi(f[5]);
    r.hash = std::stoull(f[6], nullptr, 16);
    r.parent = std::stoull(f[7], nullptr, 16);
    r.treated = std::stoi(f[8]) != 0;
  } catch (const std::invalid_argument&) {
    throw BadRecord("malformed field in record");
  }
  size_t want = size_t(r.d) * (r.d + 1) / 2;
  if (r.upper.size() != want) throw BadRecord("upper triangle length mismatch");
  return r;
}

bool FormDB::insert(const FormRecord& r) {
  if (d_ == 0) d_ = r.d;
  if (r.d != d_) throw BadRecord("dimension mismatch");
  auto it = rec_.find(r.hash);
  if (it != rec_.end()) {
    if (it->second.upper != r.upper) throw HashCollision();
    return false;
  }
  rec_.emplace(r.hash, r);
  return true;
}

void FormDB::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw MathError("cannot write " + path);
  for (const auto& [h, r] : rec_) out << r.to_line() << "\n";
}

FormDB FormDB::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MathError("cannot read " + path);
  FormDB db;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      db.insert(FormRecord::from_line(line));
    } catch (const MathError& e) {
      throw BadRecord("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return db;
}

}  // namespace pfe
