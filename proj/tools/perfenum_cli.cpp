#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pfe/canonical.hpp"
#include "pfe/classify.hpp"
#include "pfe/voronoi.hpp"

using namespace pfe;

namespace {

struct CommonOpts {
  std::string bank_dir;
  int direct_threshold = 8;
  int symmetry_threshold = 12;

  AdmOptions adm(SavingBank* bank) const {
    AdmOptions o;
    o.direct_threshold = direct_threshold;
    o.symmetry_threshold = symmetry_threshold;
    o.bank = bank;
    return o;
  }
};

std::unique_ptr<SavingBank> open_bank(const std::string& dir) {
  if (dir.empty()) return nullptr;
  return std::make_unique<SavingBank>(dir);
}

int cmd_enumerate(int dim, const std::string& out, int workers, bool resume,
                  double checkpoint_secs, const CommonOpts& common) {
  auto bank = open_bank(common.bank_dir);
  EnumerateOptions opts;
  opts.workers = workers;
  opts.adm = common.adm(bank.get());
  opts.checkpoint_path = out + ".resume";
  opts.checkpoint_secs = checkpoint_secs;
  opts.resume = resume && std::ifstream(opts.checkpoint_path).good();
  FormDB db = enumerate_perfect_forms(dim, opts);
  db.save(out);
  std::remove(opts.checkpoint_path.c_str());
  std::cout << "dim=" << dim << " classes=" << db.size() << "\n";
  return 0;
}

int cmd_classify(const std::string& path) {
  FormDB db = FormDB::load(path);
  ReportTables t = report(db);
  std::ofstream txt(path + ".report.txt");
  txt << t.text;
  std::ofstream csv(path + ".report.csv");
  csv << t.csv;
  std::cout << t.text;
  return 0;
}

// cone file: "n m" then m rays of n integers; group file: one image list per line
Cone read_cone(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MathError("cannot read " + path);
  Cone c;
  int m;
  if (!(in >> c.dim >> m) || c.dim < 1 || m < 1)
    throw MathError(path + ": expected header 'n m'");
  for (int i = 0; i < m; ++i) {
    IVec v(c.dim);
    for (int j = 0; j < c.dim; ++j) {
      std::string tok;
      if (!(in >> tok)) throw MathError(path + ": short ray " + std::to_string(i));
      v[j] = Int(tok);
    }
    c.rays.push_back(std::move(v));
  }
  return c;
}

PermGroup read_group(const std::string& path, int degree) {
  std::ifstream in(path);
  if (!in) throw MathError("cannot read " + path);
  std::vector<Perm> gens;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    Perm p;
    int x;
    while (ss >> x) p.push_back(x);
    if (p.empty()) continue;
    if (int(p.size()) != degree)
      throw MathError(path + ": line " + std::to_string(lineno) +
                      ": generator degree mismatch");
    gens.push_back(std::move(p));
  }
  return PermGroup(degree, std::move(gens));
}

int cmd_dualdesc(const std::string& cone_path, const std::string& group_path,
                 const std::string& out_path, const CommonOpts& common) {
  Cone c = read_cone(cone_path);
  std::ostringstream out;
  if (group_path.empty()) {
    std::vector<IVec> facets = dual_description(c.dim, c.rays);
    out << "facets " << facets.size() << "\n";
    for (const IVec& f : facets) {
      for (size_t j = 0; j < f.size(); ++j) out << f[j].get_str() << (j + 1 < f.size() ? " " : "\n");
    }
  } else {
    PermGroup g = read_group(group_path, int(c.rays.size()));
    auto bank = open_bank(common.bank_dir);
    FacetOrbitList res = adm_facet_orbits(c, g, common.adm(bank.get()));
    out << "orbits " << res.orbits.size() << " facets " << res.total.get_str() << "\n";
    for (const FacetOrbit& o : res.orbits) {
      out << "orbit-size " << o.orbit_size.get_str() << " normal";
      for (const Int& x : o.normal) out << " " << x.get_str();
      out << "\n";
    }
  }
  if (out_path.empty()) {
    std::cout << out.str();
  } else {
    std::ofstream f(out_path);
    f << out.str();
  }
  return 0;
}

int cmd_verify(const std::string& path, long expect) {
  FormDB db = FormDB::load(path);
  if (expect >= 0 && long(db.size()) != expect) {
    std::cerr << "class count " << db.size() << " != expected " << expect << "\n";
    return 1;
  }
  for (const auto& [h, r] : db.records()) {
    PQF q = r.form();
    if (!is_perfect(q)) {
      std::cerr << std::hex << h << std::dec << ": form is not perfect\n";
      return 1;
    }
    CanonicalPQF c = canonical_pqf(q);
    if (c.hash != h || !(c.form == q)) {
      std::cerr << std::hex << h << std::dec << ": hash or canonical form mismatch\n";
      return 1;
    }
    if (!r.treated) {
      std::cerr << std::hex << h << std::dec << ": untreated record\n";
      return 1;
    }
  }
  // closure: every neighbour of every record is present
  for (const auto& [h, r] : db.records()) {
    for (const Neighbour& x : neighbours(r.form(), true)) {
      uint64_t nh = canonical_pqf(x.form).hash;
      if (!db.contains(nh)) {
        std::cerr << std::hex << h << ": missing neighbour " << nh << std::dec << "\n";
        return 1;
      }
    }
  }
  std::cout << "ok: " << db.size() << " classes\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perfect quadratic form enumeration and classification"};
  app.require_subcommand(1);

  CommonOpts common;
  if (const char* env = std::getenv("PF_BANK_DIR")) common.bank_dir = env;
  app.add_option("--bank", common.bank_dir, "saving-bank directory");
  app.add_option("--direct-threshold", common.direct_threshold,
                 "plain dual description below this incidence excess");
  app.add_option("--symmetry-threshold", common.symmetry_threshold,
                 "look for extra symmetry above this incidence excess");

  int dim = 0, workers = 1;
  long expect = -1;
  bool resume = false;
  double checkpoint_secs = 60.0;
  std::string out, db_path, cone_path, group_path;

  CLI::App* en = app.add_subcommand("enumerate", "enumerate perfect forms");
  en->add_option("-d,--dim", dim, "dimension")->required();
  en->add_option("-o,--out", out, "output database path");
  en->add_option("-j,--workers", workers, "worker count");
  en->add_flag("--resume", resume, "resume from checkpoint");
  en->add_option("--checkpoint-secs", checkpoint_secs, "checkpoint interval");

  CLI::App* cl = app.add_subcommand("classify", "classification report for a database");
  cl->add_option("db", db_path, "database path")->required();

  CLI::App* dd = app.add_subcommand("dualdesc", "dual description of a cone file");
  dd->add_option("cone", cone_path, "cone file: 'n m' header then m rays")->required();
  dd->add_option("--group", group_path, "generators, one image list per line");
  dd->add_option("-o,--out", out, "output path (default stdout)");

  CLI::App* ve = app.add_subcommand("verify", "check a database's invariants");
  ve->add_option("db", db_path, "database path")->required();
  ve->add_option("--expect", expect, "expected class count");

  CLI11_PARSE(app, argc, argv);

  try {
    if (en->parsed()) {
      if (out.empty()) out = "d" + std::to_string(dim) + ".db";
      return cmd_enumerate(dim, out, workers, resume, checkpoint_secs, common);
    }
    if (cl->parsed()) return cmd_classify(db_path);
    if (dd->parsed()) return cmd_dualdesc(cone_path, group_path, out, common);
    if (ve->parsed()) return cmd_verify(db_path, expect);
  } catch (const BadRecord& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return db_path.empty() && cone_path.empty() ? 1 : 2;
  }
  return 1;
}
