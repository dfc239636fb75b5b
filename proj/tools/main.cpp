#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <thread>

#include "congmod/complexes.hpp"
#include "congmod/generators.hpp"
#include "congmod/koszul.hpp"
#include "congmod/problem.hpp"
#include "congmod/report.hpp"

using namespace congmod;
namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

Scalar S(long v) { return Scalar(v); }

struct FileResult {
  std::string rendered;
  std::string error;
  int exit_code = 0;
  bool outside = false;
};

int run_analyze(const std::vector<std::string>& files, const std::string& format, int jobs,
                long degree_cap) {
  std::vector<FileResult> slots(files.size());
  auto work = [&](std::size_t i) {
    try {
      Problem pr = parse_problem_file(files[i]);
      if (degree_cap > 0) pr.options.degree_cap = degree_cap;
      AnalysisReport rep = analyze(pr);
      slots[i].outside = !rep.cert.applicable;
      slots[i].rendered = format == "machine" ? render_machine(rep) : render_text(rep);
    } catch (const Error& e) {
      slots[i].error = e.what();
      slots[i].exit_code = errkind_exit_code(e.kind());
    } catch (const std::exception& e) {
      slots[i].error = std::string("InternalInconsistency: ") + e.what();
      slots[i].exit_code = 3;
    }
  };
  if (jobs <= 1 || files.size() <= 1) {
    for (std::size_t i = 0; i < files.size(); ++i) work(i);
  } else {
    std::mutex mu;
    std::size_t next = 0;
    auto worker = [&] {
      while (true) {
        std::size_t i;
        {
          std::lock_guard<std::mutex> lock(mu);
          if (next >= files.size()) return;
          i = next++;
        }
        work(i);
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs && t < static_cast<int>(files.size()); ++t)
      pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  int exit_code = 0;
  if (format == "machine" && files.size() > 1) {
    ojson arr = ojson::array();
    for (std::size_t i = 0; i < files.size(); ++i) {
      if (!slots[i].error.empty()) continue;
      ojson entry;
      entry["file"] = files[i];
      entry["report"] = ojson::parse(slots[i].rendered);
      arr.push_back(entry);
    }
    std::cout << arr.dump(2) << "\n";
  } else {
    for (std::size_t i = 0; i < files.size(); ++i) {
      if (!slots[i].error.empty()) continue;
      if (format != "machine" && files.size() > 1)
        std::cout << "== " << files[i] << " ==\n";
      std::cout << slots[i].rendered;
    }
  }
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (slots[i].error.empty()) {
      if (slots[i].outside) exit_code = std::max(exit_code, 1);
      continue;
    }
    std::cerr << files[i] << ": " << slots[i].error << "\n";
    exit_code = std::max(exit_code, slots[i].exit_code);
  }
  return exit_code;
}

std::string omod_str(const FinOModule& m) {
  std::ostringstream o;
  o << "free rank " << m.free_rank() << ", torsion divisors "
    << divisors_str(m.divisors());
  auto len = m.length();
  if (len)
    o << ", length " << *len;
  else
    o << ", infinite length";
  return o.str();
}

int run_koszul(const std::string& file, const std::string& format, long degree_cap) {
  Problem pr = parse_problem_file(file);
  Dvr dvr(pr.prime);
  AlgebraPtr alg;
  OPoint pt;
  std::optional<FinModule> mod;
  if (pr.kind == RingKind::table) {
    alg = FinAlgebra::make(dvr, pr.labels, pr.mult, pr.unit);
    pt = point_kernel(*alg, pr.point);
    if (pr.table_module) {
      const int len = pr.table_module->gens * alg->dim();
      for (const auto& c : pr.table_module->columns)
        if (static_cast<int>(c.size()) != len)
          fail(ErrKind::validation, "module column length must be (generators) x (algebra rank)");
      mod = FinModule::algebra_presentation(alg, pr.table_module->gens,
                                            Mat::from_cols(pr.table_module->columns, len));
    } else {
      mod = FinModule::regular(alg);
    }
  } else {
    PolyPresentation pres = make_presentation(dvr, static_cast<int>(pr.names.size()), pr.names,
                                              pr.ring_gens, pr.point);
    for (const auto& f : pr.chain) pres.gens.push_back(f);
    FiniteBasis fb = finite_basis_certificate(pres, degree_cap > 0 ? degree_cap : 24);
    alg = fb.algebra;
    pt = presentation_point(fb, pres);
    mod = pr.poly_module ? transport_module(dvr, fb, *pr.poly_module) : FinModule::regular(alg);
  }

  Mat seq = minimal_kernel_generators(*alg, pt);
  KoszulComplex kc = koszul_complex(*mod, seq);
  KoszulComplex ring_kc =
      mod->ngens() == alg->dim() ? kc : koszul_complex(FinModule::regular(alg), seq);

  ojson j;
  std::ostringstream o;
  o << "koszul complex on " << kc.n << " minimal generators of the point kernel, module rank "
    << mod->ngens() << "\n";
  j["generators"] = kc.n;
  j["module_rank"] = mod->ngens();
  ojson hom = ojson::array();
  for (int i = 0; i <= kc.n; ++i) {
    FinOModule h = koszul_homology(kc, i);
    o << "H_" << i << ": " << omod_str(h) << "\n";
    ojson e;
    e["degree"] = i;
    e["free_rank"] = h.free_rank();
    e["divisors"] = h.divisors();
    hom.push_back(e);
  }
  j["homology"] = hom;
  bool wedge = koszul_wedge_top(ring_kc);
  bool nonzero = koszul_top_wedge_nonzero(ring_kc);
  o << "top wedge of H_1 generates H_n: " << (wedge ? "yes" : "no") << "\n";
  o << "top wedge nonzero: " << (nonzero ? "yes" : "no") << "\n";
  j["wedge_generates"] = wedge;
  j["wedge_nonzero"] = nonzero;
  try {
    FinOModule dm = koszul_defect_module(*mod, pt);
    o << "koszul defect module: " << omod_str(dm) << "\n";
    auto len = dm.length();
    if (len)
      j["defect_module_length"] = *len;
    else
      j["defect_module_length"] = "infinite";
  } catch (const Error& e) {
    if (e.kind() == ErrKind::internal_inconsistency) throw;
    o << "koszul defect module not computable: " << e.what() << "\n";
    j["defect_module_length"] = nullptr;
  }
  try {
    bool ci = wiebe_criterion(alg, pt.kernel);
    o << "wiebe criterion: " << (ci ? "complete intersection" : "not a complete intersection")
      << "\n";
    j["wiebe_complete_intersection"] = ci;
  } catch (const Error& e) {
    if (e.kind() != ErrKind::not_artinian) throw;
    o << "wiebe criterion: not applicable (the quotient is not artinian)\n";
    j["wiebe_complete_intersection"] = nullptr;
  }
  if (format == "machine")
    std::cout << j.dump(2) << "\n";
  else
    std::cout << o.str();
  return 0;
}

int run_desmit(unsigned long long seed, long budget, const std::string& format) {
  SearchConfig cfg;
  cfg.seed = seed;
  cfg.instances = budget;
  SearchReport r = desmit_search(cfg);
  if (format == "machine") {
    ojson j;
    j["seed"] = r.seed;
    j["instances"] = r.instances;
    j["filtered"] = r.filtered;
    j["freeness_checks"] = r.freeness_checks;
    j["freeness_violations"] = r.freeness_violations;
    j["profile_checks"] = r.profile_checks;
    j["witness_checks"] = r.witness_checks;
    j["evidence_total"] = r.evidence_total;
    j["evidence_free"] = r.evidence_free;
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  std::cout << "seed " << r.seed << ", " << r.instances << " instances (" << r.filtered
            << " outside the hypotheses)\n";
  std::cout << "freeness over closed-fiber subalgebras: " << r.freeness_checks
            << " confirmed, " << r.freeness_violations << " violations\n";
  std::cout << "binomial rank profiles confirmed: " << r.profile_checks << "\n";
  std::cout << "contraction homotopy identities confirmed: " << r.witness_checks << "\n";
  std::cout << "open-question evidence: " << r.evidence_free << " of " << r.evidence_total
            << " degree-zero homologies free\n";
  return 0;
}

Problem random_table_problem(std::mt19937_64& rng) {
  auto rnd = [&](long lo, long hi) {
    return static_cast<long>(lo +
                             static_cast<long>(rng() % static_cast<unsigned long>(hi - lo + 1)));
  };
  Dvr dvr(rnd(0, 1) ? 2 : 3);
  AlgebraPtr a;
  switch (rnd(0, 3)) {
    case 0:
      a = hypersurface_algebra(dvr, rnd(1, 3));
      break;
    case 1:
      a = branches_algebra(dvr, {rnd(1, 2), rnd(1, 2)});
      break;
    case 2:
      a = truncated_algebra(dvr, 2);
      break;
    default:
      a = tensor_algebra(hypersurface_algebra(dvr, 1), hypersurface_algebra(dvr, rnd(1, 2)));
      break;
  }
  Problem pr;
  pr.prime = a->dvr().prime();
  pr.labels = a->labels();
  for (int i = 0; i < a->dim(); ++i) pr.mult.push_back(a->basis_mult(i));
  pr.unit = a->unit();
  pr.point = Vec(a->dim(), S(0));
  pr.point[0] = S(1);
  return pr;
}

int run_selftest(unsigned long long seed, long budget) {
  std::mt19937_64 rng(seed);
  auto rnd = [&](long lo, long hi) {
    return static_cast<long>(lo +
                             static_cast<long>(rng() % static_cast<unsigned long>(hi - lo + 1)));
  };

  // Smith reduction round-trips
  for (long t = 0; t < budget; ++t) {
    Dvr dvr(t % 2 ? 3 : 2);
    int r = static_cast<int>(rnd(1, 8)), c = static_cast<int>(rnd(1, 8));
    Mat a(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) {
        if (rnd(0, 3) == 0) continue;
        a.at(i, j) = S(rnd(-9, 9)) * dvr.pi_pow(rnd(0, 3));
      }
    SmithForm f = smith_normal_form(dvr, a);
    Mat lhs = f.U * a * f.V;
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j)
        if (!(lhs.at(i, j) == f.S.at(i, j)))
          fail(ErrKind::internal_inconsistency, "smith round-trip failed");
    for (std::size_t k = 1; k < f.divisors.size(); ++k)
      if (f.divisors[k - 1] > f.divisors[k])
        fail(ErrKind::internal_inconsistency, "smith divisors out of order");
  }
  std::cout << "smith round-trips: " << budget << " ok\n";

  // the analysis against its reference recomputation
  long agree = std::max(budget / 5, 5L);
  for (long t = 0; t < agree; ++t) {
    Problem pr = random_table_problem(rng);
    AnalysisReport a = analyze(pr);
    AnalysisReport b = oracle_recompute(pr);
    std::vector<std::string> diffs = invariant_mismatches(a, b);
    if (!diffs.empty()) fail(ErrKind::internal_inconsistency, "reference mismatch: " + diffs[0]);
  }
  std::cout << "analysis vs reference recomputation: " << agree << " instances agree\n";

  // cut chains through random admissible hyperplanes keep the defect
  Dvr dvr(2);
  std::vector<std::string> names = {"x", "y"};
  PolyPresentation pres = make_presentation(
      dvr, 2, names, {parse_poly(2, names, "x^2 - 8*x")}, Vec{S(0), S(0)});
  std::optional<long> delta;
  for (int t = 0; t < 5; ++t) {
    PolyQ cut = sample_admissible_cut(pres, rng, 64, 24);
    ChainReport rep = defect_via_chain(pres, std::nullopt, {cut}, ChainOptions{});
    if (delta && *delta != rep.cert.delta)
      fail(ErrKind::internal_inconsistency, "defect changed along an admissible chain");
    delta = rep.cert.delta;
  }
  std::cout << "chain invariance: 5 random cuts, defect stable at " << *delta << "\n";
  std::cout << "selftest passed\n";
  return 0;
}

std::vector<fs::path> catalog_files() {
  std::vector<fs::path> out;
  fs::path dir(CONGMOD_CATALOG_DIR);
  if (!fs::is_directory(dir)) fail(ErrKind::validation, "catalog directory not found");
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".prob") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

int run_catalog(bool run, const std::string& format) {
  std::vector<fs::path> files = catalog_files();
  if (!run) {
    for (const auto& p : files) {
      std::ifstream in(p);
      std::string first;
      std::getline(in, first);
      std::string desc = first.rfind("# ", 0) == 0 ? first.substr(2) : "";
      std::cout << p.filename().string() << ": " << desc << "\n";
    }
    return 0;
  }
  for (const auto& p : files) {
    Problem pr = parse_problem_file(p.string());
    AnalysisReport rep = analyze(pr);
    if (format == "machine") {
      std::cout << "== " << p.filename().string() << " ==\n" << render_machine(rep);
      continue;
    }
    std::cout << p.filename().string() << ": " << rep.verdict;
    if (rep.cert.applicable)
      std::cout << " (defect " << rep.cert.delta << ")";
    else if (rep.raw_delta)
      std::cout << " (raw defect " << *rep.raw_delta << ")";
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact congruence module and Wiles defect analysis over Z_(p)"};
  app.require_subcommand(1);

  std::vector<std::string> files;
  std::string format = "text";
  int jobs = 1;
  long degree_cap = 0;
  unsigned long long seed = 20260815ULL;
  long budget = 50;
  long instances = 1000;
  bool cat_run = false;

  CLI::App* an = app.add_subcommand("analyze", "analyze problem files");
  an->add_option("files", files, "problem files")->required()->expected(-1);
  an->add_option("--format", format, "text or machine")
      ->check(CLI::IsMember({"text", "machine"}));
  an->add_option("--jobs", jobs, "parallel workers")->check(CLI::PositiveNumber);
  an->add_option("--degree-cap", degree_cap, "staircase degree cap");

  CLI::App* ko = app.add_subcommand("koszul", "koszul homology at the marked point");
  ko->add_option("file", files, "problem file")->required()->expected(1);
  ko->add_option("--format", format, "text or machine")
      ->check(CLI::IsMember({"text", "machine"}));
  ko->add_option("--degree-cap", degree_cap, "staircase degree cap");

  CLI::App* ds = app.add_subcommand("desmit", "randomized closed-fiber lab");
  ds->add_option("--seed", seed, "rng seed");
  ds->add_option("--budget", instances, "instance count")->check(CLI::PositiveNumber);
  ds->add_option("--format", format, "text or machine")
      ->check(CLI::IsMember({"text", "machine"}));

  CLI::App* st = app.add_subcommand("selftest", "internal consistency sweep");
  st->add_option("--seed", seed, "rng seed");
  st->add_option("--budget", budget, "instance count")->check(CLI::PositiveNumber);

  CLI::App* ct = app.add_subcommand("catalog", "bundled worked examples");
  ct->add_flag("--run", cat_run, "analyze every bundled example");
  ct->add_option("--format", format, "text or machine")
      ->check(CLI::IsMember({"text", "machine"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (an->parsed()) return run_analyze(files, format, jobs, degree_cap);
    if (ko->parsed()) return run_koszul(files.at(0), format, degree_cap);
    if (ds->parsed()) return run_desmit(seed, instances, format);
    if (st->parsed()) return run_selftest(seed, budget);
    if (ct->parsed()) return run_catalog(cat_run, format);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return errkind_exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "InternalInconsistency: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
