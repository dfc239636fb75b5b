// Acceptance sweep: one line per criterion, nonzero exit on any failure.
#include <chrono>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "congmod/complexes.hpp"
#include "congmod/generators.hpp"
#include "congmod/koszul.hpp"
#include "congmod/problem.hpp"

using namespace congmod;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void req(bool cond, const std::string& msg) {
  if (!cond) throw std::runtime_error(msg);
}

template <class F>
void criterion(int idx, const std::string& name, double budget_s, F&& body) {
  auto t0 = std::chrono::steady_clock::now();
  std::string why;
  try {
    body();
  } catch (const std::exception& e) {
    why = e.what();
  }
  double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (why.empty() && dt > budget_s)
    why = "exceeded the time budget of " + std::to_string(budget_s) + "s";
  std::ostringstream line;
  line << (why.empty() ? "[PASS] " : "[FAIL] ") << idx << ". " << name << " (" << std::fixed
       << std::setprecision(2) << dt << "s of " << std::setprecision(0) << budget_s << "s)";
  if (!why.empty()) line << " - " << why;
  std::cout << line.str() << "\n";
  if (!why.empty()) ++failures;
}

Scalar S(long v) { return Scalar(v); }

long rnd(std::mt19937_64& rng, long lo, long hi) {
  return lo + static_cast<long>(rng() % static_cast<unsigned long>(hi - lo + 1));
}

Problem table_problem(const AlgebraPtr& a, const Vec& lambda) {
  Problem pr;
  pr.prime = a->dvr().prime();
  pr.kind = RingKind::table;
  pr.labels = a->labels();
  for (int i = 0; i < a->dim(); ++i) pr.mult.push_back(a->basis_mult(i));
  pr.unit = a->unit();
  pr.point = lambda;
  return pr;
}

// A ring from the stock families with a known complete-intersection flag and
// a module of the shape A^mu, optionally plus a torsion-free summand
// supported away from the marked point.
struct Shaped {
  Problem pr;
  AlgebraPtr alg;
  OPoint pt;
  std::optional<FinModule> mod;
  bool ci_ring = false;
};

Shaped sample_shaped(std::mt19937_64& rng, bool allow_far_summand) {
  Dvr dvr(rnd(rng, 0, 1) ? 2 : 3);
  AlgebraPtr a;
  bool ci = false;
  std::vector<long> ms;  // branch exponents when the basis is {1, x_1, ..., x_k}
  switch (rnd(rng, 0, 4)) {
    case 0:
      ms = {rnd(rng, 1, 3)};
      a = hypersurface_algebra(dvr, ms[0]);
      ci = true;
      break;
    case 1:
      ms = {rnd(rng, 1, 2)};
      a = branches_algebra(dvr, ms);
      ci = true;
      break;
    case 2:
      ms = {rnd(rng, 1, 2), rnd(rng, 1, 2)};
      a = branches_algebra(dvr, ms);
      ci = false;
      break;
    case 3:
      ms = {rnd(rng, 1, 2), rnd(rng, 1, 2), 1};
      a = branches_algebra(dvr, ms);
      ci = false;
      break;
    default:
      a = tensor_algebra(hypersurface_algebra(dvr, rnd(rng, 1, 2)),
                         hypersurface_algebra(dvr, rnd(rng, 1, 2)));
      ci = true;
      break;
  }
  const int d = a->dim();
  int mu = static_cast<int>(rnd(rng, 1, 2));
  bool far = allow_far_summand && !ms.empty() && rnd(rng, 0, 1) == 1;
  TableModule tm;
  tm.gens = mu + (far ? 1 : 0);
  if (far) {
    // the far branch x_1 = p^{m_1}, x_j = 0 in the last generator block
    const int block = (tm.gens - 1) * d;
    Vec c1(static_cast<std::size_t>(tm.gens) * d, S(0));
    c1[block] = -dvr.pi_pow(ms[0]);
    c1[block + 1] = S(1);
    tm.columns.push_back(c1);
    for (std::size_t j = 2; j <= ms.size(); ++j) {
      Vec cj(static_cast<std::size_t>(tm.gens) * d, S(0));
      cj[block + j] = S(1);
      tm.columns.push_back(cj);
    }
  }
  Shaped out;
  out.alg = a;
  Vec lambda(d, S(0));
  lambda[0] = S(1);
  out.pt = point_kernel(*a, lambda);
  out.pr = table_problem(a, lambda);
  out.pr.table_module = tm;
  out.mod = FinModule::algebra_presentation(
      a, tm.gens, Mat::from_cols(tm.columns, tm.gens * d));
  out.ci_ring = ci;
  return out;
}

std::map<std::string, AnalysisReport> analyzed_catalog() {
  std::map<std::string, AnalysisReport> out;
  for (const auto& e : fs::directory_iterator(CONGMOD_CATALOG_DIR)) {
    if (e.path().extension() != ".prob") continue;
    Problem pr = parse_problem_file(e.path().string());
    AnalysisReport rep = analyze(pr);
    AnalysisReport ref = oracle_recompute(pr);
    std::vector<std::string> diffs = invariant_mismatches(rep, ref);
    req(diffs.empty(), e.path().filename().string() + ": reference disagrees: " +
                           (diffs.empty() ? "" : diffs[0]));
    out[e.path().filename().string()] = rep;
  }
  return out;
}

}  // namespace

int main() {
  criterion(1, "bundled catalog reproduces the frozen exact values", 5.0, [] {
    auto reps = analyzed_catalog();
    req(reps.size() >= 8, "expected at least 8 bundled examples");
    auto get = [&](const std::string& n) -> const AnalysisReport& {
      auto it = reps.find(n);
      req(it != reps.end(), "missing catalog entry " + n);
      return it->second;
    };
    auto expect = [&](const std::string& n, long cot, long psi, long delta, bool ci) {
      const AnalysisReport& r = get(n);
      req(r.cert.applicable, n + ": expected an applicable certificate");
      req(r.cert.length_cotangent == cot,
          n + ": cotangent length " + std::to_string(r.cert.length_cotangent));
      req(r.cert.length_psi == psi,
          n + ": congruence length " + std::to_string(r.cert.length_psi));
      req(r.cert.delta == delta, n + ": defect " + std::to_string(r.cert.delta));
      req(r.cert.complete_intersection == ci, n + ": wrong verdict");
    };
    expect("01-base-ring.prob", 0, 0, 0, true);
    expect("02-hypersurface-m1.prob", 1, 1, 0, true);
    expect("03-hypersurface-m3.prob", 3, 3, 0, true);
    expect("04-three-branch.prob", 2, 1, 1, false);
    expect("05-hypersurface-m3-lifted.prob", 3, 3, 0, true);
    expect("06-three-branch-lifted.prob", 2, 1, 1, false);
    expect("07-regular-two-vars.prob", 0, 0, 0, true);
    expect("08-module-one-branch.prob", 2, 1, 1, false);
    expect("09-module-on-branch.prob", 3, 0, 3, false);
    // codimension-one liftings keep the defect of the finite model
    req(get("05-hypersurface-m3-lifted.prob").cert.delta ==
            get("03-hypersurface-m3.prob").cert.delta,
        "lifted hypersurface changed its defect");
    req(get("06-three-branch-lifted.prob").cert.delta ==
            get("04-three-branch.prob").cert.delta,
        "lifted three-branch ring changed its defect");
    const AnalysisReport& nr = get("10-non-reduced-point.prob");
    req(!nr.cert.applicable && nr.verdict == kVerdictOutside,
        "non-reduced point should land outside the hypotheses");
  });

  criterion(2, "defect inequality on 240 randomized instances, equality only on free shapes",
            60.0, [] {
    std::mt19937_64 rng(101);
    for (int t = 0; t < 240; ++t) {
      Shaped s = sample_shaped(rng, true);
      AnalysisReport rep = analyze(s.pr);
      req(rep.cert.applicable, "sampled instance unexpectedly outside the hypotheses");
      long lhs = rep.cert.mu * rep.cert.length_cotangent;
      req(lhs >= rep.cert.length_psi, "defect inequality violated");
      req((rep.cert.delta == 0) == s.ci_ring,
          s.ci_ring ? "free shape over a complete intersection must have defect 0"
                    : "positive defect expected away from complete intersections");
    }
  });

  criterion(3, "defect invariance along 20 random cut chains per lifted instance", 60.0, [] {
    struct Lift {
      std::vector<std::string> vars;
      std::vector<std::string> gens;
      int codim;
      long want_delta;
      bool want_ci;
    };
    std::vector<Lift> lifts = {
        {{"x", "y"}, {"x^2 - 8*x"}, 1, 0, true},
        {{"x", "y", "z"}, {"x^2 - 8*x"}, 2, 0, true},
        {{"x1", "x2", "y"}, {"x1*x2", "x1^2 - 2*x1", "x2^2 - 2*x2"}, 1, 1, false},
        {{"x1", "x2", "y", "z"}, {"x1*x2", "x1^2 - 2*x1", "x2^2 - 2*x2"}, 2, 1, false},
    };
    std::mt19937_64 rng(202);
    Dvr dvr(2);
    for (const auto& lift : lifts) {
      const int n = static_cast<int>(lift.vars.size());
      std::vector<PolyQ> gens;
      for (const auto& g : lift.gens) gens.push_back(parse_poly(n, lift.vars, g));
      PolyPresentation base =
          make_presentation(dvr, n, lift.vars, gens, Vec(n, S(0)));
      for (int chain_no = 0; chain_no < 20; ++chain_no) {
        std::vector<PolyQ> chain;
        PolyPresentation cur = base;
        for (int k = 0; k < lift.codim; ++k) {
          PolyQ cut = sample_admissible_cut(cur, rng, 64, 24);
          chain.push_back(cut);
          cur.gens.push_back(cut);
        }
        ChainReport rep = defect_via_chain(base, std::nullopt, chain, ChainOptions{});
        req(rep.cert.applicable, "chained instance not applicable");
        req(rep.cert.delta == lift.want_delta, "defect changed along a chain");
        req(rep.cert.complete_intersection == lift.want_ci, "verdict changed along a chain");
      }
    }
  });

  criterion(4, "defect formula delta(M) = mu delta(A) + len coker kappa, exactly", 60.0, [] {
    std::mt19937_64 rng(303);
    int checked = 0;
    for (int t = 0; t < 150; ++t) {
      Shaped s = sample_shaped(rng, true);
      Certificate mc = certify_c0(*s.mod, s.pt);
      if (!(mc.applicable && mc.free_at_point)) continue;
      Certificate rc = certify_c0(FinModule::regular(s.alg), s.pt);
      req(rc.applicable, "ring certificate not applicable");
      KappaResult kap = kappa_c0(*s.mod, s.pt);
      req(kap.length.has_value(), "coker(kappa) must be finite here");
      req(mc.delta == mc.mu * rc.delta + *kap.length, "defect formula violated");
      // the analysis pipeline must reach the same conclusion through its ledger
      AnalysisReport rep = analyze(s.pr);
      bool found = false;
      for (const auto& ck : rep.checks)
        if (ck.name == "defect formula") {
          found = true;
          req(ck.pass, "ledger rejects the defect formula");
        }
      req(found, "defect formula check missing from the ledger");
      ++checked;
    }
    req(checked >= 100, "only " + std::to_string(checked) + " freeness-flagged instances");
  });

  criterion(5, "koszul criteria: wedge test, defect module, fitting, wiebe", 60.0, [] {
    std::mt19937_64 rng(404);
    for (int t = 0; t < 60; ++t) {
      Shaped s = sample_shaped(rng, false);
      Certificate rc = certify_c0(FinModule::regular(s.alg), s.pt);
      req(rc.applicable, "ring certificate not applicable");
      Mat seq = minimal_kernel_generators(*s.alg, s.pt);
      KoszulComplex kc = koszul_complex(FinModule::regular(s.alg), seq);
      req(koszul_wedge_top(kc) == (rc.delta == 0),
          "top-wedge criterion disagrees with the ring defect");
      Certificate mc = certify_c0(*s.mod, s.pt);
      req(mc.applicable && mc.depth_ok, "module instance not applicable");
      FinOModule dm = koszul_defect_module(*s.mod, s.pt);
      auto len = dm.length();
      req(len.has_value() && *len == mc.delta,
          "koszul defect module length disagrees with the defect");
      fitting_inclusion_check(*s.alg, s.pt);
    }
    // quotients that stay artinian: hypersurface shapes pass, fat points fail
    for (long p : {2L, 3L}) {
      Dvr dvr(p);
      for (long m : {1L, 2L}) {
        AlgebraPtr h = hypersurface_algebra(dvr, m);
        req(wiebe_criterion(h, Mat::identity(2) * dvr.uniformizer()),
            "residue quotient of a hypersurface must be a complete intersection");
        AlgebraPtr tr = truncated_algebra(dvr, 3);
        req(wiebe_criterion(tr, Mat::identity(3) * dvr.uniformizer()),
            "truncated polynomial quotient must be a complete intersection");
      }
      AlgebraPtr sq = square_zero_algebra(dvr, 2);
      req(!wiebe_criterion(sq, Mat::identity(3) * dvr.uniformizer()),
          "fat point must fail the wiebe criterion");
      AlgebraPtr br = branches_algebra(dvr, {1, 1});
      req(!wiebe_criterion(br, Mat::identity(3) * dvr.uniformizer()),
          "three branches modulo p must fail the wiebe criterion");
    }
  });

  criterion(6, "coker(eta) matches the congruence module whenever depth >= 1", 60.0, [] {
    std::mt19937_64 rng(505);
    int checked = 0;
    for (int t = 0; t < 120; ++t) {
      Shaped s = sample_shaped(rng, true);
      Certificate mc = certify_c0(*s.mod, s.pt);
      if (!mc.applicable) continue;
      req(depth_ge1(*s.mod), "sampler produced a torsion module");
      EtaResult eta = eta_c0(*s.mod, s.pt);
      FinOModule psi = congruence_module_c0(*s.mod, s.pt);
      req(eta.coker == psi, "coker(eta) differs from the congruence module");
      ++checked;
    }
    req(checked >= 100, "only " + std::to_string(checked) + " applicable instances");
  });

  criterion(7, "closed-fiber lab: 1000 seeded instances, zero violations", 120.0, [] {
    SearchConfig cfg;
    cfg.seed = 20260815;
    cfg.instances = 1000;
    SearchReport r = desmit_search(cfg);
    req(r.instances == 1000, "wrong instance count");
    req(r.freeness_violations == 0, "freeness violation found");
    req(r.freeness_checks > 0 && r.profile_checks > 0 && r.witness_checks > 0,
        "a check battery never ran");
  });

  criterion(8, "smith reduction round-trips and the reference path agrees field by field",
            60.0, [] {
    std::mt19937_64 rng(606);
    for (int t = 0; t < 200; ++t) {
      Dvr dvr(t % 2 ? 3 : 2);
      int r = static_cast<int>(rnd(rng, 1, 12)), c = static_cast<int>(rnd(rng, 1, 12));
      Mat a(r, c);
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) {
          if (rnd(rng, 0, 3) == 0) continue;
          Scalar unit(rnd(rng, 1, 9) * (rnd(rng, 0, 1) ? 1 : -1),
                      dvr.prime() == 2 ? (rnd(rng, 0, 1) ? 1 : 3) : (rnd(rng, 0, 1) ? 1 : 2));
          a.at(i, j) = unit * dvr.pi_pow(rnd(rng, 0, 6));
        }
      SmithForm f = smith_normal_form(dvr, a);
      Mat lhs = f.U * a * f.V;
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j)
          req(lhs.at(i, j) == f.S.at(i, j), "U A V differs from S");
      for (std::size_t k = 1; k < f.divisors.size(); ++k)
        req(f.divisors[k - 1] <= f.divisors[k], "divisor chain not ascending");
    }
    std::mt19937_64 rng2(707);
    for (int t = 0; t < 30; ++t) {
      Shaped s = sample_shaped(rng2, true);
      AnalysisReport rep = analyze(s.pr);
      AnalysisReport ref = oracle_recompute(s.pr);
      std::vector<std::string> diffs = invariant_mismatches(rep, ref);
      req(diffs.empty(), diffs.empty() ? "" : "reference mismatch: " + diffs[0]);
    }
  });

  return failures == 0 ? 0 : 1;
}
