#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "congmod/engine.hpp"
#include "congmod/generators.hpp"
#include "congmod/problem.hpp"
#include "congmod/report.hpp"

using namespace congmod;

namespace {

Scalar S(long v) { return Scalar(v); }

template <class F>
ErrKind thrown_kind(F&& f, std::string* msg = nullptr) {
  try {
    f();
  } catch (const Error& e) {
    if (msg) *msg = e.what();
    return e.kind();
  }
  FAIL("expected an error");
  return ErrKind::internal_inconsistency;
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

Problem poly_problem(long p, const std::vector<std::string>& names,
                     const std::vector<std::string>& gens, const Vec& point,
                     const std::vector<std::string>& chain = {}) {
  Problem pr;
  pr.prime = p;
  pr.kind = RingKind::poly;
  pr.names = names;
  const int n = static_cast<int>(names.size());
  for (const auto& g : gens) pr.ring_gens.push_back(parse_poly(n, names, g));
  for (const auto& c : chain) pr.chain.push_back(parse_poly(n, names, c));
  pr.point = point;
  return pr;
}

// Run both routes; both must throw the same kind or agree on every invariant.
void check_agreement(const Problem& pr) {
  std::optional<ErrKind> ek, ok;
  AnalysisReport a, b;
  try {
    a = analyze(pr);
  } catch (const Error& e) {
    ek = e.kind();
  }
  try {
    b = oracle_recompute(pr);
  } catch (const Error& e) {
    ok = e.kind();
  }
  if (ek || ok) {
    REQUIRE(ek.has_value());
    REQUIRE(ok.has_value());
    CHECK(errkind_name(*ek) == errkind_name(*ok));
    return;
  }
  std::vector<std::string> diffs = invariant_mismatches(a, b);
  for (const auto& d : diffs) MESSAGE(d);
  CHECK(diffs.empty());
}

const CrossCheck* find_check(const AnalysisReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return &c;
  return nullptr;
}

bool has_warning(const AnalysisReport& r, const std::string& text) {
  for (const auto& w : r.warnings)
    if (w == text) return true;
  return false;
}

}  // namespace

TEST_CASE("base ring report") {
  Problem pr = table_problem(trivial_algebra(Dvr(5)), {S(1)});
  AnalysisReport rep = analyze(pr);
  CHECK(rep.model_dim == 1);
  CHECK(rep.edim == 1);
  CHECK(rep.cert.mu == 1);
  CHECK(rep.cert.applicable);
  CHECK(rep.cert.length_cotangent == 0);
  CHECK(rep.cert.length_psi == 0);
  CHECK(rep.cert.delta == 0);
  CHECK(rep.verdict == kVerdictCi);
  CHECK(rep.warnings.empty());
  check_agreement(pr);
}

TEST_CASE("hypersurface tables across contact orders") {
  for (long p : {2L, 3L}) {
    for (long m : {1L, 2L, 3L}) {
      Dvr dvr(p);
      Problem pr = table_problem(hypersurface_algebra(dvr, m), {S(1), S(0)});
      AnalysisReport rep = analyze(pr);
      CHECK(rep.edim == 2);
      CHECK(rep.cert.mu == 1);
      CHECK(rep.cert.applicable);
      CHECK(rep.cert.length_cotangent == m);
      CHECK(rep.cert.length_psi == m);
      CHECK(rep.cert.delta == 0);
      CHECK(rep.cert.complete_intersection);
      CHECK(rep.cert.free_summand);
      CHECK(rep.verdict == kVerdictCi);
      // the other branch of the same hypersurface
      Problem other = table_problem(hypersurface_algebra(dvr, m), {S(1), dvr.pi_pow(m)});
      CHECK(analyze(other).cert.delta == 0);
      check_agreement(pr);
      check_agreement(other);
    }
  }
}

TEST_CASE("three branches through the origin are not a complete intersection") {
  Dvr dvr(2);
  Problem pr = table_problem(branches_algebra(dvr, {1, 1}), {S(1), S(0), S(0)});
  AnalysisReport rep = analyze(pr);
  CHECK(rep.model_dim == 3);
  CHECK(rep.edim == 3);
  CHECK(rep.cert.mu == 1);
  CHECK(rep.cert.applicable);
  CHECK(rep.cert.length_cotangent == 2);
  CHECK(rep.cert.length_psi == 1);
  CHECK(rep.cert.delta == 1);
  CHECK_FALSE(rep.cert.complete_intersection);
  CHECK(rep.verdict == kVerdictDefect);
  check_agreement(pr);
}

TEST_CASE("cyclic module cut out by one branch") {
  Dvr dvr(2);
  Problem pr = table_problem(branches_algebra(dvr, {1, 1}), {S(1), S(0), S(0)});
  pr.table_module = TableModule{1, {{S(0), S(1), S(0)}}};  // A / (x1)
  AnalysisReport rep = analyze(pr);
  CHECK(rep.cert.mu == 1);
  CHECK(rep.cert.supported);
  CHECK(rep.cert.free_at_point);
  CHECK(rep.cert.depth_ok);
  CHECK(rep.cert.applicable);
  CHECK(rep.cert.length_cotangent == 2);
  CHECK(rep.cert.length_psi == 1);
  CHECK(rep.cert.delta == 1);
  CHECK(rep.verdict == kVerdictDefect);
  check_agreement(pr);
}

TEST_CASE("module supported away from the point, with base torsion") {
  Dvr dvr(2);
  Problem pr = table_problem(branches_algebra(dvr, {1, 1}), {S(1), S(0), S(0)});
  pr.table_module = TableModule{1, {{S(-2), S(0), S(1)}}};  // A / (x2 - 2)
  AnalysisReport rep = analyze(pr);
  CHECK(rep.cert.mu == 0);
  CHECK_FALSE(rep.cert.supported);
  CHECK_FALSE(rep.cert.depth_ok);
  CHECK(rep.cert.regular);
  CHECK_FALSE(rep.cert.applicable);
  CHECK(rep.verdict == kVerdictOutside);
  REQUIRE(rep.raw_cotangent_length.has_value());
  REQUIRE(rep.raw_psi_length.has_value());
  CHECK(*rep.raw_cotangent_length == 2);
  CHECK(*rep.raw_psi_length == 1);
  REQUIRE(rep.raw_delta.has_value());
  CHECK(*rep.raw_delta == -1);
  CHECK(has_warning(rep, "the module vanishes at the point"));
  CHECK(has_warning(rep, "the module has nonzero torsion over the base ring"));
  CHECK(has_warning(rep, "negative defect, outside the proven inequality"));
  check_agreement(pr);
}

TEST_CASE("non-reduced generic fiber is reported, not rejected") {
  Dvr dvr(2);
  Problem pr = table_problem(square_zero_algebra(dvr, 1), {S(1), S(0)});
  AnalysisReport rep = analyze(pr);
  CHECK_FALSE(rep.cert.regular);
  CHECK_FALSE(rep.cert.applicable);
  CHECK(rep.verdict == kVerdictOutside);
  CHECK_FALSE(rep.raw_cotangent_length.has_value());
  CHECK_FALSE(rep.raw_psi_length.has_value());
  CHECK(has_warning(rep, "the point is not a reduced isolated point of the generic fiber"));
  check_agreement(pr);

  // same ring presented polynomially: the strict chain route refuses it, the
  // analysis downgrades instead
  Problem pp = poly_problem(2, {"x"}, {"x^2"}, {S(0)});
  AnalysisReport rp = analyze(pp);
  CHECK_FALSE(rp.cert.regular);
  CHECK(rp.verdict == kVerdictOutside);
  check_agreement(pp);
}

TEST_CASE("cross-check ledger on an applicable instance") {
  Dvr dvr(2);
  Problem pr = table_problem(branches_algebra(dvr, {1, 1}), {S(1), S(0), S(0)});
  AnalysisReport rep = analyze(pr);
  for (const char* name : {"fitting inclusion", "eta cokernel", "defect formula",
                           "wedge criterion", "koszul defect module"}) {
    const CrossCheck* c = find_check(rep, name);
    REQUIRE_MESSAGE(c != nullptr, name);
    CHECK_MESSAGE(c->pass, name);
  }
  Problem off = pr;
  off.run_checks = false;
  CHECK(analyze(off).checks.empty());
}

TEST_CASE("polynomial hypersurface with no cuts needed") {
  Problem pr = poly_problem(2, {"x"}, {"x^2 - 8*x"}, {S(0)});
  AnalysisReport rep = analyze(pr);
  CHECK(rep.kind == RingKind::poly);
  CHECK(rep.model_dim == 2);
  CHECK(rep.expected_cuts == 0);
  CHECK(rep.chain.empty());
  CHECK(rep.cert.length_cotangent == 3);
  CHECK(rep.cert.length_psi == 3);
  CHECK(rep.cert.delta == 0);
  CHECK(rep.verdict == kVerdictCi);
  const CrossCheck* jc = find_check(rep, "jacobian conormal");
  REQUIRE(jc != nullptr);
  CHECK(jc->pass);
  check_agreement(pr);
}

TEST_CASE("cut chain reaches the same certificate as the finite table") {
  Problem pr = poly_problem(2, {"x", "y"}, {"x^2 - 8*x"}, {S(0), S(0)}, {"y"});
  AnalysisReport rep = analyze(pr);
  CHECK(rep.expected_cuts == 1);
  REQUIRE(rep.chain.size() == 1);
  CHECK(rep.chain[0].rank_jump);
  CHECK(rep.chain[0].regular_generic);
  CHECK(rep.chain[0].regular_special);
  CHECK_FALSE(rep.chain[0].module_regularity_assumed);
  CHECK(rep.cert.delta == 0);
  CHECK(rep.cert.length_psi == 3);
  const CrossCheck* kd = find_check(rep, "koszul defect module");
  REQUIRE(kd != nullptr);
  CHECK(kd->pass);
  check_agreement(pr);

  // lifted three-branch configuration keeps its defect
  Problem br = poly_problem(2, {"x1", "x2", "y"},
                            {"x1*x2", "x1^2 - 2*x1", "x2^2 - 2*x2"},
                            {S(0), S(0), S(0)}, {"y"});
  AnalysisReport rb = analyze(br);
  CHECK(rb.expected_cuts == 1);
  CHECK(rb.cert.delta == 1);
  CHECK(rb.verdict == kVerdictDefect);
  check_agreement(br);
}

TEST_CASE("chain length must match the jacobian corank") {
  Problem pr = poly_problem(2, {"x", "y"}, {"x^2 - 8*x"}, {S(0), S(0)});
  CHECK(thrown_kind([&] { analyze(pr); }) == ErrKind::chain_length_mismatch);
  CHECK(thrown_kind([&] { oracle_recompute(pr); }) == ErrKind::chain_length_mismatch);
  CHECK(errkind_exit_code(ErrKind::chain_length_mismatch) == 1);
}

TEST_CASE("malformed problems are rejected the same way by both routes") {
  Dvr dvr(2);
  auto kinds_match = [](const Problem& pr, ErrKind want) {
    CHECK(thrown_kind([&] { analyze(pr); }) == want);
    CHECK(thrown_kind([&] { oracle_recompute(pr); }) == want);
  };

  Problem base = table_problem(hypersurface_algebra(dvr, 1), {S(1), S(0)});

  Problem bad = base;
  bad.mult[1].at(0, 1) = Scalar(1, 2);
  kinds_match(bad, ErrKind::validation);
  CHECK(errkind_exit_code(ErrKind::validation) == 2);

  bad = base;
  bad.mult[1].at(0, 0) = S(7);  // x * 1 != 1 * x
  kinds_match(bad, ErrKind::validation);

  // commutative but non-associative: x*x = y, x*y = 1, y*y = 0
  Problem na;
  na.prime = 2;
  na.labels = {"1", "x", "y"};
  na.unit = {S(1), S(0), S(0)};
  Mat m0(3, 3), m1(3, 3), m2(3, 3);
  for (int i = 0; i < 3; ++i) m0.at(i, i) = S(1);
  m1.at(1, 0) = S(1);
  m1.at(2, 1) = S(1);
  m1.at(0, 2) = S(1);
  m2.at(2, 0) = S(1);
  m2.at(0, 1) = S(1);
  na.mult = {m0, m1, m2};
  na.point = {S(1), S(0), S(0)};
  kinds_match(na, ErrKind::not_associative);

  // split product ring is not local
  Problem nl;
  nl.prime = 2;
  nl.labels = {"e1", "e2"};
  nl.unit = {S(1), S(1)};
  Mat e1(2, 2), e2(2, 2);
  e1.at(0, 0) = S(1);
  e2.at(1, 1) = S(1);
  nl.mult = {e1, e2};
  nl.point = {S(1), S(1)};
  kinds_match(nl, ErrKind::not_local);

  bad = base;
  bad.prime = 4;
  kinds_match(bad, ErrKind::validation);

  bad = base;
  bad.point = {S(1), S(1)};
  kinds_match(bad, ErrKind::not_algebra_map);

  bad = base;
  bad.point = {S(1)};
  kinds_match(bad, ErrKind::not_algebra_map);

  bad = base;
  bad.table_module = TableModule{1, {{S(0), S(1), S(0)}}};
  kinds_match(bad, ErrKind::validation);

  bad = base;
  bad.table_module = TableModule{1, {{S(1), S(0)}}};  // A / (1) = 0
  kinds_match(bad, ErrKind::validation);

  bad = base;
  bad.chain.push_back(parse_poly(1, {"t"}, "t"));
  kinds_match(bad, ErrKind::validation);

  Problem pp = poly_problem(2, {"x"}, {"x^2 - 2*x"}, {S(0)});
  pp.table_module = TableModule{1, {{S(0), S(1)}}};
  kinds_match(pp, ErrKind::validation);
}

TEST_CASE("randomized differential sweep over the stock families") {
  std::mt19937_64 rng(20260815);
  auto rnd = [&](long lo, long hi) {
    return static_cast<long>(lo + static_cast<long>(rng() % static_cast<unsigned long>(hi - lo + 1)));
  };
  int done = 0;
  while (done < 40) {
    long p = rnd(0, 1) ? 2 : 3;
    Dvr dvr(p);
    AlgebraPtr a;
    switch (rnd(0, 4)) {
      case 0:
        a = hypersurface_algebra(dvr, rnd(1, 4));
        break;
      case 1:
        a = branches_algebra(dvr, {rnd(1, 2), rnd(1, 2)});
        break;
      case 2:
        a = tensor_algebra(hypersurface_algebra(dvr, rnd(1, 2)),
                           hypersurface_algebra(dvr, rnd(1, 2)));
        break;
      case 3:
        a = truncated_algebra(dvr, static_cast<int>(rnd(2, 3)));
        break;
      default:
        a = square_zero_algebra(dvr, static_cast<int>(rnd(1, 2)));
        break;
    }
    Vec lambda(a->dim(), S(0));
    lambda[0] = S(1);
    Problem pr = table_problem(a, lambda);
    if (rnd(0, 2) == 0) {
      TableModule tm;
      tm.gens = static_cast<int>(rnd(1, 2));
      const int len = tm.gens * a->dim();
      int ncols = static_cast<int>(rnd(0, 2));
      for (int c = 0; c < ncols; ++c) {
        Vec col(len, S(0));
        for (auto& x : col) {
          long v = rnd(0, 5);
          x = v == 4 ? Scalar(p) : v == 5 ? S(-1) : S(v % 3);
        }
        col[static_cast<size_t>(rnd(0, len - 1))] = S(1);  // keep it nonzero
        tm.columns.push_back(col);
      }
      pr.table_module = tm;
    }
    check_agreement(pr);
    ++done;
  }
}

TEST_CASE("problem files round-trip through the canonical printer") {
  const std::string table_text =
      "# three branches\n"
      "[dvr]\n"
      "prime = 2\n"
      "[ring]\n"
      "kind = table\n"
      "dim = 3\n"
      "labels = 1 x1 x2\n"
      "unit = 1 0 0\n"
      "mult 0 0 = 1 0 0\n"
      "mult 0 1 = 0 1 0\n"
      "mult 0 2 = 0 0 1\n"
      "mult 1 1 = 0 2 0\n"
      "mult 1 2 = 0 0 0\n"
      "mult 2 2 = 0 0 2\n"
      "[point]\n"
      "values = 1 0 0\n"
      "[module]\n"
      "gens = 1\n"
      "col = 0 1 0\n";
  const std::string poly_text =
      "[dvr]\n"
      "prime = 2\n"
      "[ring]\n"
      "kind = poly\n"
      "vars = x y\n"
      "gen = x^2 - 8*x\n"
      "[chain]\n"
      "cut = y\n"
      "[point]\n"
      "values = 0 0\n"
      "[checks]\n"
      "strict = on\n";
  for (const std::string& text : {table_text, poly_text}) {
    Problem pr = parse_problem_text(text, "t.prob");
    std::string printed = print_problem(pr);
    Problem back = parse_problem_text(printed, "t2.prob");
    CHECK(print_problem(back) == printed);
    AnalysisReport a = analyze(pr);
    AnalysisReport b = analyze(back);
    for (const auto& d : invariant_mismatches(a, b)) MESSAGE(d);
    CHECK(invariant_mismatches(a, b).empty());
  }
}

TEST_CASE("parse diagnostics carry file, line, and column") {
  auto parse_err = [](const std::string& text) {
    try {
      parse_problem_text(text, "t.prob");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrKind::parse);
      return std::string(e.what());
    }
    return std::string("(no error)");
  };
  CHECK(parse_err("[dvr]\nprime = 5\n[ring]\n[rings]\n") ==
        "ParseError: t.prob:4:1: unknown section [rings]");
  CHECK(parse_err("[dvr]\nprime = 5\n[ring]\nkind = table\ndim = 1\nlabels = 1\n"
                  "unit = x\n") == "ParseError: t.prob:7:8: bad scalar 'x'");
  CHECK(parse_err("[dvr]\nprime = 5\nprime = 7\n") ==
        "ParseError: t.prob:3:1: duplicate key 'prime'");
  CHECK(parse_err("prime = 5\n") == "ParseError: t.prob:1:1: key outside any section");
  CHECK(parse_err("[dvr]\nprime = 5\n[ring]\ndim = 1\n") ==
        "ParseError: t.prob:4:1: kind must be the first key in [ring]");
  CHECK(parse_err("[dvr]\nprime = 5\n[ring]\nkind = table\ndim = 1\nlabels = 1\n"
                  "unit = 1\nmult 0 0 = 1\n[point]\nvalues = 1\n[checks]\ncross = maybe\n") ==
        "ParseError: t.prob:12:9: expected on or off, got 'maybe'");
  CHECK(parse_err("[dvr]\nprime = 5\n[ring]\nkind = table\ndim = 2\nlabels = 1 x\n"
                  "unit = 1 0\nmult 0 0 = 1 0\nmult 0 1 = 0 1\n[point]\nvalues = 1 0\n") ==
        "ParseError: t.prob: missing product for basis pair (1, 1)");
  CHECK(parse_err("[dvr]\nprime = 5\n[ring]\nkind = table\ndim = 1\nlabels = 1\n"
                  "unit = 1\nmult 0 0 = 1\n") == "ParseError: t.prob: point required");
  CHECK(parse_err("[dvr]\nprime = 5\n[ring]\nkind = table\ndim = 1\nlabels = 1\n"
                  "unit = 1\nmult 0 0 = 1\n[chain]\ncut = x\n[point]\nvalues = 1\n") ==
        "ParseError: t.prob:9:1: section [chain] needs a polynomial ring");
  CHECK(parse_err("[dvr]\nprime = 5\n[ring]\nkind = poly\nvars = x\ngen = x^^2\n"
                  "[point]\nvalues = 0\n")
            .substr(0, 22) == "ParseError: t.prob:6:7");
}

TEST_CASE("machine reports are byte deterministic") {
  Problem pr;
  pr.prime = 2;
  pr.kind = RingKind::poly;
  pr.names = {"x", "y"};
  pr.ring_gens = {parse_poly(2, pr.names, "x^2 - 8*x")};
  pr.point = {S(0), S(0)};
  pr.chain = {parse_poly(2, pr.names, "y")};
  std::string first = render_machine(analyze(pr));
  CHECK(render_machine(analyze(pr)) == first);
  Problem back = parse_problem_text(print_problem(pr), "r.prob");
  CHECK(render_machine(analyze(back)) == first);
  std::string text = render_text(analyze(pr));
  CHECK(text.find("verdict: complete intersection with free summand") != std::string::npos);
  CHECK(text.find("wiles defect: 0") != std::string::npos);
}
