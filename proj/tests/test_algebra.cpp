#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "congmod/algebra.hpp"
#include "congmod/generators.hpp"

using namespace congmod;

namespace {

Mat cols_mat(const std::vector<Vec>& cols, int nrows) { return Mat::from_cols(cols, nrows); }

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

}  // namespace

TEST_CASE("base ring is a complete intersection at its unique point") {
  Dvr dvr(5);
  AlgebraPtr a = trivial_algebra(dvr);
  OPoint pt = origin_point(*a);
  CHECK(a->edim() == 1);
  CHECK(is_regular_c0(*a, pt));
  FinModule m = FinModule::regular(a);
  Certificate c = certify_c0(m, pt);
  CHECK(c.mu == 1);
  CHECK(c.supported);
  CHECK(c.free_at_point);
  CHECK(c.depth_ok);
  CHECK(c.applicable);
  CHECK(c.length_cotangent == 0);
  CHECK(c.length_psi == 0);
  CHECK(c.delta == 0);
  CHECK(c.complete_intersection);
  fitting_inclusion_check(*a, pt);
}

TEST_CASE("hypersurface with two branches meeting to order m") {
  for (long p : {2L, 5L}) {
    for (long m : {1L, 3L}) {
      Dvr dvr(p);
      AlgebraPtr a = hypersurface_algebra(dvr, m);
      CHECK(a->edim() == 2);
      OPoint pt = origin_point(*a);
      CHECK(lattice_eq(dvr, pt.kernel, cols_mat({{S(0), S(1)}}, 2)));

      Mat ann = point_annihilator_ideal(*a, pt);
      CHECK(lattice_eq(dvr, ann, cols_mat({{Scalar(0) - dvr.pi_pow(m), S(1)}}, 2)));

      FinModule M = FinModule::regular(a);
      CHECK(lattice_eq(dvr, annihilator_lattice(M, ann), cols_mat({{S(0), S(1)}}, 2)));

      FinOModule psi = congruence_module_c0(M, pt);
      CHECK(psi.divisors() == std::vector<long>{m});
      CHECK(psi.free_rank() == 0);
      FinOModule cot = cotangent(*a, pt);
      CHECK(cot.divisors() == std::vector<long>{m});

      RankAtPoint rk = rank_at_point(M, pt);
      CHECK(rk.mu == 1);
      CHECK(rk.dim_local_algebra == 1);
      CHECK(rk.free_at_point);

      Certificate c = wiles_defect_c0(M, pt);
      CHECK(c.delta == 0);
      CHECK(c.complete_intersection);
      CHECK(c.applicable);

      EtaResult eta = eta_c0(M, pt);
      CHECK(eta.coker.divisors() == psi.divisors());
      CHECK(eta.coker_length == psi.length());

      KappaResult kap = kappa_c0(M, pt);
      CHECK(kap.length == 0);

      fitting_inclusion_check(*a, pt);

      // the other branch carries the same invariants
      OPoint branch = coordinate_point(*a, {dvr.pi_pow(m)});
      Certificate cb = wiles_defect_c0(M, branch);
      CHECK(cb.delta == 0);
      CHECK(congruence_module_c0(M, branch).divisors() == std::vector<long>{m});
      fitting_inclusion_check(*a, branch);
    }
  }
}

TEST_CASE("three branches through the origin") {
  Dvr dvr(3);
  AlgebraPtr a = branches_algebra(dvr, {1, 1});
  OPoint pt = origin_point(*a);
  CHECK(is_regular_c0(*a, pt));

  Mat ann = point_annihilator_ideal(*a, pt);
  CHECK(lattice_eq(dvr, ann, cols_mat({{S(-3), S(1), S(1)}}, 3)));

  FinModule M = FinModule::regular(a);
  CHECK(lattice_eq(dvr, annihilator_lattice(M, pt.kernel), ann));
  CHECK(lattice_eq(dvr, annihilator_lattice(M, ann), pt.kernel));

  FinOModule psi = congruence_module_c0(M, pt);
  CHECK(psi.divisors() == std::vector<long>{1});
  FinOModule cot = cotangent(*a, pt);
  CHECK(cot.divisors() == std::vector<long>{1, 1});

  Certificate c = wiles_defect_c0(M, pt);
  CHECK(c.mu == 1);
  CHECK(c.delta == 1);
  CHECK_FALSE(c.complete_intersection);
  CHECK(c.applicable);

  EtaResult eta = eta_c0(M, pt);
  CHECK(eta.coker_length == psi.length());
  KappaResult kap = kappa_c0(M, pt);
  CHECK(kap.length == 0);
  fitting_inclusion_check(*a, pt);
}

TEST_CASE("branch exponents add up through the defect") {
  Dvr dvr(2);
  AlgebraPtr a = branches_algebra(dvr, {2, 3});
  OPoint pt = origin_point(*a);
  FinModule M = FinModule::regular(a);
  FinOModule psi = congruence_module_c0(M, pt);
  CHECK(psi.divisors() == std::vector<long>{3});
  FinOModule cot = cotangent(*a, pt);
  CHECK(cot.divisors() == std::vector<long>{2, 3});
  Certificate c = wiles_defect_c0(M, pt);
  CHECK(c.delta == 2);  // (2 + 3) - max(2, 3)
  CHECK_FALSE(c.complete_intersection);
  EtaResult eta = eta_c0(M, pt);
  CHECK(eta.coker_length == psi.length());
  fitting_inclusion_check(*a, pt);
}

TEST_CASE("tensor product of two hypersurfaces stays a complete intersection") {
  Dvr dvr(2);
  AlgebraPtr a = tensor_algebra(hypersurface_algebra(dvr, 1), hypersurface_algebra(dvr, 1));
  CHECK(a->dim() == 4);
  OPoint pt = origin_point(*a);
  CHECK(is_regular_c0(*a, pt));
  FinModule M = FinModule::regular(a);
  FinOModule psi = congruence_module_c0(M, pt);
  CHECK(psi.divisors() == std::vector<long>{2});
  FinOModule cot = cotangent(*a, pt);
  CHECK(cot.divisors() == std::vector<long>{1, 1});
  Certificate c = wiles_defect_c0(M, pt);
  CHECK(c.delta == 0);
  CHECK(c.complete_intersection);
  EtaResult eta = eta_c0(M, pt);
  CHECK(eta.coker.divisors() == psi.divisors());
  fitting_inclusion_check(*a, pt);
}

TEST_CASE("kernel ideal as a module is unsupported at the point") {
  // M = ker(lambda) over the hypersurface; it is the other branch in
  // disguise, so it vanishes at lambda and mu = 0.
  Dvr dvr(2);
  const long m = 2;
  AlgebraPtr a = hypersurface_algebra(dvr, m);
  OPoint pt = origin_point(*a);
  FinModule M = FinModule::algebra_presentation(
      a, 1, cols_mat({{Scalar(0) - dvr.pi_pow(m), S(1)}}, 2));
  CHECK(depth_ge1(M));
  CHECK(M.underlying().free_rank() == 1);

  RankAtPoint rk = rank_at_point(M, pt);
  CHECK(rk.mu == 0);
  CHECK_FALSE(rk.supported);
  CHECK(thrown_kind([&] { wiles_defect_c0(M, pt); }) == ErrKind::not_supported);

  Certificate c = certificate_c0(M, pt, false);
  CHECK_FALSE(c.applicable);
  CHECK(c.regular);
  CHECK(c.depth_ok);

  // both the direct computation and the defect bookkeeping give zero here
  KappaResult kap = kappa_c0(M, pt);
  CHECK(kap.length == 0);
  FinOModule psi = congruence_module_c0(M, pt);
  CHECK(psi.length() == 0);
}

TEST_CASE("branch quotient is free at the point but carries positive defect") {
  for (long m : {1L, 3L}) {
    Dvr dvr(2);
    AlgebraPtr a = hypersurface_algebra(dvr, m);
    OPoint pt = origin_point(*a);
    // A / (x): the lambda branch itself
    FinModule M = FinModule::quotient_ring(a, cols_mat({{S(0), S(1)}}, 2));
    RankAtPoint rk = rank_at_point(M, pt);
    CHECK(rk.mu == 1);
    CHECK(rk.free_at_point);
    CHECK(rk.supported);
    Certificate c = wiles_defect_c0(M, pt);
    CHECK(c.length_psi == 0);
    CHECK(c.delta == m);
    CHECK_FALSE(c.complete_intersection);
    KappaResult kap = kappa_c0(M, pt);
    CHECK(kap.length == m);  // delta(M) = mu * delta(A) + len coker kappa
    EtaResult eta = eta_c0(M, pt);
    CHECK(eta.coker_length == 0);
  }
}

TEST_CASE("module supported only on the structure branch of three") {
  Dvr dvr(3);
  AlgebraPtr a = branches_algebra(dvr, {1, 1});
  OPoint pt = origin_point(*a);

  // A / p_lambda: kappa sees the defect of the algebra
  FinModule M0 = FinModule::quotient_ring(a, pt.kernel);
  Certificate c0 = wiles_defect_c0(M0, pt);
  CHECK(c0.mu == 1);
  CHECK(c0.length_psi == 0);
  CHECK(c0.delta == 2);
  CHECK(kappa_c0(M0, pt).length == 1);  // 2 = 1 * delta(A) + 1

  // A / (x1): two branches survive
  FinModule M1 = FinModule::quotient_ring(a, cols_mat({{S(0), S(1), S(0)}}, 3));
  Certificate c1 = wiles_defect_c0(M1, pt);
  CHECK(c1.mu == 1);
  CHECK(c1.length_psi == 1);
  CHECK(c1.delta == 1);
  CHECK(kappa_c0(M1, pt).length == 0);  // 1 = 1 * delta(A) + 0
  EtaResult eta = eta_c0(M1, pt);
  CHECK(eta.coker_length == 1);
}

TEST_CASE("direct sum with the branch quotient is not split") {
  Dvr dvr(2);
  AlgebraPtr a = hypersurface_algebra(dvr, 1);
  OPoint pt = origin_point(*a);
  FinModule A = FinModule::regular(a);
  FinModule B = FinModule::quotient_ring(a, cols_mat({{S(0), S(1)}}, 2));
  FinModule M = FinModule::direct_sum(A, B);
  Certificate c = wiles_defect_c0(M, pt);
  CHECK(c.mu == 2);
  CHECK(c.free_at_point);
  CHECK(c.length_psi == 1);
  CHECK(c.length_cotangent == 1);
  CHECK(c.delta == 1);
  CHECK_FALSE(c.free_summand);
}

TEST_CASE("torsion summand trips the depth gate") {
  Dvr dvr(2);
  AlgebraPtr a = hypersurface_algebra(dvr, 1);
  OPoint pt = origin_point(*a);
  FinModule A = FinModule::regular(a);
  FinModule T = FinModule::quotient_ring(a, Mat::identity(2) * dvr.uniformizer());
  CHECK_FALSE(depth_ge1(T));
  FinModule M = FinModule::direct_sum(A, T);
  CHECK(thrown_kind([&] { wiles_defect_c0(M, pt); }) == ErrKind::zero_depth);
  Certificate c = certificate_c0(M, pt, false);
  CHECK(c.supported);
  CHECK(c.regular);
  CHECK_FALSE(c.depth_ok);
  CHECK_FALSE(c.applicable);
}

TEST_CASE("non reduced point is rejected and has infinite congruence module") {
  Dvr dvr(2);
  AlgebraPtr a = square_zero_algebra(dvr, 1);  // O[x]/(x^2)
  OPoint pt = origin_point(*a);
  CHECK_FALSE(is_regular_c0(*a, pt));
  FinModule M = FinModule::regular(a);
  FinOModule psi = congruence_module_c0(M, pt);
  CHECK(psi.free_rank() == 1);
  CHECK_FALSE(psi.length().has_value());
  CHECK(thrown_kind([&] { wiles_defect_c0(M, pt); }) == ErrKind::not_regular_point);
  fitting_inclusion_check(*a, pt);

  AlgebraPtr t3 = truncated_algebra(dvr, 3);
  OPoint pt3 = origin_point(*t3);
  CHECK(rank_at_point(FinModule::regular(t3), pt3).dim_local_algebra == 3);
  CHECK_FALSE(is_regular_c0(*t3, pt3));
  fitting_inclusion_check(*t3, pt3);
}

TEST_CASE("square zero surface passes the fitting inclusion without being regular") {
  Dvr dvr(3);
  AlgebraPtr a = square_zero_algebra(dvr, 2);
  OPoint pt = origin_point(*a);
  CHECK_FALSE(is_regular_c0(*a, pt));
  // absolute embedding dimension of the local ring: p, x1, x2 stay
  // independent modulo the square of the maximal ideal
  CHECK(a->edim() == 3);
  fitting_inclusion_check(*a, pt);
}

TEST_CASE("locality is enforced with a witness") {
  std::string msg;
  {
    // O[x]/(x^2 - 2x) splits away from p = 2
    Dvr dvr(3);
    Mat m1(2, 2);
    m1.set(1, 0, S(1));
    m1.set(1, 1, S(2));
    ErrKind k = thrown_kind(
        [&] { FinAlgebra::make(dvr, {"1", "x"}, {Mat::identity(2), m1}, {S(1), S(0)}); }, &msg);
    CHECK(k == ErrKind::not_local);
    CHECK(msg.find("idempotent") != std::string::npos);
  }
  {
    // residue field grows: O[x]/(x^2 - 2) at p = 5
    Dvr dvr(5);
    Mat m1(2, 2);
    m1.set(1, 0, S(1));
    m1.set(0, 1, S(2));
    ErrKind k = thrown_kind(
        [&] { FinAlgebra::make(dvr, {"1", "x"}, {Mat::identity(2), m1}, {S(1), S(0)}); }, &msg);
    CHECK(k == ErrKind::not_local);
    CHECK(msg.find("semisimple") != std::string::npos);
  }
  {
    // same presentation is local at p = 2 where x^2 - 2 ramifies
    Dvr dvr(2);
    Mat m1(2, 2);
    m1.set(1, 0, S(1));
    m1.set(0, 1, S(2));
    AlgebraPtr a = FinAlgebra::make(dvr, {"1", "x"}, {Mat::identity(2), m1}, {S(1), S(0)});
    CHECK(a->edim() == 1);  // x generates the maximal ideal, p = x^2 / 2 * 2
  }
}

TEST_CASE("defective multiplication tables are rejected") {
  Dvr dvr(2);
  {
    // x*x = y, y*y = x, x*y = 0 is commutative but not associative
    Mat mx(3, 3), my(3, 3);
    mx.set(1, 0, S(1));
    mx.set(2, 1, S(1));
    my.set(2, 0, S(1));
    my.set(1, 2, S(1));
    std::string msg;
    ErrKind k = thrown_kind(
        [&] {
          FinAlgebra::make(dvr, {"1", "x", "y"}, {Mat::identity(3), mx, my},
                           {S(1), S(0), S(0)});
        },
        &msg);
    CHECK(k == ErrKind::not_associative);
    CHECK(msg.find("associativity") != std::string::npos);
  }
  {
    // x*y != y*x
    Mat mx(3, 3), my(3, 3);
    mx.set(1, 0, S(1));
    mx.set(0, 2, S(1));  // x*y = 1
    my.set(2, 0, S(1));  // y*x = 0
    ErrKind k = thrown_kind([&] {
      FinAlgebra::make(dvr, {"1", "x", "y"}, {Mat::identity(3), mx, my}, {S(1), S(0), S(0)});
    });
    CHECK(k == ErrKind::validation);
  }
  {
    // designated unit does not act as the identity
    Mat m0(2, 2), m1(2, 2);
    m0.set(0, 0, S(1));
    m0.set(1, 1, S(2));
    m1.set(1, 0, S(2));
    std::string msg;
    ErrKind k = thrown_kind(
        [&] { FinAlgebra::make(dvr, {"1", "x"}, {m0, m1}, {S(1), S(0)}); }, &msg);
    CHECK(k == ErrKind::validation);
    CHECK(msg.find("unit") != std::string::npos);
  }
}

TEST_CASE("points must be algebra maps into the base ring") {
  Dvr dvr(2);
  AlgebraPtr a = hypersurface_algebra(dvr, 1);
  std::string msg;
  ErrKind k = thrown_kind([&] { point_kernel(*a, {S(1), S(1)}); }, &msg);
  CHECK(k == ErrKind::not_algebra_map);
  CHECK(msg.find("multiplicative") != std::string::npos);
  CHECK(thrown_kind([&] { point_kernel(*a, {S(1)}); }) == ErrKind::not_algebra_map);
  CHECK(thrown_kind([&] { point_kernel(*a, {S(1), Scalar(1, 2)}); }) ==
        ErrKind::not_algebra_map);
  CHECK(thrown_kind([&] { point_kernel(*a, {S(0), S(0)}); }) == ErrKind::not_algebra_map);
}

TEST_CASE("module construction validates the action") {
  Dvr dvr(2);
  AlgebraPtr a = hypersurface_algebra(dvr, 1);
  // the span of 1 alone is not an ideal
  CHECK(thrown_kind([&] {
          FinModule::quotient_ring(a, cols_mat({{S(1), S(0)}}, 2));
        }) == ErrKind::validation);
  // ragged action matrices
  CHECK(thrown_kind([&] {
          FinModule(a, 1, Mat(1, 0), {Mat::identity(1)});
        }) == ErrKind::validation);
}

TEST_CASE("nakayama selection counts minimal generators in quotient coordinates") {
  Dvr dvr(3);
  // (p) / (p^2) inside O needs one generator even though p reduces to 0 mod p
  Mat k = cols_mat({{S(3)}}, 1);
  Mat t = cols_mat({{S(9)}}, 1);
  std::vector<int> sel = nakayama_select(dvr, k, t, k);
  CHECK(sel == std::vector<int>{0});
  // a redundant candidate is skipped
  Mat cand = cols_mat({{S(3)}, {S(6)}}, 1);
  CHECK(nakayama_select(dvr, k, t, cand) == std::vector<int>{0});
}

TEST_CASE("randomized branch algebras match the closed defect formula") {
  std::mt19937_64 rng(20260815);
  const long primes[] = {2, 3, 5};
  for (int iter = 0; iter < 30; ++iter) {
    Dvr dvr(primes[rng() % 3]);
    int k = 1 + static_cast<int>(rng() % 3);
    std::vector<long> ms;
    long total = 0, mx = 0;
    for (int i = 0; i < k; ++i) {
      long m = 1 + static_cast<long>(rng() % 3);
      ms.push_back(m);
      total += m;
      mx = std::max(mx, m);
    }
    AlgebraPtr a = branches_algebra(dvr, ms);
    OPoint pt = origin_point(*a);
    FinModule M = FinModule::regular(a);
    Certificate c = wiles_defect_c0(M, pt);
    CHECK(c.delta == total - mx);
    CHECK(c.mu == 1);
    EtaResult eta = eta_c0(M, pt);
    CHECK(eta.coker_length == congruence_module_c0(M, pt).length());
    CHECK(kappa_c0(M, pt).length == 0);
    fitting_inclusion_check(*a, pt);

    // at an outer branch the defect is the total contact with the others
    for (int i = 0; i < k; ++i) {
      Vec values(k, S(0));
      values[i] = dvr.pi_pow(ms[i]);
      OPoint branch = coordinate_point(*a, values);
      Certificate cb = wiles_defect_c0(M, branch);
      long contact = 0;
      for (int j = 0; j < k; ++j)
        if (j != i) contact += std::min(ms[i], ms[j]);
      CHECK(cb.delta == contact);
      CHECK(cb.length_psi == ms[i]);
      CHECK(cb.length_cotangent == ms[i] + contact);
      fitting_inclusion_check(*a, branch);
    }
  }
}
