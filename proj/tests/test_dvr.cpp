#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "congmod/dvr.hpp"

using namespace congmod;

TEST_CASE("context construction validates the prime") {
  CHECK_NOTHROW(Dvr(2));
  CHECK_NOTHROW(Dvr(97));
  CHECK_THROWS_AS(Dvr(1), Error);
  CHECK_THROWS_AS(Dvr(4), Error);
  try {
    Dvr d(6);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrKind::validation);
  }
}

TEST_CASE("valuation on frozen examples") {
  CHECK(*Dvr(2).valuation(Scalar(12)) == 2);
  CHECK(!Dvr(3).valuation(Scalar(0)).has_value());  // +infinity
  CHECK(*Dvr(5).valuation(Scalar::parse("7/3")) == 0);
  CHECK(*Dvr(2).valuation(Scalar::parse("3/4")) == -2);
}

TEST_CASE("arithmetic on frozen examples") {
  Dvr d3(3);
  CHECK(d3.add(Scalar::parse("1/3"), Scalar::parse("1/3")) == Scalar::parse("2/3"));
  Dvr d2(2);
  CHECK_THROWS_AS(d2.div(Scalar(1), Scalar(2), DivMode::ring), Error);
  try {
    d2.div(Scalar(1), Scalar(2), DivMode::ring);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrKind::division_leaves_ring);
  }
  CHECK(d2.div(Scalar(1), Scalar(2), DivMode::fraction) == Scalar::parse("1/2"));
  CHECK(d2.mul(Scalar(2), Scalar::parse("3/5")) == Scalar::parse("6/5"));
  CHECK(d2.div(Scalar(4), Scalar(2), DivMode::ring) == Scalar(2));
}

TEST_CASE("residue map on frozen examples") {
  // oracle for 7/3 mod 5: inverse of 3 is the unique i in [0,5) with 3*i = 1
  long inv3 = -1;
  for (long i = 0; i < 5; ++i)
    if (i * 3 % 5 == 1) inv3 = i;
  CHECK(Dvr(5).residue(Scalar::parse("7/3")) == mpz_class(7 * inv3 % 5));
  CHECK(Dvr(5).residue(Scalar::parse("7/3")) == 4);
  CHECK(Dvr(2).residue(Scalar(4)) == 0);
  CHECK_THROWS_AS(Dvr(2).residue(Scalar::parse("1/2")), Error);
}

TEST_CASE("parse/print round trip and rejection") {
  for (const char* s : {"0", "1", "-7", "6/5", "-3/4", "12345678901234567890/7"}) {
    Scalar x = Scalar::parse(s);
    CHECK(Scalar::parse(x.str()) == x);
    CHECK(x.str() == s);
  }
  CHECK(Scalar::parse("4/6") == Scalar::parse("2/3"));  // canonical form
  CHECK_THROWS_AS(Scalar::parse(""), Error);
  CHECK_THROWS_AS(Scalar::parse("x"), Error);
  CHECK_THROWS_AS(Scalar::parse("1/0"), Error);
  CHECK_THROWS_AS(Scalar::parse("1.5"), Error);
}

TEST_CASE("valuation is additive and ultrametric") {
  std::mt19937_64 rng(20260815);
  std::uniform_int_distribution<long> num(-200, 200);
  std::uniform_int_distribution<long> den(1, 60);
  for (mpz_class p : {mpz_class(2), mpz_class(3), mpz_class(5)}) {
    Dvr d(p);
    for (int t = 0; t < 400; ++t) {
      Scalar a(mpz_class(num(rng)), mpz_class(den(rng)));
      Scalar b(mpz_class(num(rng)), mpz_class(den(rng)));
      auto va = d.valuation(a), vb = d.valuation(b), vab = d.valuation(a * b);
      if (va && vb) {
        REQUIRE(vab.has_value());
        CHECK(*vab == *va + *vb);
      } else {
        CHECK(!vab.has_value());
      }
      auto vs = d.valuation(a + b);
      if (va && vb) {
        long m = std::min(*va, *vb);
        if (vs) CHECK(*vs >= m);
        if (*va != *vb) {
          REQUIRE(vs.has_value());
          CHECK(*vs == m);
        }
      }
    }
  }
}

TEST_CASE("ring membership tracks denominator") {
  Dvr d(3);
  CHECK(d.in_ring(Scalar::parse("5/7")));
  CHECK(!d.in_ring(Scalar::parse("5/6")));
  CHECK(d.in_ring(Scalar(0)));
  CHECK(d.is_unit(Scalar::parse("5/7")));
  CHECK(!d.is_unit(Scalar(3)));
}
