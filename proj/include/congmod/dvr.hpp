// Exact arithmetic in the localization Z_(p): scalars are rationals whose
// denominator is a unit at p, the uniformizer is p itself, the residue field
// is F_p and the fraction field is Q.  Everything downstream (lattices, Smith
// forms, homology) reduces to this layer, so all operations here are exact.
#pragma once

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>

namespace congmod {

enum class ErrKind {
  parse,
  validation,
  division_leaves_ring,
  not_associative,
  not_local,
  not_algebra_map,
  non_finite_congruence_module,
  not_regular_point,
  zero_depth,
  not_supported,
  not_minimal_generators,
  not_artinian,
  degree_cap_exceeded,
  not_certifiably_finite,
  coefficient_leaves_ring,
  symbolic_square_violation,
  regularity_unverified,
  chain_length_mismatch,
  not_in_ideal,
  unsolvable_homotopy,
  not_minimal_complex,
  not_ci_quotient,
  internal_inconsistency,
};

const char* errkind_name(ErrKind k);

// CLI taxonomy: 1 = hypotheses of the theorems not met, 2 = bad input,
// 3 = an internal cross-check failed (a bug, never a user problem).
int errkind_exit_code(ErrKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrKind k, const std::string& msg)
      : std::runtime_error(std::string(errkind_name(k)) + ": " + msg), kind_(k) {}
  ErrKind kind() const { return kind_; }

 private:
  ErrKind kind_;
};

[[noreturn]] inline void fail(ErrKind k, const std::string& msg) { throw Error(k, msg); }

// An exact rational.  Values are immutable after construction and always in
// canonical form (reduced, positive denominator, zero is 0/1).
class Scalar {
 public:
  Scalar() : v_(0) {}
  Scalar(long n) : v_(n) {}
  Scalar(const mpz_class& n) : v_(n) {}
  Scalar(const mpq_class& q) : v_(q) { v_.canonicalize(); }
  Scalar(const mpz_class& num, const mpz_class& den);

  static Scalar parse(const std::string& text);
  std::string str() const { return v_.get_str(); }

  bool is_zero() const { return v_ == 0; }
  bool is_one() const { return v_ == 1; }
  mpz_class num() const { return v_.get_num(); }
  mpz_class den() const { return v_.get_den(); }
  const mpq_class& raw() const { return v_; }

  Scalar operator-() const { return Scalar(mpq_class(-v_)); }
  Scalar operator+(const Scalar& o) const { return Scalar(mpq_class(v_ + o.v_)); }
  Scalar operator-(const Scalar& o) const { return Scalar(mpq_class(v_ - o.v_)); }
  Scalar operator*(const Scalar& o) const { return Scalar(mpq_class(v_ * o.v_)); }
  // Fraction-field division; ring-mode division lives on Dvr.
  Scalar operator/(const Scalar& o) const;
  Scalar& operator+=(const Scalar& o) { v_ += o.v_; return *this; }
  Scalar& operator-=(const Scalar& o) { v_ -= o.v_; return *this; }
  Scalar& operator*=(const Scalar& o) { v_ *= o.v_; return *this; }

  bool operator==(const Scalar& o) const { return v_ == o.v_; }
  bool operator!=(const Scalar& o) const { return v_ != o.v_; }
  bool operator<(const Scalar& o) const { return v_ < o.v_; }

 private:
  mpq_class v_;
};

enum class DivMode { ring, fraction };

// The context O = Z_(p).  Holds the (verified) prime and provides the maps
// that depend on it: valuation, residue, ring-membership, checked division.
class Dvr {
 public:
  explicit Dvr(const mpz_class& p);

  const mpz_class& prime() const { return p_; }
  Scalar uniformizer() const { return Scalar(p_); }
  Scalar pi_pow(long k) const;

  // p-adic valuation; nullopt encodes +infinity (the zero element).
  std::optional<long> valuation(const Scalar& x) const;
  bool in_ring(const Scalar& x) const;
  bool is_unit(const Scalar& x) const;

  // Residue of x in F_p = O/(p); requires x in O.
  mpz_class residue(const Scalar& x) const;
  // Canonical representative of x in [0, p^d); requires x in O, d >= 0.
  mpz_class canonical_mod(const Scalar& x, long d) const;

  Scalar add(const Scalar& a, const Scalar& b) const { return a + b; }
  Scalar sub(const Scalar& a, const Scalar& b) const { return a - b; }
  Scalar mul(const Scalar& a, const Scalar& b) const { return a * b; }
  Scalar div(const Scalar& a, const Scalar& b, DivMode mode) const;

  bool operator==(const Dvr& o) const { return p_ == o.p_; }

 private:
  mpz_class p_;
};

long mpz_valuation(const mpz_class& z, const mpz_class& p);  // z != 0

}  // namespace congmod
