#include "congmod/dvr.hpp"

namespace congmod {

const char* errkind_name(ErrKind k) {
  switch (k) {
    case ErrKind::parse: return "ParseError";
    case ErrKind::validation: return "ValidationError";
    case ErrKind::division_leaves_ring: return "DivisionLeavesRing";
    case ErrKind::not_associative: return "NotAssociative";
    case ErrKind::not_local: return "NotLocal";
    case ErrKind::not_algebra_map: return "NotAlgebraMap";
    case ErrKind::non_finite_congruence_module: return "NonFiniteCongruenceModule";
    case ErrKind::not_regular_point: return "NotRegularPoint";
    case ErrKind::zero_depth: return "ZeroDepth";
    case ErrKind::not_supported: return "NotSupported";
    case ErrKind::not_minimal_generators: return "NotMinimalGenerators";
    case ErrKind::not_artinian: return "NotArtinian";
    case ErrKind::degree_cap_exceeded: return "DegreeCapExceeded";
    case ErrKind::not_certifiably_finite: return "NotCertifiablyFinite";
    case ErrKind::coefficient_leaves_ring: return "CoefficientLeavesRing";
    case ErrKind::symbolic_square_violation: return "SymbolicSquareViolation";
    case ErrKind::regularity_unverified: return "RegularityUnverified";
    case ErrKind::chain_length_mismatch: return "ChainLengthMismatch";
    case ErrKind::not_in_ideal: return "NotInIdeal";
    case ErrKind::unsolvable_homotopy: return "UnsolvableHomotopy";
    case ErrKind::not_minimal_complex: return "NotMinimalComplex";
    case ErrKind::not_ci_quotient: return "NotCompleteIntersectionQuotient";
    case ErrKind::internal_inconsistency: return "InternalInconsistency";
  }
  return "UnknownError";
}

int errkind_exit_code(ErrKind k) {
  switch (k) {
    case ErrKind::parse:
    case ErrKind::validation:
    case ErrKind::division_leaves_ring:
    case ErrKind::not_associative:
    case ErrKind::not_local:
    case ErrKind::not_algebra_map:
    case ErrKind::coefficient_leaves_ring:
    case ErrKind::not_in_ideal:
      return 2;
    case ErrKind::internal_inconsistency:
      return 3;
    default:
      return 1;
  }
}

Scalar::Scalar(const mpz_class& num, const mpz_class& den) {
  if (den == 0) fail(ErrKind::validation, "zero denominator");
  v_ = mpq_class(num);
  v_ /= mpq_class(den);
}

Scalar Scalar::parse(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) fail(ErrKind::parse, "empty scalar");
  auto check_int = [&](const std::string& t) {
    if (t.empty()) fail(ErrKind::parse, "bad scalar '" + text + "'");
    size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
    if (i == t.size()) fail(ErrKind::parse, "bad scalar '" + text + "'");
    for (; i < t.size(); ++i)
      if (!isdigit(static_cast<unsigned char>(t[i])))
        fail(ErrKind::parse, "bad scalar '" + text + "'");
  };
  auto slash = s.find('/');
  if (slash == std::string::npos) {
    check_int(s);
    return Scalar(mpz_class(s));
  }
  std::string a = s.substr(0, slash), b = s.substr(slash + 1);
  check_int(a);
  check_int(b);
  mpz_class den(b);
  if (den == 0) fail(ErrKind::parse, "zero denominator in '" + text + "'");
  return Scalar(mpz_class(a), den);
}

Scalar Scalar::operator/(const Scalar& o) const {
  if (o.is_zero()) fail(ErrKind::validation, "division by zero");
  return Scalar(mpq_class(v_ / o.v_));
}

long mpz_valuation(const mpz_class& z, const mpz_class& p) {
  mpz_class rem;
  return static_cast<long>(mpz_remove(rem.get_mpz_t(), z.get_mpz_t(), p.get_mpz_t()));
}

Dvr::Dvr(const mpz_class& p) : p_(p) {
  if (p < 2) fail(ErrKind::validation, "prime must be >= 2, got " + p.get_str());
  if (mpz_probab_prime_p(p.get_mpz_t(), 40) == 0)
    fail(ErrKind::validation, p.get_str() + " is not prime");
}

Scalar Dvr::pi_pow(long k) const {
  mpz_class pk;
  mpz_pow_ui(pk.get_mpz_t(), p_.get_mpz_t(), static_cast<unsigned long>(k >= 0 ? k : -k));
  if (k >= 0) return Scalar(pk);
  return Scalar(1) / Scalar(pk);
}

std::optional<long> Dvr::valuation(const Scalar& x) const {
  if (x.is_zero()) return std::nullopt;
  return mpz_valuation(x.num(), p_) - mpz_valuation(x.den(), p_);
}

bool Dvr::in_ring(const Scalar& x) const {
  if (x.is_zero()) return true;
  return mpz_valuation(x.den(), p_) == 0;
}

bool Dvr::is_unit(const Scalar& x) const {
  auto v = valuation(x);
  return v.has_value() && *v == 0;
}

mpz_class Dvr::residue(const Scalar& x) const { return canonical_mod(x, 1); }

mpz_class Dvr::canonical_mod(const Scalar& x, long d) const {
  if (!in_ring(x)) fail(ErrKind::validation, "residue of non-integral scalar " + x.str());
  if (d < 0) fail(ErrKind::validation, "negative modulus exponent");
  mpz_class mod;
  mpz_pow_ui(mod.get_mpz_t(), p_.get_mpz_t(), static_cast<unsigned long>(d));
  if (mod == 1) return 0;
  mpz_class deninv;
  if (mpz_invert(deninv.get_mpz_t(), x.den().get_mpz_t(), mod.get_mpz_t()) == 0)
    fail(ErrKind::internal_inconsistency, "denominator not invertible mod p^d");
  mpz_class r = (x.num() * deninv) % mod;
  if (r < 0) r += mod;
  return r;
}

Scalar Dvr::div(const Scalar& a, const Scalar& b, DivMode mode) const {
  Scalar q = a / b;
  if (mode == DivMode::ring && !in_ring(q))
    fail(ErrKind::division_leaves_ring,
         a.str() + " / " + b.str() + " has negative valuation at p = " + p_.get_str());
  return q;
}

}  // namespace congmod
