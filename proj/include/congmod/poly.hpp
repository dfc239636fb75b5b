// Exact multivariate polynomials over the fraction field and the residue
// field, Groebner bases with a hard degree cap, staircase finiteness
// certificates that produce a FinAlgebra from a polynomial presentation, and
// the linear-cut calculus that reduces positive-dimensional presentations to
// finite ones without moving the Wiles defect.
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "congmod/algebra.hpp"

namespace congmod {

using Monomial = std::vector<int>;

long mono_deg(const Monomial& m);
bool mono_divides(const Monomial& a, const Monomial& b);  // a | b
Monomial mono_mul(const Monomial& a, const Monomial& b);
Monomial mono_div(const Monomial& b, const Monomial& a);  // b / a, a | b
Monomial mono_lcm(const Monomial& a, const Monomial& b);

// graded reverse lexicographic: higher total degree wins, ties go to the
// monomial whose trailing exponent difference is negative
struct Grevlex {
  bool less(const Monomial& a, const Monomial& b) const;
};

// block order that eliminates variable 0, grevlex inside each block
struct ElimFirst {
  bool less(const Monomial& a, const Monomial& b) const;
};

struct FieldQ {
  using Elt = Scalar;
  Elt zero() const { return Scalar(0); }
  Elt one() const { return Scalar(1); }
  bool is_zero(const Elt& a) const { return a.is_zero(); }
  Elt add(const Elt& a, const Elt& b) const { return a + b; }
  Elt sub(const Elt& a, const Elt& b) const { return a - b; }
  Elt mul(const Elt& a, const Elt& b) const { return a * b; }
  Elt div(const Elt& a, const Elt& b) const { return a / b; }
  Elt neg(const Elt& a) const { return -a; }
};

struct FieldFp {
  mpz_class p;
  using Elt = mpz_class;
  Elt zero() const { return 0; }
  Elt one() const { return 1; }
  Elt norm(const Elt& a) const {
    Elt r = a % p;
    if (r < 0) r += p;
    return r;
  }
  bool is_zero(const Elt& a) const { return norm(a) == 0; }
  Elt add(const Elt& a, const Elt& b) const { return norm(a + b); }
  Elt sub(const Elt& a, const Elt& b) const { return norm(a - b); }
  Elt mul(const Elt& a, const Elt& b) const { return norm(a * b); }
  Elt div(const Elt& a, const Elt& b) const;
  Elt neg(const Elt& a) const { return norm(-a); }
};

template <class F>
struct Poly {
  std::map<Monomial, typename F::Elt> terms;
  bool is_zero() const { return terms.empty(); }
};

using PolyQ = Poly<FieldQ>;
using PolyFp = Poly<FieldFp>;

template <class F>
void poly_add_term(const F& fld, Poly<F>& f, const Monomial& m, const typename F::Elt& c) {
  if (fld.is_zero(c)) return;
  auto it = f.terms.find(m);
  if (it == f.terms.end()) {
    f.terms.emplace(m, c);
    return;
  }
  it->second = fld.add(it->second, c);
  if (fld.is_zero(it->second)) f.terms.erase(it);
}

template <class F>
Poly<F> poly_add(const F& fld, const Poly<F>& a, const Poly<F>& b) {
  Poly<F> out = a;
  for (const auto& [m, c] : b.terms) poly_add_term(fld, out, m, c);
  return out;
}

template <class F>
Poly<F> poly_neg(const F& fld, const Poly<F>& a) {
  Poly<F> out;
  for (const auto& [m, c] : a.terms) out.terms.emplace(m, fld.neg(c));
  return out;
}

template <class F>
Poly<F> poly_sub(const F& fld, const Poly<F>& a, const Poly<F>& b) {
  return poly_add(fld, a, poly_neg(fld, b));
}

template <class F>
Poly<F> poly_scale(const F& fld, const Poly<F>& a, const typename F::Elt& c) {
  Poly<F> out;
  if (fld.is_zero(c)) return out;
  for (const auto& [m, x] : a.terms) out.terms.emplace(m, fld.mul(x, c));
  return out;
}

template <class F>
Poly<F> poly_mul(const F& fld, const Poly<F>& a, const Poly<F>& b) {
  Poly<F> out;
  for (const auto& [ma, ca] : a.terms)
    for (const auto& [mb, cb] : b.terms) poly_add_term(fld, out, mono_mul(ma, mb), fld.mul(ca, cb));
  return out;
}

template <class F>
Poly<F> poly_const(const F& fld, int nvars, const typename F::Elt& c) {
  Poly<F> out;
  poly_add_term(fld, out, Monomial(nvars, 0), c);
  return out;
}

template <class F>
long poly_deg(const Poly<F>& f) {
  long d = -1;
  for (const auto& [m, c] : f.terms) d = std::max(d, mono_deg(m));
  return d;
}

template <class F, class Ord>
std::pair<Monomial, typename F::Elt> leading_term(const F&, const Ord& ord, const Poly<F>& f) {
  auto best = f.terms.begin();
  for (auto it = std::next(f.terms.begin()); it != f.terms.end(); ++it)
    if (ord.less(best->first, it->first)) best = it;
  return {best->first, best->second};
}

// normal form with full tail reduction; throws DegreeCapExceeded when any
// intermediate polynomial climbs past the cap
template <class F, class Ord>
Poly<F> normal_form(const F& fld, const Ord& ord, Poly<F> f, const std::vector<Poly<F>>& basis,
                    long cap);

template <class F, class Ord>
std::vector<Poly<F>> buchberger(const F& fld, const Ord& ord, std::vector<Poly<F>> gens,
                                long cap);

// q with f = q * g (exact); the divisibility is a caller guarantee
template <class F>
Poly<F> exact_divide(const F& fld, const Poly<F>& f, const Poly<F>& g);

// monomials outside the leading-term ideal; nullopt when infinite
std::optional<std::vector<Monomial>> staircase(const std::vector<Monomial>& lts, int nvars);

// --- presentations -------------------------------------------------------

struct PolyPresentation {
  Dvr dvr;
  int nvars = 0;
  std::vector<std::string> names;
  std::vector<PolyQ> gens;
  std::optional<Vec> point;
};

// Validates names, O coefficients, and that every generator vanishes at the
// point when one is given.
PolyPresentation make_presentation(const Dvr& dvr, int nvars, std::vector<std::string> names,
                                   std::vector<PolyQ> gens, std::optional<Vec> point);

// Translate coordinates so the marked point becomes the origin.
PolyPresentation normalize_point(const PolyPresentation& pres);

PolyQ parse_poly(int nvars, const std::vector<std::string>& names, const std::string& text);
std::string print_poly(const PolyQ& f, const std::vector<std::string>& names);
PolyFp poly_to_fp(const Dvr& dvr, const PolyQ& f);
Scalar eval_poly(const PolyQ& f, const Vec& at);
PolyQ poly_derivative(const PolyQ& f, int var);

// --- finiteness certificate ----------------------------------------------

struct FiniteBasis {
  AlgebraPtr algebra;
  std::vector<Monomial> basis;   // special fiber staircase, grevlex ascending
  std::vector<PolyQ> gb;         // reduced Groebner basis over the fraction field
  std::vector<Monomial> qbasis;  // generic fiber staircase
  Mat transport;                 // generic coordinates -> coordinates on basis
};

// Certifies that the presented ring is finite flat over O. The two fiber
// staircases must be finite and equinumerous, the special staircase must stay
// linearly independent on the generic fiber, and the coordinates of 1, of
// every variable, and of every basis product must land in O on the special
// staircase. Success is equivalent to the quotient being O-free on `basis`.
// Throws NotCertifiablyFinite / CoefficientLeavesRing and lets FinAlgebra
// construction refuse non-local instances.
FiniteBasis finite_basis_certificate(const PolyPresentation& pres, long cap);

// Normal-form coordinates on the certified basis; CoefficientLeavesRing when
// a coefficient has p in its denominator.
Vec poly_coords_in_O(const Dvr& dvr, const FiniteBasis& fb, const PolyQ& f);

// The marked point as an algebra map on the certified basis.
OPoint presentation_point(const FiniteBasis& fb, const PolyPresentation& pres);

// coker of the jacobian at the point: the conormal module of the point along
// the presented relations.
FinOModule jacobian_conormal(const PolyPresentation& pres);

// Whether the differential of the cut at the point increases the rank of the
// jacobian, i.e. the cut misses the symbolic square of the point's component.
// Throws NotInIdeal when the cut does not vanish at the point.
bool not_in_symbolic_square(const PolyPresentation& pres, const PolyQ& cut);

struct CutRegularity {
  bool generic = false;  // (I : t) = I over the fraction field
  bool special = false;  // (I : t) = I over the residue field
};
CutRegularity cut_regular_on_ring(const PolyPresentation& pres, const PolyQ& cut, long cap);

// --- modules and chains ---------------------------------------------------

// cokernel presentation of a module over the presented ring: `gens` free
// generators modulo the columns, each column a vector of polynomials
struct PolyModuleSpec {
  int gens = 1;
  std::vector<std::vector<PolyQ>> columns;
};

FinModule transport_module(const Dvr& dvr, const FiniteBasis& fb, const PolyModuleSpec& spec);

struct CutStep {
  PolyQ cut;
  bool rank_jump = false;
  bool regular_generic = false;
  bool regular_special = false;
  bool module_regularity_assumed = false;
};

struct ChainOptions {
  long degree_cap = 24;
  // refuse to assume cut regularity on a module that is not the ring
  bool strict_module_regularity = false;
};

struct ChainReport {
  long expected_cuts = 0;
  std::vector<CutStep> steps;
  FiniteBasis finite;
  OPoint point;
  Certificate cert;
  long koszul_defect_length = 0;  // independent route, must match cert.delta
};

// Cuts down to a finite algebra and certifies there. Chain length must equal
// the corank of the jacobian at the point (ChainLengthMismatch); each cut must
// vanish at the point (NotInIdeal), jump the jacobian rank
// (SymbolicSquareViolation) and be a verified nonzerodivisor on both fibers.
ChainReport defect_via_chain(const PolyPresentation& pres,
                             const std::optional<PolyModuleSpec>& module_spec,
                             const std::vector<PolyQ>& chain, const ChainOptions& opt);

// Random linear forms through the point until one passes the cut checks.
PolyQ sample_admissible_cut(const PolyPresentation& pres, std::mt19937_64& rng, int budget,
                            long cap);

// --- template definitions -------------------------------------------------

template <class F, class Ord>
Poly<F> normal_form(const F& fld, const Ord& ord, Poly<F> f, const std::vector<Poly<F>>& basis,
                    long cap) {
  Poly<F> rem;
  while (!f.is_zero()) {
    if (poly_deg(f) > cap)
      fail(ErrKind::degree_cap_exceeded,
           "normal form exceeded the degree cap " + std::to_string(cap));
    auto [m, c] = leading_term(fld, ord, f);
    bool reduced = false;
    for (const auto& g : basis) {
      if (g.is_zero()) continue;
      auto [gm, gc] = leading_term(fld, ord, g);
      if (!mono_divides(gm, m)) continue;
      Poly<F> shift;
      poly_add_term(fld, shift, mono_div(m, gm), fld.div(c, gc));
      f = poly_sub(fld, f, poly_mul(fld, shift, g));
      reduced = true;
      break;
    }
    if (!reduced) {
      poly_add_term(fld, rem, m, c);
      f.terms.erase(m);
    }
  }
  return rem;
}

template <class F, class Ord>
std::vector<Poly<F>> buchberger(const F& fld, const Ord& ord, std::vector<Poly<F>> gens,
                                long cap) {
  std::vector<Poly<F>> basis;
  for (auto& g : gens) {
    if (g.is_zero()) continue;
    if (poly_deg(g) > cap)
      fail(ErrKind::degree_cap_exceeded,
           "generator degree exceeds the degree cap " + std::to_string(cap));
    auto [m, c] = leading_term(fld, ord, g);
    basis.push_back(poly_scale(fld, g, fld.div(fld.one(), c)));
  }
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < static_cast<int>(basis.size()); ++i)
    for (int j = i + 1; j < static_cast<int>(basis.size()); ++j) pairs.emplace_back(i, j);

  for (size_t next = 0; next < pairs.size(); ++next) {
    auto [i, j] = pairs[next];
    auto [mi, ci] = leading_term(fld, ord, basis[i]);
    auto [mj, cj] = leading_term(fld, ord, basis[j]);
    Monomial l = mono_lcm(mi, mj);
    if (l == mono_mul(mi, mj)) continue;  // coprime leading terms
    if (mono_deg(l) > cap)
      fail(ErrKind::degree_cap_exceeded,
           "s-polynomial degree exceeds the degree cap " + std::to_string(cap));
    Poly<F> si, sj;
    poly_add_term(fld, si, mono_div(l, mi), fld.one());
    poly_add_term(fld, sj, mono_div(l, mj), fld.one());
    Poly<F> s =
        poly_sub(fld, poly_mul(fld, si, basis[i]), poly_mul(fld, sj, basis[j]));
    Poly<F> h = normal_form(fld, ord, s, basis, cap);
    if (h.is_zero()) continue;
    auto [hm, hc] = leading_term(fld, ord, h);
    basis.push_back(poly_scale(fld, h, fld.div(fld.one(), hc)));
    for (int t = 0; t + 1 < static_cast<int>(basis.size()); ++t)
      pairs.emplace_back(t, static_cast<int>(basis.size()) - 1);
  }

  // minimalize, then fully reduce
  std::vector<Poly<F>> minimal;
  for (size_t i = 0; i < basis.size(); ++i) {
    auto [mi, ci] = leading_term(fld, ord, basis[i]);
    bool keep = true;
    for (size_t j = 0; j < basis.size(); ++j) {
      if (i == j) continue;
      auto [mj, cj] = leading_term(fld, ord, basis[j]);
      if (mono_divides(mj, mi) && (mi != mj || j < i)) {
        keep = false;
        break;
      }
    }
    if (keep) minimal.push_back(basis[i]);
  }
  std::vector<Poly<F>> reduced;
  for (size_t i = 0; i < minimal.size(); ++i) {
    std::vector<Poly<F>> rest;
    for (size_t j = 0; j < minimal.size(); ++j)
      if (j != i) rest.push_back(minimal[j]);
    Poly<F> h = normal_form(fld, ord, minimal[i], rest, cap);
    if (h.is_zero()) continue;
    auto [hm, hc] = leading_term(fld, ord, h);
    reduced.push_back(poly_scale(fld, h, fld.div(fld.one(), hc)));
  }
  std::sort(reduced.begin(), reduced.end(), [&](const Poly<F>& a, const Poly<F>& b) {
    return ord.less(leading_term(fld, ord, a).first, leading_term(fld, ord, b).first);
  });
  return reduced;
}

template <class F>
Poly<F> exact_divide(const F& fld, const Poly<F>& f, const Poly<F>& g) {
  Grevlex ord;
  Poly<F> rest = f;
  Poly<F> q;
  auto [gm, gc] = leading_term(fld, ord, g);
  while (!rest.is_zero()) {
    auto [m, c] = leading_term(fld, ord, rest);
    if (!mono_divides(gm, m))
      fail(ErrKind::internal_inconsistency, "exact polynomial division has a remainder");
    Monomial qm = mono_div(m, gm);
    typename F::Elt qc = fld.div(c, gc);
    poly_add_term(fld, q, qm, qc);
    Poly<F> sub;
    poly_add_term(fld, sub, qm, qc);
    rest = poly_sub(fld, rest, poly_mul(fld, sub, g));
  }
  return q;
}

}  // namespace congmod
