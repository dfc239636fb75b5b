#include "congmod/poly.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "congmod/koszul.hpp"

namespace congmod {

long mono_deg(const Monomial& m) {
  long d = 0;
  for (int e : m) d += e;
  return d;
}

bool mono_divides(const Monomial& a, const Monomial& b) {
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Monomial mono_div(const Monomial& b, const Monomial& a) {
  Monomial out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = b[i] - a[i];
  return out;
}

Monomial mono_lcm(const Monomial& a, const Monomial& b) {
  Monomial out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = std::max(a[i], b[i]);
  return out;
}

bool Grevlex::less(const Monomial& a, const Monomial& b) const {
  long da = mono_deg(a), db = mono_deg(b);
  if (da != db) return da < db;
  for (int i = static_cast<int>(a.size()) - 1; i >= 0; --i) {
    int d = a[i] - b[i];
    if (d != 0) return d > 0;
  }
  return false;
}

bool ElimFirst::less(const Monomial& a, const Monomial& b) const {
  if (a[0] != b[0]) return a[0] < b[0];
  long da = 0, db = 0;
  for (size_t i = 1; i < a.size(); ++i) {
    da += a[i];
    db += b[i];
  }
  if (da != db) return da < db;
  for (int i = static_cast<int>(a.size()) - 1; i >= 1; --i) {
    int d = a[i] - b[i];
    if (d != 0) return d > 0;
  }
  return false;
}

FieldFp::Elt FieldFp::div(const Elt& a, const Elt& b) const {
  Elt bn = norm(b);
  if (bn == 0) fail(ErrKind::internal_inconsistency, "division by zero in the residue field");
  mpz_class inv;
  if (mpz_invert(inv.get_mpz_t(), bn.get_mpz_t(), p.get_mpz_t()) == 0)
    fail(ErrKind::internal_inconsistency, "residue field element is not invertible");
  return norm(norm(a) * inv);
}

std::optional<std::vector<Monomial>> staircase(const std::vector<Monomial>& lts, int nvars) {
  for (const auto& m : lts)
    if (mono_deg(m) == 0) return std::vector<Monomial>{};  // unit ideal
  std::vector<long> bound(nvars, -1);
  for (const auto& m : lts) {
    int var = -1;
    bool pure = true;
    for (int i = 0; i < nvars; ++i) {
      if (m[i] == 0) continue;
      if (var >= 0) {
        pure = false;
        break;
      }
      var = i;
    }
    if (pure && var >= 0 && (bound[var] < 0 || m[var] < bound[var])) bound[var] = m[var];
  }
  long total = 1;
  for (int i = 0; i < nvars; ++i) {
    if (bound[i] < 0) return std::nullopt;
    total *= bound[i];
    if (total > 4096) fail(ErrKind::validation, "staircase too large");
  }
  std::vector<Monomial> out;
  Monomial cur(nvars, 0);
  while (true) {
    bool inside = true;
    for (const auto& m : lts)
      if (mono_divides(m, cur)) {
        inside = false;
        break;
      }
    if (inside) out.push_back(cur);
    int i = 0;
    while (i < nvars) {
      if (++cur[i] < bound[i]) break;
      cur[i] = 0;
      ++i;
    }
    if (i == nvars) break;
  }
  Grevlex ord;
  std::sort(out.begin(), out.end(), [&](const Monomial& a, const Monomial& b) {
    return ord.less(a, b);
  });
  return out;
}

namespace {

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

std::string mono_label(const Monomial& m, const std::vector<std::string>& names) {
  std::string out;
  for (size_t i = 0; i < m.size(); ++i) {
    if (m[i] == 0) continue;
    if (!out.empty()) out += "*";
    out += names[i];
    if (m[i] > 1) out += "^" + std::to_string(m[i]);
  }
  return out.empty() ? "1" : out;
}

Scalar mono_eval(const Monomial& m, const Vec& at) {
  Scalar out(1);
  for (size_t i = 0; i < m.size(); ++i)
    for (int e = 0; e < m[i]; ++e) out = out * at[i];
  return out;
}

void check_o_coeffs(const Dvr& dvr, const PolyQ& f, const std::string& what) {
  for (const auto& [m, c] : f.terms)
    if (!dvr.in_ring(c))
      fail(ErrKind::validation, what + " has a coefficient outside the base ring");
}

Mat point_jacobian(const PolyPresentation& pres) {
  const Vec& at = *pres.point;
  Mat jm(pres.nvars, static_cast<int>(pres.gens.size()));
  for (int j = 0; j < static_cast<int>(pres.gens.size()); ++j)
    for (int i = 0; i < pres.nvars; ++i)
      jm.at(i, j) = eval_poly(poly_derivative(pres.gens[j], i), at);
  return jm;
}

template <class F>
Poly<F> lift_aux(const Poly<F>& f, int upow) {
  Poly<F> out;
  for (const auto& [m, c] : f.terms) {
    Monomial lifted(m.size() + 1);
    lifted[0] = upow;
    for (size_t i = 0; i < m.size(); ++i) lifted[i + 1] = m[i];
    out.terms.emplace(lifted, c);
  }
  return out;
}

// (I : t) == I on one fiber, via elimination of an auxiliary variable
template <class F>
bool fiber_regular(const F& fld, std::vector<Poly<F>> gens, const Poly<F>& t, long cap) {
  gens.erase(std::remove_if(gens.begin(), gens.end(),
                            [](const Poly<F>& g) { return g.is_zero(); }),
             gens.end());
  if (t.is_zero()) return false;
  Grevlex ord;
  auto gb = buchberger(fld, ord, gens, cap);

  std::vector<Poly<F>> lifted;
  for (const auto& g : gens) lifted.push_back(lift_aux(g, 1));  // u * g
  lifted.push_back(poly_sub(fld, lift_aux(t, 0), lift_aux(t, 1)));  // (1 - u) * t
  ElimFirst eord;
  auto egb = buchberger(fld, eord, lifted, cap + 2);

  for (const auto& e : egb) {
    bool aux_free = true;
    for (const auto& [m, c] : e.terms)
      if (m[0] != 0) {
        aux_free = false;
        break;
      }
    if (!aux_free) continue;
    Poly<F> dropped;
    for (const auto& [m, c] : e.terms)
      dropped.terms.emplace(Monomial(m.begin() + 1, m.end()), c);
    Poly<F> q = exact_divide(fld, dropped, t);
    if (!normal_form(fld, ord, q, gb, cap + 2).is_zero()) return false;
  }
  return true;
}

}  // namespace

PolyPresentation make_presentation(const Dvr& dvr, int nvars, std::vector<std::string> names,
                                   std::vector<PolyQ> gens, std::optional<Vec> point) {
  if (nvars < 1 || nvars > 16) fail(ErrKind::validation, "variable count must be between 1 and 16");
  if (names.empty())
    for (int i = 1; i <= nvars; ++i) names.push_back("x" + std::to_string(i));
  if (static_cast<int>(names.size()) != nvars)
    fail(ErrKind::validation, "variable name count does not match");
  for (const auto& n : names)
    if (!valid_name(n)) fail(ErrKind::validation, "invalid variable name '" + n + "'");
  for (size_t i = 0; i < names.size(); ++i)
    for (size_t j = i + 1; j < names.size(); ++j)
      if (names[i] == names[j]) fail(ErrKind::validation, "duplicate variable name '" + names[i] + "'");
  for (size_t j = 0; j < gens.size(); ++j) {
    for (const auto& [m, c] : gens[j].terms)
      if (static_cast<int>(m.size()) != nvars)
        fail(ErrKind::validation, "generator " + std::to_string(j) + " has the wrong arity");
    check_o_coeffs(dvr, gens[j], "generator " + std::to_string(j));
  }
  if (point) {
    if (static_cast<int>(point->size()) != nvars)
      fail(ErrKind::validation, "point coordinate count does not match");
    for (const auto& c : *point)
      if (!dvr.in_ring(c)) fail(ErrKind::validation, "point coordinates must lie in the base ring");
    for (size_t j = 0; j < gens.size(); ++j)
      if (!eval_poly(gens[j], *point).is_zero())
        fail(ErrKind::validation,
             "generator " + std::to_string(j) + " does not vanish at the point");
  }
  return PolyPresentation{dvr, nvars, std::move(names), std::move(gens), std::move(point)};
}

PolyPresentation normalize_point(const PolyPresentation& pres) {
  if (!pres.point) fail(ErrKind::validation, "the presentation has no point to normalize");
  const Vec& lam = *pres.point;
  FieldQ fq;
  // powers of (x_i + lam_i) on demand
  auto shifted_power = [&](int var, int e) {
    PolyQ base;
    Monomial xm(pres.nvars, 0);
    xm[var] = 1;
    poly_add_term(fq, base, xm, Scalar(1));
    poly_add_term(fq, base, Monomial(pres.nvars, 0), lam[var]);
    PolyQ out = poly_const(fq, pres.nvars, Scalar(1));
    for (int k = 0; k < e; ++k) out = poly_mul(fq, out, base);
    return out;
  };
  std::vector<PolyQ> out;
  for (const auto& g : pres.gens) {
    PolyQ acc;
    for (const auto& [m, c] : g.terms) {
      PolyQ term = poly_const(fq, pres.nvars, c);
      for (int i = 0; i < pres.nvars; ++i)
        if (m[i] > 0) term = poly_mul(fq, term, shifted_power(i, m[i]));
      acc = poly_add(fq, acc, term);
    }
    out.push_back(acc);
  }
  return make_presentation(pres.dvr, pres.nvars, pres.names, std::move(out),
                           Vec(pres.nvars, Scalar(0)));
}

PolyQ parse_poly(int nvars, const std::vector<std::string>& names, const std::string& text) {
  FieldQ fq;
  size_t i = 0;
  auto err = [&](const std::string& what) -> void {
    fail(ErrKind::parse, "column " + std::to_string(i + 1) + ": " + what);
  };
  auto skip = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  auto number = [&]() -> Scalar {
    size_t start = i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    if (i == start) err("expected a number");
    mpz_class num(text.substr(start, i - start));
    if (i < text.size() && text[i] == '/') {
      ++i;
      size_t ds = i;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      if (i == ds) err("expected a denominator");
      mpz_class den(text.substr(ds, i - ds));
      if (den == 0) err("zero denominator");
      return Scalar(num, den);
    }
    return Scalar(num);
  };
  auto factor = [&](PolyQ& acc) {
    skip();
    if (i >= text.size()) err("expected a factor");
    char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      Scalar v = number();
      acc = poly_scale(fq, acc, v);
      return;
    }
    if (!std::isalpha(static_cast<unsigned char>(c)) && c != '_') err("expected a factor");
    size_t start = i;
    while (i < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_'))
      ++i;
    std::string name = text.substr(start, i - start);
    int var = -1;
    for (int v = 0; v < nvars; ++v)
      if (names[v] == name) var = v;
    if (var < 0) {
      i = start;
      err("unknown variable '" + name + "'");
    }
    int e = 1;
    skip();
    if (i < text.size() && text[i] == '^') {
      ++i;
      skip();
      size_t es = i;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      if (i == es) err("expected an exponent");
      std::string digits = text.substr(es, i - es);
      if (digits.size() > 4) err("exponent too large");
      e = std::stoi(digits);
    }
    PolyQ xm;
    Monomial m(nvars, 0);
    m[var] = e;
    poly_add_term(fq, xm, m, Scalar(1));
    acc = poly_mul(fq, acc, xm);
  };
  auto term = [&]() -> PolyQ {
    PolyQ acc = poly_const(fq, nvars, Scalar(1));
    factor(acc);
    skip();
    while (i < text.size() && text[i] == '*') {
      ++i;
      factor(acc);
      skip();
    }
    return acc;
  };

  PolyQ out;
  skip();
  if (i >= text.size()) err("empty polynomial");
  bool negate = false;
  if (text[i] == '-') {
    negate = true;
    ++i;
  } else if (text[i] == '+') {
    ++i;
  }
  while (true) {
    PolyQ t = term();
    out = negate ? poly_sub(fq, out, t) : poly_add(fq, out, t);
    skip();
    if (i >= text.size()) break;
    if (text[i] == '+') {
      negate = false;
    } else if (text[i] == '-') {
      negate = true;
    } else {
      err("expected '+' or '-'");
    }
    ++i;
  }
  return out;
}

std::string print_poly(const PolyQ& f, const std::vector<std::string>& names) {
  if (f.is_zero()) return "0";
  Grevlex ord;
  std::vector<std::pair<Monomial, Scalar>> terms(f.terms.begin(), f.terms.end());
  std::sort(terms.begin(), terms.end(),
            [&](const auto& a, const auto& b) { return ord.less(b.first, a.first); });
  std::string out;
  for (size_t k = 0; k < terms.size(); ++k) {
    const auto& [m, c] = terms[k];
    bool neg = c < Scalar(0);
    Scalar mag = neg ? -c : c;
    std::string body;
    if (mono_deg(m) == 0) {
      body = mag.str();
    } else if (mag.is_one()) {
      body = mono_label(m, names);
    } else {
      body = mag.str() + "*" + mono_label(m, names);
    }
    if (k == 0) {
      out = (neg ? "-" : "") + body;
    } else {
      out += (neg ? " - " : " + ") + body;
    }
  }
  return out;
}

PolyFp poly_to_fp(const Dvr& dvr, const PolyQ& f) {
  FieldFp fp{dvr.prime()};
  PolyFp out;
  for (const auto& [m, c] : f.terms) {
    if (!dvr.in_ring(c))
      fail(ErrKind::validation, "coefficient outside the base ring cannot be reduced");
    poly_add_term(fp, out, m, dvr.residue(c));
  }
  return out;
}

Scalar eval_poly(const PolyQ& f, const Vec& at) {
  Scalar out(0);
  for (const auto& [m, c] : f.terms) out = out + c * mono_eval(m, at);
  return out;
}

PolyQ poly_derivative(const PolyQ& f, int var) {
  FieldQ fq;
  PolyQ out;
  for (const auto& [m, c] : f.terms) {
    if (m[var] == 0) continue;
    Monomial d = m;
    d[var] -= 1;
    poly_add_term(fq, out, d, c * Scalar(m[var]));
  }
  return out;
}

FiniteBasis finite_basis_certificate(const PolyPresentation& pres, long cap) {
  const Dvr& dvr = pres.dvr;
  FieldQ fq;
  Grevlex ord;
  auto gbq = buchberger(fq, ord, pres.gens, cap);
  std::vector<Monomial> ltq;
  for (const auto& g : gbq) {
    auto [m, c] = leading_term(fq, ord, g);
    if (mono_deg(m) == 0) fail(ErrKind::validation, "the ideal is the unit ideal");
    ltq.push_back(m);
  }
  auto stq = staircase(ltq, pres.nvars);
  if (!stq) fail(ErrKind::not_certifiably_finite, "the generic fiber staircase is infinite");

  FieldFp fp{dvr.prime()};
  std::vector<PolyFp> gensp;
  for (const auto& g : pres.gens) gensp.push_back(poly_to_fp(dvr, g));
  auto gbp = buchberger(fp, ord, gensp, cap);
  std::vector<Monomial> ltp;
  for (const auto& g : gbp) {
    auto [m, c] = leading_term(fp, ord, g);
    if (mono_deg(m) == 0)
      fail(ErrKind::not_certifiably_finite, "the special fiber is empty");
    ltp.push_back(m);
  }
  auto stp = staircase(ltp, pres.nvars);
  if (!stp) fail(ErrKind::not_certifiably_finite, "the special fiber staircase is infinite");

  if (stq->size() != stp->size())
    fail(ErrKind::not_certifiably_finite,
         "fiber dimensions differ: generic is " + std::to_string(stq->size()) +
             ", special is " + std::to_string(stp->size()));

  FiniteBasis fb;
  fb.basis = *stp;
  fb.gb = gbq;
  fb.qbasis = *stq;
  const int d = static_cast<int>(fb.basis.size());

  // generic coordinates of the special staircase; invertibility makes the
  // special staircase a basis of the generic fiber as well
  Mat change(d, d);
  for (int j = 0; j < d; ++j) {
    PolyQ mono;
    poly_add_term(fq, mono, fb.basis[j], Scalar(1));
    PolyQ nf = normal_form(fq, ord, mono, fb.gb, std::max(poly_deg(mono), 1L));
    for (const auto& [m, c] : nf.terms) {
      auto it = std::find(fb.qbasis.begin(), fb.qbasis.end(), m);
      if (it == fb.qbasis.end())
        fail(ErrKind::internal_inconsistency, "normal form left the staircase");
      change.at(static_cast<int>(it - fb.qbasis.begin()), j) = c;
    }
  }
  try {
    fb.transport = inverse_over_E(change);
  } catch (const Error&) {
    fail(ErrKind::not_certifiably_finite,
         "the special staircase degenerates on the generic fiber");
  }

  std::vector<std::string> labels;
  for (const auto& m : fb.basis) labels.push_back(mono_label(m, pres.names));

  // the unit and the named coordinates must live in the O-span of the basis
  Vec unit = poly_coords_in_O(dvr, fb, poly_const(fq, pres.nvars, Scalar(1)));
  for (int v = 0; v < pres.nvars; ++v) {
    PolyQ xv;
    Monomial m(pres.nvars, 0);
    m[v] = 1;
    poly_add_term(fq, xv, m, Scalar(1));
    poly_coords_in_O(dvr, fb, xv);
  }

  std::vector<Mat> mult(d, Mat(d, d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      PolyQ prod;
      poly_add_term(fq, prod, mono_mul(fb.basis[i], fb.basis[j]), Scalar(1));
      Vec coords = poly_coords_in_O(dvr, fb, prod);
      mult[i].set_col(j, coords);
    }

  fb.algebra = FinAlgebra::make(dvr, labels, mult, unit);
  return fb;
}

Vec poly_coords_in_O(const Dvr& dvr, const FiniteBasis& fb, const PolyQ& f) {
  FieldQ fq;
  Grevlex ord;
  long cap = std::max(poly_deg(f), 1L);
  PolyQ nf = normal_form(fq, ord, f, fb.gb, cap);
  Vec qc(fb.qbasis.size(), Scalar(0));
  for (const auto& [m, c] : nf.terms) {
    auto it = std::find(fb.qbasis.begin(), fb.qbasis.end(), m);
    if (it == fb.qbasis.end())
      fail(ErrKind::internal_inconsistency, "normal form left the staircase");
    qc[it - fb.qbasis.begin()] = c;
  }
  Vec out = fb.transport.apply(qc);
  for (const auto& c : out)
    if (!dvr.in_ring(c))
      fail(ErrKind::coefficient_leaves_ring,
           "a basis coefficient has the prime in its denominator");
  return out;
}

OPoint presentation_point(const FiniteBasis& fb, const PolyPresentation& pres) {
  if (!pres.point) fail(ErrKind::validation, "the presentation has no point");
  Vec lam(fb.basis.size());
  for (size_t i = 0; i < fb.basis.size(); ++i) lam[i] = mono_eval(fb.basis[i], *pres.point);
  return point_kernel(*fb.algebra, lam);
}

FinOModule jacobian_conormal(const PolyPresentation& pres) {
  if (!pres.point) fail(ErrKind::validation, "the presentation has no point");
  return FinOModule(pres.dvr, pres.nvars, point_jacobian(pres));
}

bool not_in_symbolic_square(const PolyPresentation& pres, const PolyQ& cut) {
  if (!pres.point) fail(ErrKind::validation, "the presentation has no point");
  check_o_coeffs(pres.dvr, cut, "the cut");
  for (const auto& [m, c] : cut.terms)
    if (static_cast<int>(m.size()) != pres.nvars)
      fail(ErrKind::validation, "the cut has the wrong arity");
  if (!eval_poly(cut, *pres.point).is_zero())
    fail(ErrKind::not_in_ideal, "the cut does not vanish at the point");
  Mat jm = point_jacobian(pres);
  Vec grad(pres.nvars);
  for (int i = 0; i < pres.nvars; ++i)
    grad[i] = eval_poly(poly_derivative(cut, i), *pres.point);
  Mat ext = Mat::hstack(jm, Mat::from_cols({grad}, pres.nvars));
  return rank_E(ext) > rank_E(jm);
}

CutRegularity cut_regular_on_ring(const PolyPresentation& pres, const PolyQ& cut, long cap) {
  CutRegularity out;
  FieldQ fq;
  out.generic = fiber_regular(fq, pres.gens, cut, cap);
  PolyFp cutp = poly_to_fp(pres.dvr, cut);
  if (cutp.is_zero()) {
    out.special = false;
    return out;
  }
  FieldFp fp{pres.dvr.prime()};
  std::vector<PolyFp> gensp;
  for (const auto& g : pres.gens) gensp.push_back(poly_to_fp(pres.dvr, g));
  out.special = fiber_regular(fp, gensp, cutp, cap);
  return out;
}

FinModule transport_module(const Dvr& dvr, const FiniteBasis& fb, const PolyModuleSpec& spec) {
  if (spec.gens < 1) fail(ErrKind::validation, "a module needs at least one generator");
  const int d = fb.algebra->dim();
  Mat cols(spec.gens * d, static_cast<int>(spec.columns.size()));
  for (size_t j = 0; j < spec.columns.size(); ++j) {
    if (static_cast<int>(spec.columns[j].size()) != spec.gens)
      fail(ErrKind::validation, "module column " + std::to_string(j) + " has the wrong height");
    for (int b = 0; b < spec.gens; ++b) {
      Vec coords = poly_coords_in_O(dvr, fb, spec.columns[j][b]);
      for (int t = 0; t < d; ++t) cols.at(b * d + t, static_cast<int>(j)) = coords[t];
    }
  }
  return FinModule::algebra_presentation(fb.algebra, spec.gens, cols);
}

ChainReport defect_via_chain(const PolyPresentation& pres0,
                             const std::optional<PolyModuleSpec>& module_spec,
                             const std::vector<PolyQ>& chain, const ChainOptions& opt) {
  if (!pres0.point) fail(ErrKind::validation, "chain reduction needs a point");
  PolyPresentation pres = pres0;
  ChainReport rep;
  rep.expected_cuts = pres.nvars - rank_E(point_jacobian(pres));
  if (static_cast<long>(chain.size()) != rep.expected_cuts)
    fail(ErrKind::chain_length_mismatch,
         "expected " + std::to_string(rep.expected_cuts) + " cuts, got " +
             std::to_string(chain.size()));

  for (size_t k = 0; k < chain.size(); ++k) {
    CutStep step;
    step.cut = chain[k];
    step.rank_jump = not_in_symbolic_square(pres, chain[k]);
    if (!step.rank_jump)
      fail(ErrKind::symbolic_square_violation,
           "cut " + std::to_string(k) + " does not leave the symbolic square at the point");
    CutRegularity reg = cut_regular_on_ring(pres, chain[k], opt.degree_cap);
    step.regular_generic = reg.generic;
    step.regular_special = reg.special;
    if (!reg.generic)
      fail(ErrKind::validation,
           "cut " + std::to_string(k) + " is a zerodivisor on the generic fiber");
    if (!reg.special)
      fail(ErrKind::validation,
           "cut " + std::to_string(k) + " is a zerodivisor on the special fiber");
    if (module_spec) {
      step.module_regularity_assumed = true;
      if (opt.strict_module_regularity)
        fail(ErrKind::regularity_unverified,
             "cut regularity on the module is assumed, not verified");
    }
    rep.steps.push_back(step);
    pres.gens.push_back(chain[k]);
  }

  rep.finite = finite_basis_certificate(pres, opt.degree_cap);
  rep.point = presentation_point(rep.finite, pres);
  FinModule m = module_spec ? transport_module(pres.dvr, rep.finite, *module_spec)
                            : FinModule::regular(rep.finite.algebra);
  rep.cert = certify_c0(m, rep.point);
  FinOModule kd = koszul_defect_module(m, rep.point);
  auto kl = kd.length();
  if (!kl || *kl != rep.cert.delta)
    fail(ErrKind::internal_inconsistency,
         "the koszul defect module disagrees with the certificate");
  rep.koszul_defect_length = *kl;
  return rep;
}

PolyQ sample_admissible_cut(const PolyPresentation& pres, std::mt19937_64& rng, int budget,
                            long cap) {
  if (!pres.point) fail(ErrKind::validation, "the presentation has no point");
  FieldQ fq;
  std::uniform_int_distribution<long> coef(-3, 3);
  for (int it = 0; it < budget; ++it) {
    std::vector<long> a(pres.nvars);
    bool nonzero = false;
    for (auto& x : a) {
      x = coef(rng);
      if (x != 0) nonzero = true;
    }
    if (!nonzero) continue;
    PolyQ t;
    Scalar shift(0);
    for (int i = 0; i < pres.nvars; ++i) {
      if (a[i] == 0) continue;
      Monomial m(pres.nvars, 0);
      m[i] = 1;
      poly_add_term(fq, t, m, Scalar(a[i]));
      shift = shift + Scalar(a[i]) * (*pres.point)[i];
    }
    poly_add_term(fq, t, Monomial(pres.nvars, 0), -shift);
    try {
      if (!not_in_symbolic_square(pres, t)) continue;
      CutRegularity reg = cut_regular_on_ring(pres, t, cap);
      if (reg.generic && reg.special) return t;
    } catch (const Error& e) {
      if (e.kind() != ErrKind::degree_cap_exceeded) throw;
    }
  }
  fail(ErrKind::validation, "no admissible cut found within the budget");
}

}  // namespace congmod
