// Second implementation of the analysis contract for differential testing.
// Everything here is recomputed from the raw problem data with deliberately
// naive algorithms: rational Gaussian elimination, explicit lattice
// saturation, dense valuation-pivot Smith reduction and closed-fiber
// enumeration.  Table problems touch none of the optimized machinery;
// polynomial problems reuse the frontend that produces the finite model
// (parsing, Groebner reduction, module transport) but recompute every
// invariant from the resulting multiplication tables.
#include <algorithm>
#include <optional>
#include <vector>

#include "congmod/engine.hpp"

namespace congmod {
namespace {

using QVec = std::vector<Scalar>;
using Cols = std::vector<QVec>;

int height(const Cols& c) { return c.empty() ? 0 : static_cast<int>(c[0].size()); }

Cols concat(Cols a, const Cols& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

Cols identity_cols(int n) {
  Cols out(n, QVec(n, Scalar(0)));
  for (int i = 0; i < n; ++i) out[i][i] = Scalar(1);
  return out;
}

Scalar p_power(const Dvr& dvr, long e) {
  mpz_class n = 1;
  for (long i = 0; i < (e < 0 ? -e : e); ++i) n *= dvr.prime();
  if (e >= 0) return Scalar(n);
  return Scalar(mpz_class(1), n);
}

// --- rational elimination ---------------------------------------------------

struct Elim {
  std::vector<QVec> rows;  // reduced echelon, zero rows dropped
  std::vector<int> pivots;
};

Elim rref_q(std::vector<QVec> rows, int width) {
  Elim e;
  std::size_t r0 = 0;
  for (int lead = 0; lead < width && r0 < rows.size(); ++lead) {
    std::size_t sel = r0;
    while (sel < rows.size() && rows[sel][lead].is_zero()) ++sel;
    if (sel == rows.size()) continue;
    std::swap(rows[r0], rows[sel]);
    Scalar inv = Scalar(1) / rows[r0][lead];
    for (int j = 0; j < width; ++j) rows[r0][j] = rows[r0][j] * inv;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == r0 || rows[r][lead].is_zero()) continue;
      Scalar f = rows[r][lead];
      for (int j = 0; j < width; ++j) rows[r][j] = rows[r][j] - f * rows[r0][j];
    }
    e.pivots.push_back(lead);
    ++r0;
  }
  rows.resize(e.pivots.size());
  e.rows = std::move(rows);
  return e;
}

long rank_rows_q(const std::vector<QVec>& rows, int width) {
  return static_cast<long>(rref_q(rows, width).pivots.size());
}

// rank of a column list (viewed as vectors in Q^n)
long rank_cols_q(const Cols& cols) {
  if (cols.empty()) return 0;
  return rank_rows_q(cols, height(cols));
}

// basis of {x : sum_j x_j cols[j] = 0} for the matrix whose rows are given
Cols kernel_q(const std::vector<QVec>& rows, int width) {
  Elim e = rref_q(rows, width);
  std::vector<bool> ispiv(width, false);
  for (int p : e.pivots) ispiv[p] = true;
  Cols out;
  for (int j = 0; j < width; ++j) {
    if (ispiv[j]) continue;
    QVec v(width, Scalar(0));
    v[j] = Scalar(1);
    for (std::size_t r = 0; r < e.rows.size(); ++r) v[e.pivots[r]] = -e.rows[r][j];
    out.push_back(std::move(v));
  }
  return out;
}

// --- F_p elimination with dependency tracking -------------------------------

struct FpElim {
  mpz_class p;
  int width = 0;
  std::vector<std::vector<mpz_class>> rows;    // normalized echelon rows
  std::vector<std::vector<mpz_class>> combos;  // expression over inserted vectors
  std::vector<int> pivots;
  int inserted = 0;

  explicit FpElim(const mpz_class& prime, int w) : p(prime), width(w) {}

  mpz_class inv(const mpz_class& a) const {
    mpz_class out;
    if (!mpz_invert(out.get_mpz_t(), a.get_mpz_t(), p.get_mpz_t()))
      fail(ErrKind::internal_inconsistency, "residue inversion failed");
    return out;
  }

  // Reduce v against the stored rows.  Returns nullopt when v was
  // independent (and is now stored); otherwise the dependency coefficients
  // over all vectors inserted so far (v itself included, coefficient 1).
  std::optional<std::vector<mpz_class>> insert(std::vector<mpz_class> v) {
    std::vector<mpz_class> combo(inserted + 1, 0);
    combo[inserted] = 1;
    ++inserted;
    for (auto& x : v) x = ((x % p) + p) % p;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      mpz_class c = v[pivots[r]];
      if (c == 0) continue;
      for (int j = 0; j < width; ++j) v[j] = ((v[j] - c * rows[r][j]) % p + p) % p;
      for (std::size_t k = 0; k < combos[r].size(); ++k)
        combo[k] = ((combo[k] - c * combos[r][k]) % p + p) % p;
    }
    int piv = -1;
    for (int j = 0; j < width; ++j)
      if (v[j] != 0) {
        piv = j;
        break;
      }
    if (piv < 0) return combo;
    mpz_class s = inv(v[piv]);
    for (int j = 0; j < width; ++j) v[j] = (v[j] * s) % p;
    for (auto& c : combo) c = (c * s) % p;
    combo.resize(inserted, 0);
    rows.push_back(std::move(v));
    combos.push_back(std::move(combo));
    pivots.push_back(piv);
    return std::nullopt;
  }

  long rank() const { return static_cast<long>(rows.size()); }
};

// --- O-lattice toolkit -------------------------------------------------------

// Triangular basis of the column span over O via minimal-valuation pivoting.
Cols echelon_cols_O(const Dvr& dvr, Cols cols) {
  Cols out;
  const int n = height(cols);
  for (int row = 0; row < n && !cols.empty(); ++row) {
    int best = -1;
    long bv = 0;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      auto v = dvr.valuation(cols[j][row]);
      if (!v) continue;
      if (best < 0 || *v < bv) {
        best = static_cast<int>(j);
        bv = *v;
      }
    }
    if (best < 0) continue;
    QVec piv = std::move(cols[best]);
    cols.erase(cols.begin() + best);
    for (auto& c : cols) {
      if (c[row].is_zero()) continue;
      Scalar f = dvr.div(c[row], piv[row], DivMode::ring);
      for (int i = row; i < n; ++i) c[i] = c[i] - f * piv[i];
    }
    out.push_back(std::move(piv));
  }
  return out;
}

// Coordinates of v in a triangular basis; nullopt when v is not in the span
// over O.
std::optional<QVec> coords_in(const Dvr& dvr, const Cols& basis, QVec v) {
  QVec out(basis.size(), Scalar(0));
  for (std::size_t j = 0; j < basis.size(); ++j) {
    int pr = 0;
    while (basis[j][pr].is_zero()) ++pr;
    if (v[pr].is_zero()) continue;
    Scalar q = v[pr] / basis[j][pr];
    if (!dvr.in_ring(q)) return std::nullopt;
    out[j] = q;
    for (std::size_t i = pr; i < v.size(); ++i) v[i] = v[i] - q * basis[j][i];
  }
  for (const auto& x : v)
    if (!x.is_zero()) return std::nullopt;
  return out;
}

// Scale a rational vector to a primitive vector of O^n with the same line.
QVec primitive(const Dvr& dvr, QVec v) {
  std::optional<long> m;
  for (const auto& x : v) {
    auto val = dvr.valuation(x);
    if (!val) continue;
    if (!m || *val < *m) m = *val;
  }
  if (!m || *m == 0) return v;
  Scalar s = p_power(dvr, -*m);
  for (auto& x : v) x = x * s;
  return v;
}

// Grow the lattice until O^n / L is torsion free on its span.
Cols saturate_cols(const Dvr& dvr, Cols basis) {
  basis = echelon_cols_O(dvr, std::move(basis));
  const int n = height(basis);
  while (!basis.empty()) {
    FpElim fp(dvr.prime(), n);
    std::optional<std::vector<mpz_class>> dep;
    for (const auto& b : basis) {
      std::vector<mpz_class> rv(n);
      for (int i = 0; i < n; ++i) rv[i] = dvr.residue(b[i]);
      dep = fp.insert(std::move(rv));
      if (dep) break;
    }
    if (!dep) break;
    QVec w(n, Scalar(0));
    for (std::size_t j = 0; j < dep->size(); ++j) {
      if ((*dep)[j] == 0) continue;
      for (int i = 0; i < n; ++i) w[i] = w[i] + Scalar((*dep)[j]) * basis[j][i];
    }
    for (int i = 0; i < n; ++i) w[i] = dvr.div(w[i], dvr.uniformizer(), DivMode::ring);
    basis.push_back(std::move(w));
    basis = echelon_cols_O(dvr, std::move(basis));
  }
  return basis;
}

// Saturated integral kernel of the matrix given by rows: ker ∩ O^width.
Cols sat_kernel(const Dvr& dvr, const std::vector<QVec>& rows, int width) {
  Cols kq = kernel_q(rows, width);
  Cols integral;
  for (auto& v : kq) integral.push_back(primitive(dvr, std::move(v)));
  return saturate_cols(dvr, integral);
}

// {v in O^r : S v lies in the O-span of targets}; S given by rows.
Cols preimage_cols(const Dvr& dvr, const std::vector<QVec>& rows_s, int r, const Cols& targets) {
  const int s = static_cast<int>(rows_s.size());
  const int k = static_cast<int>(targets.size());
  std::vector<QVec> rows(s, QVec(r + k, Scalar(0)));
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < r; ++j) rows[i][j] = rows_s[i][j];
    for (int t = 0; t < k; ++t) rows[i][r + t] = -targets[t][i];
  }
  Cols full = sat_kernel(dvr, rows, r + k);
  Cols proj;
  for (const auto& v : full) proj.push_back(QVec(v.begin(), v.begin() + r));
  return echelon_cols_O(dvr, proj);
}

// Dense Smith reduction with a global minimal-valuation pivot; returns the
// pivot valuations, ascending.
std::vector<long> snf_vals(const Dvr& dvr, const Cols& cols) {
  std::vector<long> out;
  if (cols.empty()) return out;
  const int n = height(cols);
  const int m = static_cast<int>(cols.size());
  std::vector<QVec> g(n, QVec(m));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) g[i][j] = cols[j][i];
  int top = 0;
  while (top < n && top < m) {
    int bi = -1, bj = -1;
    long bv = 0;
    for (int i = top; i < n; ++i)
      for (int j = top; j < m; ++j) {
        auto v = dvr.valuation(g[i][j]);
        if (!v) continue;
        if (bi < 0 || *v < bv) {
          bi = i;
          bj = j;
          bv = *v;
        }
      }
    if (bi < 0) break;
    std::swap(g[top], g[bi]);
    for (int i = 0; i < n; ++i) std::swap(g[i][top], g[i][bj]);
    for (int i = top + 1; i < n; ++i) {
      if (g[i][top].is_zero()) continue;
      Scalar f = dvr.div(g[i][top], g[top][top], DivMode::ring);
      for (int j = top; j < m; ++j) g[i][j] = g[i][j] - f * g[top][j];
    }
    for (int j = top + 1; j < m; ++j) {
      if (g[top][j].is_zero()) continue;
      Scalar f = dvr.div(g[top][j], g[top][top], DivMode::ring);
      for (int i = top; i < n; ++i) g[i][j] = g[i][j] - f * g[i][top];
    }
    out.push_back(bv);
    ++top;
  }
  return out;
}

struct OMod {
  std::vector<long> divisors;  // positive valuations, ascending
  int free_rank = 0;

  bool zero() const { return free_rank == 0 && divisors.empty(); }
  std::optional<long> length() const {
    if (free_rank > 0) return std::nullopt;
    long s = 0;
    for (long d : divisors) s += d;
    return s;
  }
};

OMod omod(const Dvr& dvr, int gens, const Cols& rel) {
  std::vector<long> all = snf_vals(dvr, rel);
  OMod m;
  m.free_rank = gens - static_cast<int>(all.size());
  for (long v : all)
    if (v > 0) m.divisors.push_back(v);
  return m;
}

// --- raw algebra and module data ---------------------------------------------

struct RawAlg {
  int d = 0;
  std::vector<std::vector<QVec>> mult;  // mult[i][k][j]: coeff of b_k in b_i b_j
  QVec unit;

  QVec mul(const QVec& u, const QVec& v) const {
    QVec out(d, Scalar(0));
    for (int i = 0; i < d; ++i) {
      if (u[i].is_zero()) continue;
      for (int j = 0; j < d; ++j) {
        if (v[j].is_zero()) continue;
        Scalar c = u[i] * v[j];
        for (int k = 0; k < d; ++k) out[k] = out[k] + c * mult[i][k][j];
      }
    }
    return out;
  }

  std::vector<QVec> action_grid(const QVec& a) const {
    std::vector<QVec> out(d, QVec(d, Scalar(0)));
    for (int i = 0; i < d; ++i) {
      if (a[i].is_zero()) continue;
      for (int k = 0; k < d; ++k)
        for (int j = 0; j < d; ++j) out[k][j] = out[k][j] + a[i] * mult[i][k][j];
    }
    return out;
  }
};

struct RawMod {
  int r = 0;
  Cols rel;                           // triangular basis
  std::vector<std::vector<QVec>> act;  // act[i]: action of basis element i

  std::vector<QVec> action_grid(const QVec& a) const {
    std::vector<QVec> out(r, QVec(r, Scalar(0)));
    for (std::size_t i = 0; i < act.size(); ++i) {
      if (a[i].is_zero()) continue;
      for (int x = 0; x < r; ++x)
        for (int y = 0; y < r; ++y) out[x][y] = out[x][y] + a[i] * act[i][x][y];
    }
    return out;
  }
};

bool grid_eq(const std::vector<QVec>& a, const std::vector<QVec>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size()) return false;
    for (std::size_t j = 0; j < a[i].size(); ++j)
      if (!(a[i][j] == b[i][j])) return false;
  }
  return true;
}

std::vector<QVec> grid_mul(const std::vector<QVec>& a, const std::vector<QVec>& b) {
  const int n = static_cast<int>(a.size());
  std::vector<QVec> out(n, QVec(n, Scalar(0)));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      if (a[i][k].is_zero()) continue;
      for (int j = 0; j < n; ++j) out[i][j] = out[i][j] + a[i][k] * b[k][j];
    }
  return out;
}

// Closed-fiber nilradical by enumeration: every nilpotent x satisfies x^d = 0.
std::vector<std::vector<mpz_class>> fiber_nilradical(const Dvr& dvr, const RawAlg& a) {
  const mpz_class p = dvr.prime();
  const int d = a.d;
  mpz_class total = 1;
  for (int i = 0; i < d; ++i) {
    total *= p;
    if (total > 200000)
      fail(ErrKind::validation, "closed-fiber enumeration too large for the reference path");
  }
  std::vector<std::vector<std::vector<mpz_class>>> rm(d);
  for (int i = 0; i < d; ++i) {
    rm[i].assign(d, std::vector<mpz_class>(d));
    for (int k = 0; k < d; ++k)
      for (int j = 0; j < d; ++j) rm[i][k][j] = dvr.residue(a.mult[i][k][j]);
  }
  auto fpmul = [&](const std::vector<mpz_class>& u, const std::vector<mpz_class>& v) {
    std::vector<mpz_class> out(d, 0);
    for (int i = 0; i < d; ++i) {
      if (u[i] == 0) continue;
      for (int j = 0; j < d; ++j) {
        if (v[j] == 0) continue;
        mpz_class c = (u[i] * v[j]) % p;
        for (int k = 0; k < d; ++k) out[k] = (out[k] + c * rm[i][k][j]) % p;
      }
    }
    return out;
  };
  FpElim span(p, d);
  std::vector<mpz_class> idx(d, 0);
  while (true) {
    bool zero = true;
    for (int i = 0; i < d; ++i)
      if (idx[i] != 0) zero = false;
    if (!zero) {
      std::vector<mpz_class> x = idx;
      std::vector<mpz_class> y = x;
      for (int t = 1; t < d; ++t) y = fpmul(y, x);
      bool nil = true;
      for (int i = 0; i < d; ++i)
        if (y[i] != 0) nil = false;
      if (nil) span.insert(x);
    }
    int pos = 0;
    while (pos < d) {
      idx[pos] += 1;
      if (idx[pos] < p) break;
      idx[pos] = 0;
      ++pos;
    }
    if (pos == d) break;
  }
  if (d - span.rank() != 1)
    fail(ErrKind::not_local, "the closed fiber has a semisimple quotient of dimension " +
                                 std::to_string(d - span.rank()) + " over the residue field");
  return span.rows;
}

RawAlg validate_table(const Dvr& dvr, const Problem& pr) {
  const int d = static_cast<int>(pr.mult.size());
  if (d == 0) fail(ErrKind::validation, "algebra has no basis");
  if (static_cast<int>(pr.labels.size()) != d || static_cast<int>(pr.unit.size()) != d)
    fail(ErrKind::validation, "labels or unit vector do not match the basis size");
  for (int i = 0; i < d; ++i)
    if (pr.mult[i].rows() != d || pr.mult[i].cols() != d)
      fail(ErrKind::validation, "multiplication matrix has wrong shape");
  RawAlg a;
  a.d = d;
  a.mult.assign(d, std::vector<QVec>(d, QVec(d)));
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k)
      for (int j = 0; j < d; ++j) {
        Scalar x = pr.mult[i].at(k, j);
        if (!dvr.in_ring(x))
          fail(ErrKind::validation, "structure constant outside the base ring: " + x.str());
        a.mult[i][k][j] = x;
      }
  a.unit.resize(d);
  for (int i = 0; i < d; ++i) {
    if (!dvr.in_ring(pr.unit[i]))
      fail(ErrKind::validation, "unit coordinate outside the base ring");
    a.unit[i] = pr.unit[i];
  }
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      for (int k = 0; k < d; ++k)
        if (!(a.mult[i][k][j] == a.mult[j][k][i]))
          fail(ErrKind::validation, "multiplication not commutative on basis pair (" +
                                        pr.labels[i] + ", " + pr.labels[j] + ")");
  std::vector<QVec> uact = a.action_grid(a.unit);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (!(uact[i][j] == (i == j ? Scalar(1) : Scalar(0))))
        fail(ErrKind::validation, "designated unit does not act as identity");
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      QVec prod(d);
      for (int k = 0; k < d; ++k) prod[k] = a.mult[i][k][j];
      std::vector<QVec> lhs = a.action_grid(prod);
      std::vector<QVec> rhs = grid_mul(a.mult[i], a.mult[j]);
      if (!grid_eq(lhs, rhs))
        fail(ErrKind::not_associative,
             "associativity fails through basis pair (" + pr.labels[i] + ", " + pr.labels[j] + ")");
    }
  return a;
}

void validate_point(const Dvr& dvr, const RawAlg& a, const QVec& lambda) {
  const int d = a.d;
  if (static_cast<int>(lambda.size()) != d)
    fail(ErrKind::not_algebra_map, "point has wrong number of coordinates");
  for (const auto& s : lambda)
    if (!dvr.in_ring(s))
      fail(ErrKind::not_algebra_map, "point coordinate outside the base ring: " + s.str());
  Scalar u(0);
  for (int i = 0; i < d; ++i) u = u + lambda[i] * a.unit[i];
  if (!(u == Scalar(1))) fail(ErrKind::not_algebra_map, "point does not send the unit to 1");
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      Scalar lhs(0);
      for (int k = 0; k < d; ++k) lhs = lhs + lambda[k] * a.mult[i][k][j];
      Scalar rhs = lambda[i] * lambda[j];
      if (!(lhs == rhs)) fail(ErrKind::not_algebra_map, "point is not multiplicative");
    }
}

// --- invariants at the point ---------------------------------------------------

Cols point_kernel_lattice(const Dvr& dvr, const QVec& lambda) {
  std::vector<QVec> row(1, lambda);
  return sat_kernel(dvr, row, static_cast<int>(lambda.size()));
}

Cols stable_power(const Dvr& dvr, const RawAlg& a, const Cols& k) {
  Cols cur = k;
  long cur_rank = rank_cols_q(cur);
  while (true) {
    Cols prods;
    for (const auto& x : k)
      for (const auto& y : cur) prods.push_back(a.mul(x, y));
    prods = echelon_cols_O(dvr, std::move(prods));
    long next_rank = rank_cols_q(prods);
    if (next_rank == cur_rank) return cur;
    cur = std::move(prods);
    cur_rank = next_rank;
  }
}

Cols module_images(const RawMod& m, const Cols& elements) {
  Cols out;
  for (const auto& e : elements) {
    std::vector<QVec> g = m.action_grid(e);
    for (int j = 0; j < m.r; ++j) {
      QVec col(m.r);
      for (int i = 0; i < m.r; ++i) col[i] = g[i][j];
      out.push_back(std::move(col));
    }
  }
  return out;
}

Cols module_annihilator(const Dvr& dvr, const RawMod& m, const Cols& elements) {
  const int r = m.r;
  const int s = static_cast<int>(elements.size());
  if (s == 0) return identity_cols(r);
  std::vector<QVec> stacked(r * s, QVec(r));
  for (int k = 0; k < s; ++k) {
    std::vector<QVec> g = m.action_grid(elements[k]);
    for (int i = 0; i < r; ++i) stacked[k * r + i] = g[i];
  }
  Cols targets;
  for (int k = 0; k < s; ++k)
    for (const auto& rc : m.rel) {
      QVec t(r * s, Scalar(0));
      for (int i = 0; i < r; ++i) t[k * r + i] = rc[i];
      targets.push_back(std::move(t));
    }
  return preimage_cols(dvr, stacked, r, targets);
}

Cols ideal_annihilator(const Dvr& dvr, const RawAlg& a, const Cols& k) {
  const int d = a.d;
  const int s = static_cast<int>(k.size());
  if (s == 0) return identity_cols(d);
  std::vector<QVec> stacked(d * s, QVec(d));
  for (int t = 0; t < s; ++t) {
    std::vector<QVec> g = a.action_grid(k[t]);
    for (int i = 0; i < d; ++i) stacked[t * d + i] = g[i];
  }
  return sat_kernel(dvr, stacked, d);
}

long fiber_edim(const Dvr& dvr, const RawAlg& a,
                const std::vector<std::vector<mpz_class>>& nil) {
  const int d = a.d;
  Cols gens;
  for (int i = 0; i < d; ++i) {
    QVec v(d, Scalar(0));
    v[i] = dvr.uniformizer();
    gens.push_back(std::move(v));
  }
  for (const auto& n : nil) {
    QVec v(d);
    for (int i = 0; i < d; ++i) v[i] = Scalar(n[i]);
    gens.push_back(std::move(v));
  }
  Cols mlat = echelon_cols_O(dvr, std::move(gens));
  const int s = static_cast<int>(mlat.size());
  FpElim span(dvr.prime(), s);
  for (int i = 0; i < s; ++i)
    for (int j = i; j < s; ++j) {
      auto c = coords_in(dvr, mlat, a.mul(mlat[i], mlat[j]));
      if (!c)
        fail(ErrKind::internal_inconsistency, "maximal-ideal product escapes the ideal lattice");
      std::vector<mpz_class> rv(s);
      for (int t = 0; t < s; ++t) rv[t] = dvr.residue((*c)[t]);
      span.insert(std::move(rv));
    }
  return s - span.rank();
}

// --- assembly -----------------------------------------------------------------

struct RawInstance {
  RawAlg alg;
  RawMod mod;
  QVec lambda;
  long edim = 0;
  long expected_cuts = 0;
  std::vector<ChainStepView> steps;
};

AnalysisReport certify_raw(const Problem& pr, const Dvr& dvr, const RawInstance& in) {
  const RawAlg& a = in.alg;
  const RawMod& m = in.mod;

  OMod und = omod(dvr, m.r, m.rel);
  if (und.zero()) fail(ErrKind::validation, "module is zero");

  Cols k = point_kernel_lattice(dvr, in.lambda);
  Cols jinf = stable_power(dvr, a, k);
  long dim_loc_alg = a.d - rank_cols_q(jinf);
  long dim_loc_mod = m.r - rank_cols_q(concat(m.rel, module_images(m, jinf)));
  long mu = m.r - rank_cols_q(concat(m.rel, module_images(m, k)));

  Certificate c;
  c.mu = mu;
  c.supported = dim_loc_mod > 0;
  c.free_at_point = dim_loc_mod == mu * dim_loc_alg;
  if ((mu > 0) != c.supported)
    fail(ErrKind::internal_inconsistency, "generator count and support disagree at the point");
  c.regular = dim_loc_alg == 1;
  c.depth_ok = und.divisors.empty();

  // cotangent module of the point
  Cols prods;
  for (std::size_t i = 0; i < k.size(); ++i)
    for (std::size_t j = i; j < k.size(); ++j) prods.push_back(a.mul(k[i], k[j]));
  prods = echelon_cols_O(dvr, std::move(prods));
  Cols sq_coords;
  for (const auto& s : prods) {
    auto cc = coords_in(dvr, k, s);
    if (!cc) fail(ErrKind::internal_inconsistency, "kernel product escapes the kernel lattice");
    sq_coords.push_back(std::move(*cc));
  }
  OMod cot = omod(dvr, static_cast<int>(k.size()), sq_coords);

  // congruence module
  Cols mk = module_annihilator(dvr, m, k);
  Cols ann = ideal_annihilator(dvr, a, k);
  Cols mi = module_annihilator(dvr, m, ann);
  OMod psi = omod(dvr, m.r, concat(concat(mk, mi), m.rel));

  auto cl = cot.length();
  auto pl = psi.length();
  if (c.regular && c.supported && c.depth_ok && cl && pl) {
    c.length_cotangent = *cl;
    c.length_psi = *pl;
    c.delta = c.mu * *cl - *pl;
    c.applicable = true;
    c.complete_intersection = c.delta == 0;
    c.free_summand = c.delta == 0;
  }

  AnalysisReport rep;
  rep.kind = pr.kind;
  rep.prime = pr.prime;
  rep.model_dim = a.d;
  rep.edim = in.edim;
  rep.expected_cuts = in.expected_cuts;
  rep.chain = in.steps;
  rep.lambda.assign(in.lambda.begin(), in.lambda.end());
  rep.cert = c;
  rep.raw_cotangent_length = cl;
  rep.raw_psi_length = pl;
  if (cl && pl) rep.raw_delta = c.mu * *cl - *pl;

  if (!c.regular)
    rep.warnings.push_back("the point is not a reduced isolated point of the generic fiber");
  if (!c.supported) rep.warnings.push_back("the module vanishes at the point");
  if (!c.depth_ok) rep.warnings.push_back("the module has nonzero torsion over the base ring");
  if (c.regular && c.supported && c.depth_ok && !c.applicable)
    rep.warnings.push_back("the congruence module is not of finite length at this point");
  if (rep.raw_delta && *rep.raw_delta < 0)
    rep.warnings.push_back("negative defect, outside the proven inequality");

  if (!c.applicable || c.delta < 0)
    rep.verdict = kVerdictOutside;
  else
    rep.verdict = c.delta == 0 ? kVerdictCi : kVerdictDefect;
  return rep;
}

RawMod regular_raw(const RawAlg& a) {
  RawMod m;
  m.r = a.d;
  m.act.resize(a.d);
  for (int i = 0; i < a.d; ++i) m.act[i] = a.mult[i];
  return m;
}

RawMod table_module_raw(const Dvr& dvr, const RawAlg& a, const TableModule& tm) {
  const int d = a.d;
  if (tm.gens <= 0) fail(ErrKind::validation, "module needs at least one generator");
  const int r = tm.gens * d;
  RawMod m;
  m.r = r;
  m.act.assign(d, std::vector<QVec>(r, QVec(r, Scalar(0))));
  for (int i = 0; i < d; ++i)
    for (int b = 0; b < tm.gens; ++b)
      for (int x = 0; x < d; ++x)
        for (int y = 0; y < d; ++y) m.act[i][b * d + x][b * d + y] = a.mult[i][x][y];
  Cols rel;
  for (const auto& col : tm.columns) {
    if (static_cast<int>(col.size()) != r)
      fail(ErrKind::validation, "module column length must be (generators) x (algebra rank)");
    for (const auto& x : col)
      if (!dvr.in_ring(x)) fail(ErrKind::validation, "relation entry outside the base ring");
    for (int j = 0; j < d; ++j) {
      QVec w(r, Scalar(0));
      for (int b = 0; b < tm.gens; ++b) {
        for (int i = 0; i < d; ++i) {
          Scalar acc(0);
          for (int t = 0; t < d; ++t) acc = acc + a.mult[j][i][t] * col[b * d + t];
          w[b * d + i] = acc;
        }
      }
      rel.push_back(std::move(w));
    }
  }
  m.rel = echelon_cols_O(dvr, std::move(rel));
  return m;
}

RawAlg alg_from_tables(const AlgebraPtr& alg) {
  RawAlg a;
  a.d = alg->dim();
  a.mult.assign(a.d, std::vector<QVec>(a.d, QVec(a.d)));
  for (int i = 0; i < a.d; ++i)
    for (int k = 0; k < a.d; ++k)
      for (int j = 0; j < a.d; ++j) a.mult[i][k][j] = alg->basis_mult(i).at(k, j);
  a.unit.assign(alg->unit().begin(), alg->unit().end());
  return a;
}

RawMod mod_from_finmodule(const Dvr& dvr, const FinModule& fm) {
  RawMod m;
  m.r = fm.ngens();
  const int d = fm.algebra().dim();
  m.act.assign(d, std::vector<QVec>(m.r, QVec(m.r)));
  for (int i = 0; i < d; ++i)
    for (int x = 0; x < m.r; ++x)
      for (int y = 0; y < m.r; ++y) m.act[i][x][y] = fm.basis_action(i).at(x, y);
  Cols rel;
  for (int j = 0; j < fm.relations().cols(); ++j) {
    QVec col(m.r);
    for (int i = 0; i < m.r; ++i) col[i] = fm.relations().at(i, j);
    rel.push_back(std::move(col));
  }
  m.rel = echelon_cols_O(dvr, std::move(rel));
  return m;
}

bool hypothesis_kind(ErrKind k) {
  return k == ErrKind::not_regular_point || k == ErrKind::not_supported ||
         k == ErrKind::zero_depth || k == ErrKind::non_finite_congruence_module;
}

RawInstance build_table_raw(const Problem& pr, const Dvr& dvr) {
  if (!pr.chain.empty()) fail(ErrKind::validation, "cut chains need a polynomial ring");
  if (pr.poly_module)
    fail(ErrKind::validation, "polynomial module columns need a polynomial ring");
  RawInstance in;
  in.alg = validate_table(dvr, pr);
  std::vector<std::vector<mpz_class>> nil = fiber_nilradical(dvr, in.alg);
  in.lambda.assign(pr.point.begin(), pr.point.end());
  validate_point(dvr, in.alg, in.lambda);
  in.mod = pr.table_module ? table_module_raw(dvr, in.alg, *pr.table_module)
                           : regular_raw(in.alg);
  in.edim = fiber_edim(dvr, in.alg, nil);
  return in;
}

RawInstance build_poly_raw(const Problem& pr, const Dvr& dvr) {
  if (pr.table_module) fail(ErrKind::validation, "table module columns need a table ring");
  PolyPresentation pres = make_presentation(dvr, static_cast<int>(pr.names.size()), pr.names,
                                            pr.ring_gens, pr.point);
  AlgebraPtr alg;
  OPoint pt;
  std::optional<FinModule> mod;
  RawInstance in;
  try {
    ChainReport rep = defect_via_chain(pres, pr.poly_module, pr.chain, pr.options);
    alg = rep.finite.algebra;
    pt = rep.point;
    in.expected_cuts = rep.expected_cuts;
    for (const auto& s : rep.steps)
      in.steps.push_back({print_poly(s.cut, pr.names), s.rank_jump, s.regular_generic,
                          s.regular_special, s.module_regularity_assumed});
    mod = pr.poly_module ? transport_module(dvr, rep.finite, *pr.poly_module)
                         : FinModule::regular(alg);
  } catch (const Error& e) {
    const bool finite_without_chain =
        e.kind() == ErrKind::chain_length_mismatch && pr.chain.empty();
    if (!hypothesis_kind(e.kind()) && !finite_without_chain) throw;
    PolyPresentation cut = pres;
    for (const auto& f : pr.chain) cut.gens.push_back(f);
    FiniteBasis fb;
    try {
      fb = finite_basis_certificate(cut, pr.options.degree_cap);
    } catch (const Error&) {
      if (finite_without_chain) throw e;
      throw;
    }
    alg = fb.algebra;
    pt = presentation_point(fb, cut);
    in.expected_cuts = finite_without_chain ? jacobian_conormal(pres).free_rank()
                                            : static_cast<long>(pr.chain.size());
    for (const auto& f : pr.chain)
      in.steps.push_back({print_poly(f, pr.names), true, true, true, pr.poly_module.has_value()});
    mod = pr.poly_module ? transport_module(dvr, fb, *pr.poly_module)
                         : FinModule::regular(alg);
  }
  in.alg = alg_from_tables(alg);
  std::vector<std::vector<mpz_class>> nil = fiber_nilradical(dvr, in.alg);
  in.lambda.assign(pt.lambda.begin(), pt.lambda.end());
  in.mod = mod_from_finmodule(dvr, *mod);
  in.edim = fiber_edim(dvr, in.alg, nil);
  return in;
}

}  // namespace

AnalysisReport oracle_recompute(const Problem& pr) {
  Dvr dvr(pr.prime);
  RawInstance in =
      pr.kind == RingKind::table ? build_table_raw(pr, dvr) : build_poly_raw(pr, dvr);
  return certify_raw(pr, dvr, in);
}

}  // namespace congmod
