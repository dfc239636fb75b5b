#include "congmod/matrix.hpp"

#include <algorithm>
#include <sstream>

namespace congmod {

Mat Mat::identity(int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = Scalar(1);
  return m;
}

Mat Mat::from_rows(const std::vector<std::vector<Scalar>>& rows) {
  int r = static_cast<int>(rows.size());
  int c = r == 0 ? 0 : static_cast<int>(rows[0].size());
  Mat m(r, c);
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(rows[i].size()) != c)
      fail(ErrKind::validation, "ragged matrix rows");
    for (int j = 0; j < c; ++j) m.at(i, j) = rows[i][j];
  }
  return m;
}

Mat Mat::from_cols(const std::vector<Vec>& cols, int nrows) {
  Mat m(nrows, static_cast<int>(cols.size()));
  for (int j = 0; j < static_cast<int>(cols.size()); ++j) {
    if (static_cast<int>(cols[j].size()) != nrows)
      fail(ErrKind::validation, "column length mismatch");
    for (int i = 0; i < nrows; ++i) m.at(i, j) = cols[j][i];
  }
  return m;
}

Mat Mat::hstack(const Mat& a, const Mat& b) {
  if (a.cols() == 0 && a.rows() == 0) return b;
  if (b.cols() == 0 && b.rows() == 0) return a;
  if (a.rows() != b.rows()) fail(ErrKind::validation, "hstack row mismatch");
  Mat m(a.rows(), a.cols() + b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) m.at(i, j) = a.at(i, j);
    for (int j = 0; j < b.cols(); ++j) m.at(i, a.cols() + j) = b.at(i, j);
  }
  return m;
}

Mat Mat::vstack(const Mat& a, const Mat& b) {
  if (a.cols() != b.cols()) fail(ErrKind::validation, "vstack col mismatch");
  Mat m(a.rows() + b.rows(), a.cols());
  for (int j = 0; j < a.cols(); ++j) {
    for (int i = 0; i < a.rows(); ++i) m.at(i, j) = a.at(i, j);
    for (int i = 0; i < b.rows(); ++i) m.at(a.rows() + i, j) = b.at(i, j);
  }
  return m;
}

Vec Mat::col(int j) const {
  Vec v(rows_);
  for (int i = 0; i < rows_; ++i) v[i] = at(i, j);
  return v;
}

void Mat::set_col(int j, const Vec& v) {
  for (int i = 0; i < rows_; ++i) at(i, j) = v[i];
}

Mat Mat::take_cols(const std::vector<int>& idx) const {
  Mat m(rows_, static_cast<int>(idx.size()));
  for (int j = 0; j < static_cast<int>(idx.size()); ++j)
    for (int i = 0; i < rows_; ++i) m.at(i, j) = at(i, idx[j]);
  return m;
}

Mat Mat::transpose() const {
  Mat m(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) m.at(j, i) = at(i, j);
  return m;
}

bool Mat::is_zero() const {
  for (const auto& s : data_)
    if (!s.is_zero()) return false;
  return true;
}

Mat Mat::operator*(const Mat& o) const {
  if (cols_ != o.rows_) fail(ErrKind::validation, "matrix product shape mismatch");
  Mat m(rows_, o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const Scalar& a = at(i, k);
      if (a.is_zero()) continue;
      for (int j = 0; j < o.cols_; ++j) {
        const Scalar& b = o.at(k, j);
        if (!b.is_zero()) m.at(i, j) += a * b;
      }
    }
  return m;
}

Vec Mat::apply(const Vec& v) const {
  if (static_cast<int>(v.size()) != cols_) fail(ErrKind::validation, "apply shape mismatch");
  Vec r(rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j)
      if (!at(i, j).is_zero() && !v[j].is_zero()) r[i] += at(i, j) * v[j];
  return r;
}

Mat Mat::operator+(const Mat& o) const {
  Mat m(rows_, cols_);
  for (size_t i = 0; i < data_.size(); ++i) m.data_[i] = data_[i] + o.data_[i];
  return m;
}

Mat Mat::operator-(const Mat& o) const {
  Mat m(rows_, cols_);
  for (size_t i = 0; i < data_.size(); ++i) m.data_[i] = data_[i] - o.data_[i];
  return m;
}

Mat Mat::operator*(const Scalar& s) const {
  Mat m(rows_, cols_);
  for (size_t i = 0; i < data_.size(); ++i) m.data_[i] = data_[i] * s;
  return m;
}

bool Mat::operator==(const Mat& o) const {
  return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
}

void Mat::swap_rows(int i, int j) {
  if (i == j) return;
  for (int c = 0; c < cols_; ++c) std::swap(at(i, c), at(j, c));
}

void Mat::swap_cols(int i, int j) {
  if (i == j) return;
  for (int r = 0; r < rows_; ++r) std::swap(at(r, i), at(r, j));
}

void Mat::add_row(int i, int j, const Scalar& c) {
  for (int k = 0; k < cols_; ++k)
    if (!at(j, k).is_zero()) at(i, k) += c * at(j, k);
}

void Mat::add_col(int i, int j, const Scalar& c) {
  for (int k = 0; k < rows_; ++k)
    if (!at(k, j).is_zero()) at(k, i) += c * at(k, j);
}

void Mat::scale_row(int i, const Scalar& c) {
  for (int k = 0; k < cols_; ++k) at(i, k) *= c;
}

void Mat::scale_col(int j, const Scalar& c) {
  for (int k = 0; k < rows_; ++k) at(k, j) *= c;
}

namespace {

// Pivot choice is part of the output contract: minimal valuation, ties broken
// by smallest |numerator|, then row-major position.
bool better_pivot(const Dvr& dvr, const Scalar& cand, long cv, const Scalar& best, long bv) {
  if (cv != bv) return cv < bv;
  mpz_class ca = abs(cand.num()), ba = abs(best.num());
  return ca < ba;
}

}  // namespace

SmithForm smith_normal_form(const Dvr& dvr, const Mat& a) {
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (!dvr.in_ring(a.at(i, j)))
        fail(ErrKind::validation, "Smith form input leaves O at entry " + a.at(i, j).str());
  SmithForm f;
  int m = a.rows(), n = a.cols();
  f.S = a;
  f.U = Mat::identity(m);
  f.Uinv = Mat::identity(m);
  f.V = Mat::identity(n);
  f.Vinv = Mat::identity(n);
  int k = 0;
  int bound = std::min(m, n);
  while (k < bound) {
    int pi = -1, pj = -1;
    long pval = 0;
    for (int i = k; i < m; ++i)
      for (int j = k; j < n; ++j) {
        const Scalar& s = f.S.at(i, j);
        if (s.is_zero()) continue;
        long v = *dvr.valuation(s);
        if (pi < 0 || better_pivot(dvr, s, v, f.S.at(pi, pj), pval)) {
          pi = i;
          pj = j;
          pval = v;
        }
      }
    if (pi < 0) break;
    f.S.swap_rows(k, pi);
    f.U.swap_rows(k, pi);
    f.Uinv.swap_cols(k, pi);
    f.S.swap_cols(k, pj);
    f.V.swap_cols(k, pj);
    f.Vinv.swap_rows(k, pj);
    Scalar pivot = f.S.at(k, k);
    for (int i = k + 1; i < m; ++i) {
      if (f.S.at(i, k).is_zero()) continue;
      Scalar c = f.S.at(i, k) / pivot;  // in O by pivot minimality
      f.S.add_row(i, k, -c);
      f.U.add_row(i, k, -c);
      f.Uinv.add_col(k, i, c);
    }
    for (int j = k + 1; j < n; ++j) {
      if (f.S.at(k, j).is_zero()) continue;
      Scalar c = f.S.at(k, j) / pivot;
      f.S.add_col(j, k, -c);
      f.V.add_col(j, k, -c);
      f.Vinv.add_row(k, j, c);
    }
    Scalar target = dvr.pi_pow(pval);
    Scalar unit = pivot / target;
    Scalar uinv = Scalar(1) / unit;
    f.S.scale_row(k, uinv);
    f.U.scale_row(k, uinv);
    f.Uinv.scale_col(k, unit);
    f.divisors.push_back(pval);
    ++k;
  }
  f.rank = k;
  f.zero_cols = n - k;
  f.zero_rows = m - k;
  for (size_t i = 1; i < f.divisors.size(); ++i)
    if (f.divisors[i] < f.divisors[i - 1])
      fail(ErrKind::internal_inconsistency, "Smith divisors not monotone");
  if (f.U * a * f.V != f.S || f.U * f.Uinv != Mat::identity(m) ||
      f.V * f.Vinv != Mat::identity(n))
    fail(ErrKind::internal_inconsistency, "Smith form transform verification failed");
  return f;
}

Mat rref_E(const Mat& a, std::vector<int>* pivots) {
  Mat r = a;
  int m = r.rows(), n = r.cols();
  int row = 0;
  if (pivots) pivots->clear();
  for (int col = 0; col < n && row < m; ++col) {
    int p = -1;
    for (int i = row; i < m; ++i)
      if (!r.at(i, col).is_zero()) {
        p = i;
        break;
      }
    if (p < 0) continue;
    r.swap_rows(row, p);
    Scalar inv = Scalar(1) / r.at(row, col);
    r.scale_row(row, inv);
    for (int i = 0; i < m; ++i) {
      if (i == row || r.at(i, col).is_zero()) continue;
      r.add_row(i, row, -r.at(i, col));
    }
    if (pivots) pivots->push_back(col);
    ++row;
  }
  return r;
}

int rank_E(const Mat& a) {
  std::vector<int> piv;
  rref_E(a, &piv);
  return static_cast<int>(piv.size());
}

Mat kernel_E(const Mat& a) {
  std::vector<int> piv;
  Mat r = rref_E(a, &piv);
  int n = a.cols();
  std::vector<bool> is_pivot(n, false);
  for (int c : piv) is_pivot[c] = true;
  std::vector<Vec> basis;
  for (int j = 0; j < n; ++j) {
    if (is_pivot[j]) continue;
    Vec v(n);
    v[j] = Scalar(1);
    for (int i = 0; i < static_cast<int>(piv.size()); ++i) v[piv[i]] = -r.at(i, j);
    basis.push_back(v);
  }
  return Mat::from_cols(basis, n);
}

std::optional<Vec> solve_E(const Mat& a, const Vec& b) {
  Mat aug = Mat::hstack(a, Mat::from_cols({b}, a.rows()));
  std::vector<int> piv;
  Mat r = rref_E(aug, &piv);
  int n = a.cols();
  Vec x(n);
  for (int i = 0; i < static_cast<int>(piv.size()); ++i) {
    if (piv[i] == n) return std::nullopt;  // inconsistent
    x[piv[i]] = r.at(i, n);
  }
  return x;
}

namespace {

long min_col_valuation(const Dvr& dvr, const Vec& v) {
  bool any = false;
  long best = 0;
  for (const auto& s : v) {
    if (s.is_zero()) continue;
    long val = *dvr.valuation(s);
    if (!any || val < best) best = val;
    any = true;
  }
  return any ? best : 0;
}

// Column echelon form over O with canonical reduction; the workhorse behind
// lattice_basis / kernel_O.  Columns scaled so pivot entries are p-powers,
// pivot rows strictly increasing, and entries at later pivot rows reduced to
// canonical integral representatives.
Mat column_echelon(const Dvr& dvr, Mat b) {
  int n = b.rows(), k = b.cols();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j)
      if (!dvr.in_ring(b.at(i, j)))
        fail(ErrKind::validation, "lattice generator leaves O: " + b.at(i, j).str());
  int done = 0;  // columns fixed so far
  std::vector<int> pivot_rows;
  std::vector<long> pivot_vals;
  for (int row = 0; row < n && done < k; ++row) {
    int best = -1;
    long bval = 0;
    for (int j = done; j < k; ++j) {
      const Scalar& s = b.at(row, j);
      if (s.is_zero()) continue;
      long v = *dvr.valuation(s);
      if (best < 0 || better_pivot(dvr, s, v, b.at(row, best), bval)) {
        best = j;
        bval = v;
      }
    }
    if (best < 0) continue;
    b.swap_cols(done, best);
    Scalar pivot = b.at(row, done);
    Scalar target = dvr.pi_pow(bval);
    b.scale_col(done, target / pivot);  // unit scaling
    for (int j = done + 1; j < k; ++j) {
      if (b.at(row, j).is_zero()) continue;
      Scalar c = b.at(row, j) / target;  // in O by pivot minimality
      b.add_col(j, done, -c);
    }
    pivot_rows.push_back(row);
    pivot_vals.push_back(bval);
    ++done;
  }
  // Drop zero columns, then reduce earlier columns at later pivot rows.
  Mat basis(n, done);
  for (int j = 0; j < done; ++j)
    for (int i = 0; i < n; ++i) basis.at(i, j) = b.at(i, j);
  for (int j = 0; j < done; ++j)
    for (int l = j + 1; l < done; ++l) {
      int r = pivot_rows[l];
      const Scalar& e = basis.at(r, j);
      if (e.is_zero()) continue;
      Scalar rep(dvr.canonical_mod(e, pivot_vals[l]));
      Scalar c = (e - rep) / dvr.pi_pow(pivot_vals[l]);
      basis.add_col(j, l, -c);
    }
  return basis;
}

std::vector<int> echelon_pivot_rows(const Mat& basis) {
  std::vector<int> rows;
  for (int j = 0; j < basis.cols(); ++j) {
    int r = 0;
    while (r < basis.rows() && basis.at(r, j).is_zero()) ++r;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

Mat lattice_basis(const Dvr& dvr, const Mat& gens) { return column_echelon(dvr, gens); }

Mat lattice_sum(const Dvr& dvr, const Mat& a, const Mat& b) {
  if (a.cols() == 0) return lattice_basis(dvr, b);
  if (b.cols() == 0) return lattice_basis(dvr, a);
  return lattice_basis(dvr, Mat::hstack(a, b));
}

bool lattice_eq(const Dvr& dvr, const Mat& a, const Mat& b) {
  return lattice_basis(dvr, a) == lattice_basis(dvr, b);
}

bool lattice_contains(const Dvr& dvr, const Mat& basis, const Vec& v) {
  std::vector<int> prow = echelon_pivot_rows(basis);
  Vec w = v;
  for (int j = 0; j < basis.cols(); ++j) {
    int r = prow[j];
    // rows above the pivot must already be clear
    for (int i = (j == 0 ? 0 : prow[j - 1] + 1); i < r; ++i)
      if (!w[i].is_zero()) return false;
    if (w[r].is_zero()) continue;
    Scalar c = w[r] / basis.at(r, j);
    if (!dvr.in_ring(c)) return false;
    for (int i = 0; i < basis.rows(); ++i)
      if (!basis.at(i, j).is_zero()) w[i] -= c * basis.at(i, j);
  }
  for (const auto& s : w)
    if (!s.is_zero()) return false;
  return true;
}

bool lattice_contains_all(const Dvr& dvr, const Mat& basis, const Mat& gens) {
  for (int j = 0; j < gens.cols(); ++j)
    if (!lattice_contains(dvr, basis, gens.col(j))) return false;
  return true;
}

std::optional<Vec> lattice_coords(const Dvr& dvr, const Mat& basis, const Vec& v) {
  std::vector<int> prow = echelon_pivot_rows(basis);
  Vec w = v;
  Vec coeff(basis.cols(), Scalar(0));
  for (int j = 0; j < basis.cols(); ++j) {
    int r = prow[j];
    for (int i = (j == 0 ? 0 : prow[j - 1] + 1); i < r; ++i)
      if (!w[i].is_zero()) return std::nullopt;
    if (w[r].is_zero()) continue;
    Scalar c = w[r] / basis.at(r, j);
    if (!dvr.in_ring(c)) return std::nullopt;
    coeff[j] = c;
    for (int i = 0; i < basis.rows(); ++i)
      if (!basis.at(i, j).is_zero()) w[i] -= c * basis.at(i, j);
  }
  for (const auto& s : w)
    if (!s.is_zero()) return std::nullopt;
  return coeff;
}

Mat saturation(const Dvr& dvr, const Mat& gens) {
  Mat b = lattice_basis(dvr, gens);
  if (b.cols() == 0) return b;
  SmithForm f = smith_normal_form(dvr, b);
  std::vector<int> idx;
  for (int j = 0; j < f.rank; ++j) idx.push_back(j);
  return lattice_basis(dvr, f.Uinv.take_cols(idx));
}

Mat kernel_O(const Dvr& dvr, const Mat& a) {
  Mat ke = kernel_E(a);
  int n = a.cols();
  if (ke.cols() == 0) return Mat(n, 0);
  // scale each column to have minimal valuation zero, then saturate
  for (int j = 0; j < ke.cols(); ++j) {
    long mv = min_col_valuation(dvr, ke.col(j));
    ke.scale_col(j, dvr.pi_pow(-mv));
  }
  // clear denominators prime to p (harmless units at p, but keep entries in O)
  for (int j = 0; j < ke.cols(); ++j) {
    mpz_class l(1);
    for (int i = 0; i < n; ++i) {
      mpz_class d = ke.at(i, j).den();
      mpz_class g;
      mpz_gcd(g.get_mpz_t(), l.get_mpz_t(), d.get_mpz_t());
      l = l / g * d;
    }
    mpz_class rem;
    mpz_remove(rem.get_mpz_t(), l.get_mpz_t(), dvr.prime().get_mpz_t());
    ke.scale_col(j, Scalar(rem));
  }
  return saturation(dvr, ke);
}

Mat preimage_lattice(const Dvr& dvr, const Mat& f, const Mat& target) {
  Mat L = lattice_basis(dvr, target);
  if (L.cols() == 0) return kernel_O(dvr, f);
  Mat combined = Mat::hstack(f, L);
  Mat k = kernel_O(dvr, combined);
  // project to the v-part
  Mat proj(f.cols(), k.cols());
  for (int j = 0; j < k.cols(); ++j)
    for (int i = 0; i < f.cols(); ++i) proj.at(i, j) = k.at(i, j);
  return lattice_basis(dvr, proj);
}

std::optional<Vec> solve_in_O(const Dvr& dvr, const Mat& g, const Vec& v) {
  auto x = solve_E(g, v);
  if (!x) return std::nullopt;
  if (g.apply(*x) != v) return std::nullopt;  // rank-deficient consistency
  for (const auto& s : *x)
    if (!dvr.in_ring(s)) return std::nullopt;
  return x;
}

Mat inverse_over_E(const Mat& a) {
  if (a.rows() != a.cols()) fail(ErrKind::validation, "inverse of non-square matrix");
  int n = a.rows();
  Mat aug = Mat::hstack(a, Mat::identity(n));
  std::vector<int> piv;
  Mat r = rref_E(aug, &piv);
  if (static_cast<int>(piv.size()) != n || piv[n - 1] != n - 1)
    fail(ErrKind::validation, "matrix not invertible");
  Mat inv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv.at(i, j) = r.at(i, n + j);
  return inv;
}

FinOModule::FinOModule(const Dvr& dvr, int generators, const Mat& relations)
    : dvr_(dvr), gens_(generators), rel_(relations), free_rank_(0) {
  if (rel_.cols() == 0) rel_ = Mat(gens_, 0);
  if (rel_.rows() != gens_)
    fail(ErrKind::validation, "presentation rows must equal generator count");
  SmithForm f = smith_normal_form(dvr_, rel_);
  raw_divisors_ = f.divisors;
  for (long d : raw_divisors_)
    if (d > 0) divisors_.push_back(d);
  free_rank_ = gens_ - f.rank;
}

std::optional<long> FinOModule::length() const {
  if (free_rank_ > 0) return std::nullopt;
  return torsion_length();
}

long FinOModule::torsion_length() const {
  long t = 0;
  for (long d : divisors_) t += d;
  return t;
}

std::optional<long> FinOModule::fitting_ideal(int i) const {
  if (i < 0) fail(ErrKind::validation, "negative Fitting index");
  int take = gens_ - i;
  if (take <= 0) return 0;  // unit ideal
  if (take > static_cast<int>(raw_divisors_.size())) return std::nullopt;  // zero ideal
  long v = 0;
  for (int j = 0; j < take; ++j) v += raw_divisors_[j];
  return v;
}

TorsSplit FinOModule::tors_tfree() const {
  SmithForm f = smith_normal_form(dvr_, rel_);
  std::vector<int> tors_idx, free_idx;
  for (int j = 0; j < f.rank; ++j)
    if (f.divisors[j] > 0) tors_idx.push_back(j);
  for (int j = f.rank; j < gens_; ++j) free_idx.push_back(j);
  Mat tors_rel(static_cast<int>(tors_idx.size()), static_cast<int>(tors_idx.size()));
  for (int j = 0; j < static_cast<int>(tors_idx.size()); ++j)
    tors_rel.at(j, j) = dvr_.pi_pow(f.divisors[tors_idx[j]]);
  return TorsSplit{FinOModule(dvr_, static_cast<int>(tors_idx.size()), tors_rel),
                   FinOModule::free_module(dvr_, static_cast<int>(free_idx.size())),
                   f.Uinv.take_cols(tors_idx), f.Uinv.take_cols(free_idx)};
}

FinOModule quotient_presentation(const Dvr& dvr, const Mat& g, const Mat& s) {
  int gc = g.cols();
  Mat rel(gc, s.cols());
  for (int j = 0; j < s.cols(); ++j) {
    auto x = solve_in_O(dvr, g, s.col(j));
    if (!x)
      fail(ErrKind::internal_inconsistency,
           "quotient presentation: generator outside the big lattice");
    rel.set_col(j, *x);
  }
  return FinOModule(dvr, gc, rel);
}

std::string divisors_str(const std::vector<long>& d) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < d.size(); ++i) {
    if (i) os << ",";
    os << d[i];
  }
  os << "]";
  return os.str();
}

}  // namespace congmod
