#include "congmod/fp.hpp"

namespace congmod {

namespace {

mpz_class fp_inv(const mpz_class& a, const mpz_class& p) {
  mpz_class out;
  if (mpz_invert(out.get_mpz_t(), a.get_mpz_t(), p.get_mpz_t()) == 0)
    fail(ErrKind::internal_inconsistency, "non-invertible pivot over the residue field");
  return out;
}

}  // namespace

void FpSolver::reduce(FpVec& v) const {
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const mpz_class& c = v[pivots_[r]];
    if (c == 0) continue;
    for (int j = 0; j < n_; ++j) {
      v[j] = (v[j] - c * rows_[r][j]) % p_;
      if (v[j] < 0) v[j] += p_;
    }
  }
}

bool FpSolver::insert(FpVec v) {
  if (static_cast<int>(v.size()) != n_)
    fail(ErrKind::internal_inconsistency, "residue-field vector has wrong length");
  for (auto& x : v) {
    x %= p_;
    if (x < 0) x += p_;
  }
  reduce(v);
  int piv = -1;
  for (int j = 0; j < n_; ++j)
    if (v[j] != 0) {
      piv = j;
      break;
    }
  if (piv < 0) return false;
  mpz_class inv = fp_inv(v[piv], p_);
  for (int j = 0; j < n_; ++j) v[j] = (v[j] * inv) % p_;
  rows_.push_back(std::move(v));
  pivots_.push_back(piv);
  return true;
}

bool FpSolver::reduces_to_zero(FpVec v) const {
  for (auto& x : v) {
    x %= p_;
    if (x < 0) x += p_;
  }
  reduce(v);
  for (const auto& x : v)
    if (x != 0) return false;
  return true;
}

FpVec fp_reduce_vec(const Dvr& dvr, const Vec& v) {
  FpVec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = dvr.residue(v[i]);
  return out;
}

FpVec fp_col(const Dvr& dvr, const Mat& m, int j) {
  FpVec out(m.rows());
  for (int i = 0; i < m.rows(); ++i) out[i] = dvr.residue(m.at(i, j));
  return out;
}

std::vector<FpVec> fp_kernel(const mpz_class& p, const std::vector<FpVec>& cols, int nrows) {
  // Gaussian elimination on the transpose: track row operations on an
  // identity block, rows that vanish give kernel vectors.
  const int nc = static_cast<int>(cols.size());
  std::vector<FpVec> m(nc, FpVec(nrows, 0));
  std::vector<FpVec> id(nc, FpVec(nc, 0));
  for (int j = 0; j < nc; ++j) {
    id[j][j] = 1;
    for (int i = 0; i < nrows; ++i) {
      mpz_class x = cols[j][i] % p;
      if (x < 0) x += p;
      m[j][i] = x;
    }
  }
  std::vector<FpVec> kernel;
  int row = 0;
  for (int c = 0; c < nrows && row < nc; ++c) {
    int sel = -1;
    for (int r = row; r < nc; ++r)
      if (m[r][c] != 0) {
        sel = r;
        break;
      }
    if (sel < 0) continue;
    std::swap(m[sel], m[row]);
    std::swap(id[sel], id[row]);
    mpz_class inv = fp_inv(m[row][c], p);
    for (int j = 0; j < nrows; ++j) m[row][j] = (m[row][j] * inv) % p;
    for (int j = 0; j < nc; ++j) id[row][j] = (id[row][j] * inv) % p;
    for (int r = 0; r < nc; ++r) {
      if (r == row || m[r][c] == 0) continue;
      mpz_class f = m[r][c];
      for (int j = 0; j < nrows; ++j) {
        m[r][j] = (m[r][j] - f * m[row][j]) % p;
        if (m[r][j] < 0) m[r][j] += p;
      }
      for (int j = 0; j < nc; ++j) {
        id[r][j] = (id[r][j] - f * id[row][j]) % p;
        if (id[r][j] < 0) id[r][j] += p;
      }
    }
    ++row;
  }
  for (int r = row; r < nc; ++r) kernel.push_back(id[r]);
  return kernel;
}

}  // namespace congmod
