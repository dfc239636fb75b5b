// Dense exact linear algebra over O = Z_(p) and its fraction field, plus the
// lattice calculus everything else is built from.  A "lattice" is the column
// span over O of a matrix; the canonical basis below is a column echelon form
// with p-power pivots and canonically reduced entries, so two lattices are
// equal iff their canonical bases are identical matrices.
#pragma once

#include <vector>

#include "congmod/dvr.hpp"

namespace congmod {

using Vec = std::vector<Scalar>;

class Mat {
 public:
  Mat() : rows_(0), cols_(0) {}
  Mat(int r, int c) : rows_(r), cols_(c), data_(static_cast<size_t>(r) * c) {}
  static Mat identity(int n);
  static Mat from_rows(const std::vector<std::vector<Scalar>>& rows);
  static Mat from_cols(const std::vector<Vec>& cols, int nrows);
  static Mat hstack(const Mat& a, const Mat& b);
  static Mat vstack(const Mat& a, const Mat& b);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Scalar& at(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
  const Scalar& at(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }
  void set(int i, int j, const Scalar& v) { at(i, j) = v; }

  Vec col(int j) const;
  void set_col(int j, const Vec& v);
  Mat take_cols(const std::vector<int>& idx) const;
  Mat transpose() const;
  bool is_zero() const;

  Mat operator*(const Mat& o) const;
  Vec apply(const Vec& v) const;
  Mat operator+(const Mat& o) const;
  Mat operator-(const Mat& o) const;
  Mat operator*(const Scalar& s) const;
  bool operator==(const Mat& o) const;
  bool operator!=(const Mat& o) const { return !(*this == o); }

  void swap_rows(int i, int j);
  void swap_cols(int i, int j);
  void add_row(int i, int j, const Scalar& c);  // row_i += c * row_j
  void add_col(int i, int j, const Scalar& c);  // col_i += c * col_j
  void scale_row(int i, const Scalar& c);
  void scale_col(int j, const Scalar& c);

 private:
  int rows_, cols_;
  std::vector<Scalar> data_;
};

// U * A * V = S exactly, with U, V invertible over O and S diagonal with
// entries p^{d_1} | p^{d_2} | ...  divisors holds d_1 <= d_2 <= ... for the
// nonzero diagonal; zero_cols/zero_rows count the vanishing tail of S.
struct SmithForm {
  Mat U, S, V, Uinv, Vinv;
  std::vector<long> divisors;
  int rank = 0;
  int zero_cols = 0;
  int zero_rows = 0;
};

SmithForm smith_normal_form(const Dvr& dvr, const Mat& a);

// Row reduction over the fraction field.  pivots (if non-null) receives the
// pivot column of each nonzero row.
Mat rref_E(const Mat& a, std::vector<int>* pivots);
int rank_E(const Mat& a);
Mat kernel_E(const Mat& a);  // columns form a basis of the nullspace
std::optional<Vec> solve_E(const Mat& a, const Vec& b);

// Saturated integral kernel: an O-basis of ker(a) ∩ O^n, in canonical form.
Mat kernel_O(const Dvr& dvr, const Mat& a);

// Canonical column-echelon basis of the column span over O.
Mat lattice_basis(const Dvr& dvr, const Mat& gens);
Mat lattice_sum(const Dvr& dvr, const Mat& a, const Mat& b);
bool lattice_eq(const Dvr& dvr, const Mat& a, const Mat& b);
// Membership tests expect a canonical basis on the left.
bool lattice_contains(const Dvr& dvr, const Mat& basis, const Vec& v);
bool lattice_contains_all(const Dvr& dvr, const Mat& basis, const Mat& gens);
// Coordinates of v in a canonical echelon basis, nullopt when v is outside.
std::optional<Vec> lattice_coords(const Dvr& dvr, const Mat& basis, const Vec& v);
// Smallest saturated lattice containing the span (quotient torsion-free).
Mat saturation(const Dvr& dvr, const Mat& gens);
// {v in O^n : F v lies in the lattice spanned by target}, as canonical basis.
Mat preimage_lattice(const Dvr& dvr, const Mat& f, const Mat& target);

// Unique O-solution of G x = v for G with full column rank; nullopt when the
// system is unsolvable or the solution leaves O.
std::optional<Vec> solve_in_O(const Dvr& dvr, const Mat& g, const Vec& v);
Mat inverse_over_E(const Mat& a);

struct TorsSplit;

// A finitely generated O-module presented as coker(relations : O^k -> O^g).
// Isomorphism class data (elementary divisors + free rank) is cached; two
// modules compare equal iff those agree.
class FinOModule {
 public:
  FinOModule(const Dvr& dvr, int generators, const Mat& relations);
  static FinOModule zero(const Dvr& dvr) { return FinOModule(dvr, 0, Mat(0, 0)); }
  static FinOModule free_module(const Dvr& dvr, int rank) {
    return FinOModule(dvr, rank, Mat(rank, 0));
  }

  const Dvr& dvr() const { return dvr_; }
  int generators() const { return gens_; }
  const Mat& relations() const { return rel_; }
  // Elementary divisor valuations, positive entries only, ascending.
  const std::vector<long>& divisors() const { return divisors_; }
  int free_rank() const { return free_rank_; }
  bool is_zero_module() const { return free_rank_ == 0 && divisors_.empty(); }

  std::optional<long> length() const;  // nullopt = infinite
  long torsion_length() const;
  // Fitting ideals as p-valuations; nullopt encodes the zero ideal.
  std::optional<long> fitting_ideal(int i) const;

  bool operator==(const FinOModule& o) const {
    return divisors_ == o.divisors_ && free_rank_ == o.free_rank_;
  }
  bool operator!=(const FinOModule& o) const { return !(*this == o); }

  TorsSplit tors_tfree() const;

 private:
  Dvr dvr_;
  int gens_;
  Mat rel_;
  std::vector<long> raw_divisors_;  // including zero entries, ascending
  std::vector<long> divisors_;
  int free_rank_;
};

struct TorsSplit {
  FinOModule tors, tfree;
  Mat tors_gens, tfree_gens;  // columns: classes in the original generators
};

// Presentation of span(G)/span(S) where G is a basis and span(S) ⊆ span(G).
FinOModule quotient_presentation(const Dvr& dvr, const Mat& g, const Mat& s);

std::string divisors_str(const std::vector<long>& d);

}  // namespace congmod
