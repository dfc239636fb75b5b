// Minimal linear algebra over the residue field F_p, used for Nakayama-style
// minimal-generator selection and for the locality test on the closed fiber.
#pragma once

#include <vector>

#include "congmod/dvr.hpp"
#include "congmod/matrix.hpp"

namespace congmod {

using FpVec = std::vector<mpz_class>;

// Incremental row-space tracker: insert() reduces a vector against the rows
// seen so far and keeps it when independent.
class FpSolver {
 public:
  explicit FpSolver(const mpz_class& p, int n) : p_(p), n_(n) {}

  // returns true when v was independent of the current span
  bool insert(FpVec v);
  bool reduces_to_zero(FpVec v) const;
  int rank() const { return static_cast<int>(rows_.size()); }

 private:
  void reduce(FpVec& v) const;
  mpz_class p_;
  int n_;
  std::vector<FpVec> rows_;
  std::vector<int> pivots_;
};

FpVec fp_reduce_vec(const Dvr& dvr, const Vec& v);
FpVec fp_col(const Dvr& dvr, const Mat& m, int j);

// Kernel basis over F_p of the matrix with the given columns.
std::vector<FpVec> fp_kernel(const mpz_class& p, const std::vector<FpVec>& cols, int nrows);

}  // namespace congmod
