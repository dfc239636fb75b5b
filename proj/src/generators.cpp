#include "congmod/generators.hpp"

namespace congmod {

AlgebraPtr trivial_algebra(const Dvr& dvr) {
  Mat one = Mat::identity(1);
  return FinAlgebra::make(dvr, {"1"}, {one}, Vec{Scalar(1)});
}

AlgebraPtr hypersurface_algebra(const Dvr& dvr, long m) {
  return branches_algebra(dvr, {m});
}

AlgebraPtr branches_algebra(const Dvr& dvr, const std::vector<long>& ms) {
  const int k = static_cast<int>(ms.size());
  const int d = k + 1;
  std::vector<std::string> labels{"1"};
  for (int i = 1; i <= k; ++i) labels.push_back("x" + std::to_string(i));
  std::vector<Mat> mult(d, Mat(d, d));
  mult[0] = Mat::identity(d);
  for (int i = 1; i <= k; ++i) {
    mult[i].set(i, 0, Scalar(1));               // x_i * 1
    mult[i].set(i, i, dvr.pi_pow(ms[i - 1]));   // x_i * x_i = p^m x_i
  }
  Vec unit(d, Scalar(0));
  unit[0] = Scalar(1);
  return FinAlgebra::make(dvr, labels, mult, unit);
}

AlgebraPtr square_zero_algebra(const Dvr& dvr, int n) {
  const int d = n + 1;
  std::vector<std::string> labels{"1"};
  for (int i = 1; i <= n; ++i) labels.push_back("x" + std::to_string(i));
  std::vector<Mat> mult(d, Mat(d, d));
  mult[0] = Mat::identity(d);
  for (int i = 1; i <= n; ++i) mult[i].set(i, 0, Scalar(1));
  Vec unit(d, Scalar(0));
  unit[0] = Scalar(1);
  return FinAlgebra::make(dvr, labels, mult, unit);
}

AlgebraPtr truncated_algebra(const Dvr& dvr, int n) {
  if (n < 1) fail(ErrKind::validation, "truncation order must be positive");
  std::vector<std::string> labels;
  for (int i = 0; i < n; ++i)
    labels.push_back(i == 0 ? "1" : (i == 1 ? "x" : "x^" + std::to_string(i)));
  std::vector<Mat> mult(n, Mat(n, n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j + i < n; ++j) mult[i].set(i + j, j, Scalar(1));
  Vec unit(n, Scalar(0));
  unit[0] = Scalar(1);
  return FinAlgebra::make(dvr, labels, mult, unit);
}

AlgebraPtr tensor_algebra(const AlgebraPtr& a, const AlgebraPtr& b) {
  const Dvr& dvr = a->dvr();
  if (!(dvr == b->dvr())) fail(ErrKind::validation, "tensor factors over different base rings");
  const int da = a->dim(), db = b->dim();
  const int d = da * db;
  std::vector<std::string> labels(d);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < db; ++j) {
      std::string l;
      if (a->labels()[i] != "1") l += a->labels()[i];
      if (b->labels()[j] != "1") {
        if (!l.empty()) l += "*";
        l += b->labels()[j];
      }
      labels[i * db + j] = l.empty() ? "1" : l;
    }
  std::vector<Mat> mult(d, Mat(d, d));
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < db; ++j) {
      Mat& m = mult[i * db + j];
      for (int k = 0; k < da; ++k)
        for (int l = 0; l < db; ++l) {
          Vec pa = a->basis_mult(i).col(k);
          Vec pb = b->basis_mult(j).col(l);
          for (int r = 0; r < da; ++r)
            for (int s = 0; s < db; ++s) m.set(r * db + s, k * db + l, pa[r] * pb[s]);
        }
    }
  Vec unit(d, Scalar(0));
  for (int r = 0; r < da; ++r)
    for (int s = 0; s < db; ++s) unit[r * db + s] = a->unit()[r] * b->unit()[s];
  return FinAlgebra::make(dvr, labels, mult, unit);
}

OPoint origin_point(const FinAlgebra& a) {
  Vec lambda(a.dim(), Scalar(0));
  lambda[0] = Scalar(1);
  return point_kernel(a, lambda);
}

OPoint coordinate_point(const FinAlgebra& a, const Vec& values) {
  if (static_cast<int>(values.size()) != a.dim() - 1)
    fail(ErrKind::validation, "need one value per non-unit basis element");
  Vec lambda(a.dim());
  lambda[0] = Scalar(1);
  for (int i = 1; i < a.dim(); ++i) lambda[i] = values[i - 1];
  return point_kernel(a, lambda);
}

}  // namespace congmod
