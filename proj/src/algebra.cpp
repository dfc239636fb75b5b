#include "congmod/algebra.hpp"

#include <algorithm>
#include <sstream>

#include "congmod/fp.hpp"

namespace congmod {

namespace {

Vec vec_add(const Vec& a, const Vec& b) {
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Vec vec_scale(const Scalar& c, const Vec& a) {
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = c * a[i];
  return out;
}

Mat blockdiag_repeat(const Mat& a, int copies) {
  Mat out(a.rows() * copies, a.cols() * copies);
  for (int b = 0; b < copies; ++b)
    for (int i = 0; i < a.rows(); ++i)
      for (int j = 0; j < a.cols(); ++j) out.set(b * a.rows() + i, b * a.cols() + j, a.at(i, j));
  return out;
}

// Multiplication tables of the closed fiber A/pA, entries in [0,p).
struct FpAlgebra {
  mpz_class p;
  int d;
  std::vector<std::vector<FpVec>> table;  // table[i][j] = b_i * b_j mod p

  FpVec mul(const FpVec& u, const FpVec& v) const {
    FpVec out(d, 0);
    for (int i = 0; i < d; ++i) {
      if (u[i] == 0) continue;
      for (int j = 0; j < d; ++j) {
        if (v[j] == 0) continue;
        mpz_class c = (u[i] * v[j]) % p;
        for (int k = 0; k < d; ++k) out[k] = (out[k] + c * table[i][j][k]) % p;
      }
    }
    return out;
  }

  FpVec pow(FpVec base, const mpz_class& e, const FpVec& one) const {
    FpVec acc = one;
    mpz_class n = e;
    while (n > 0) {
      if (mpz_odd_p(n.get_mpz_t())) acc = mul(acc, base);
      base = mul(base, base);
      n >>= 1;
    }
    return acc;
  }
};

FpAlgebra closed_fiber(const Dvr& dvr, const std::vector<Mat>& mult) {
  FpAlgebra fp;
  fp.p = dvr.prime();
  fp.d = static_cast<int>(mult.size());
  fp.table.resize(fp.d);
  for (int i = 0; i < fp.d; ++i) {
    fp.table[i].resize(fp.d);
    for (int j = 0; j < fp.d; ++j) fp.table[i][j] = fp_col(dvr, mult[i], j);
  }
  return fp;
}

std::string fp_vec_str(const FpVec& v, const std::vector<std::string>& labels) {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0) continue;
    if (!first) os << " + ";
    os << v[i].get_str() << "*" << labels[i];
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

}  // namespace

FinAlgebra::FinAlgebra(Dvr dvr, std::vector<std::string> labels, std::vector<Mat> mult, Vec unit)
    : dvr_(std::move(dvr)),
      labels_(std::move(labels)),
      mult_(std::move(mult)),
      unit_(std::move(unit)),
      max_ideal_(0, 0) {
  validate();
  compute_maximal_ideal();
}

AlgebraPtr FinAlgebra::make(Dvr dvr, std::vector<std::string> labels, std::vector<Mat> mult,
                            Vec unit) {
  return std::make_shared<const FinAlgebra>(std::move(dvr), std::move(labels), std::move(mult),
                                            std::move(unit));
}

Vec FinAlgebra::mul(const Vec& a, const Vec& b) const {
  const int d = dim();
  Vec out(d, Scalar(0));
  for (int i = 0; i < d; ++i) {
    if (a[i].is_zero()) continue;
    Vec part = vec_scale(a[i], mult_[i].apply(b));
    out = vec_add(out, part);
  }
  return out;
}

Vec FinAlgebra::power(const Vec& a, long e) const {
  if (e < 0) fail(ErrKind::validation, "negative power of an algebra element");
  Vec acc = unit_;
  Vec base = a;
  long n = e;
  while (n > 0) {
    if (n & 1) acc = mul(acc, base);
    base = mul(base, base);
    n >>= 1;
  }
  return acc;
}

Mat FinAlgebra::action_matrix(const Vec& a) const {
  const int d = dim();
  Mat out(d, d);
  for (int i = 0; i < d; ++i) {
    if (a[i].is_zero()) continue;
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) out.set(r, c, out.at(r, c) + a[i] * mult_[i].at(r, c));
  }
  return out;
}

std::string FinAlgebra::describe(const Vec& a) const {
  std::ostringstream os;
  bool first = true;
  for (int i = 0; i < dim(); ++i) {
    if (a[i].is_zero()) continue;
    if (!first) os << " + ";
    os << a[i].str() << "*" << labels_[i];
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

void FinAlgebra::validate() const {
  const int d = dim();
  if (d == 0) fail(ErrKind::validation, "algebra has no basis");
  if (static_cast<int>(labels_.size()) != d || static_cast<int>(unit_.size()) != d)
    fail(ErrKind::validation, "labels or unit vector do not match the basis size");
  for (int i = 0; i < d; ++i)
    if (mult_[i].rows() != d || mult_[i].cols() != d)
      fail(ErrKind::validation, "multiplication matrix has wrong shape");
  for (int i = 0; i < d; ++i)
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c)
        if (!dvr_.in_ring(mult_[i].at(r, c)))
          fail(ErrKind::validation, "structure constant outside the base ring: " +
                                        mult_[i].at(r, c).str());
  for (const auto& s : unit_)
    if (!dvr_.in_ring(s)) fail(ErrKind::validation, "unit coordinate outside the base ring");

  // commutativity: b_i b_j = b_j b_i
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      if (!(mult_[i].col(j) == mult_[j].col(i)))
        fail(ErrKind::validation,
             "multiplication not commutative on basis pair (" + labels_[i] + ", " + labels_[j] +
                 ")");

  if (!(action_matrix(unit_) == Mat::identity(d)))
    fail(ErrKind::validation, "designated unit does not act as identity");

  // associativity: multiplication by b_i b_j equals composite multiplication
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Vec prod = mult_[i].col(j);
      if (!(action_matrix(prod) == mult_[i] * mult_[j]))
        fail(ErrKind::not_associative,
             "associativity fails through basis pair (" + labels_[i] + ", " + labels_[j] + ")");
    }
}

void FinAlgebra::compute_maximal_ideal() {
  const int d = dim();
  const mpz_class p = dvr_.prime();
  FpAlgebra fp = closed_fiber(dvr_, mult_);
  FpVec one = fp_reduce_vec(dvr_, unit_);

  // Frobenius is linear on the closed fiber; iterating it past the dimension
  // isolates the nilradical as its kernel.
  std::vector<FpVec> frob(d);
  for (int i = 0; i < d; ++i) {
    FpVec e(d, 0);
    e[i] = 1;
    frob[i] = fp.pow(e, p, one);
  }
  long m = 1;
  mpz_class pm = p;
  while (pm < d) {
    pm *= p;
    ++m;
  }
  std::vector<FpVec> power_cols = frob;
  for (long step = 1; step < m; ++step) {
    std::vector<FpVec> next(d);
    for (int i = 0; i < d; ++i) {
      FpVec acc(d, 0);
      for (int k = 0; k < d; ++k) {
        if (power_cols[i][k] == 0) continue;
        for (int r = 0; r < d; ++r) acc[r] = (acc[r] + power_cols[i][k] * frob[k][r]) % p;
      }
      next[i] = acc;
    }
    power_cols = next;
  }
  std::vector<FpVec> nil = fp_kernel(p, power_cols, d);
  const int corank = d - static_cast<int>(nil.size());
  if (corank < 1)
    fail(ErrKind::internal_inconsistency, "unit element vanishes on the closed fiber");

  // insurance: the nilradical must absorb multiplication
  FpSolver span(p, d);
  for (const auto& n : nil) span.insert(n);
  for (const auto& n : nil)
    for (int i = 0; i < d; ++i) {
      FpVec e(d, 0);
      e[i] = 1;
      if (!span.reduces_to_zero(fp.mul(e, n)))
        fail(ErrKind::internal_inconsistency, "nilradical of the closed fiber is not an ideal");
    }

  if (corank > 1) {
    // try to exhibit a nontrivial idempotent on the closed fiber
    mpz_class total = 1;
    bool searchable = true;
    for (int i = 0; i < d && searchable; ++i) {
      total *= p;
      if (total > 200000) searchable = false;
    }
    if (searchable) {
      std::vector<mpz_class> idx(d, 0);
      while (true) {
        FpVec cand(d);
        bool zero = true, is_one = true;
        for (int i = 0; i < d; ++i) {
          cand[i] = idx[i];
          if (cand[i] != 0) zero = false;
          if (cand[i] != one[i]) is_one = false;
        }
        if (!zero && !is_one && fp.mul(cand, cand) == cand)
          fail(ErrKind::not_local, "algebra is not local: idempotent " +
                                       fp_vec_str(cand, labels_) +
                                       " on the closed fiber splits it");
        int pos = 0;
        while (pos < d) {
          idx[pos] += 1;
          if (idx[pos] < p) break;
          idx[pos] = 0;
          ++pos;
        }
        if (pos == d) break;
      }
    }
    fail(ErrKind::not_local,
         "algebra is not local: closed fiber has semisimple quotient of dimension " +
             std::to_string(corank) + " over F_p");
  }

  // m_A = p*O^d + lift of the nilradical
  Mat gens(d, d + static_cast<int>(nil.size()));
  for (int i = 0; i < d; ++i) gens.set(i, i, Scalar(p));
  for (std::size_t j = 0; j < nil.size(); ++j)
    for (int i = 0; i < d; ++i) gens.set(i, d + static_cast<int>(j), Scalar(nil[j][i]));
  max_ideal_ = lattice_basis(dvr_, gens);
}

long FinAlgebra::edim() const {
  // m_A / m_A^2, computed in coordinates of the maximal ideal
  const int s = max_ideal_.cols();
  std::vector<Vec> sq;
  for (int i = 0; i < s; ++i)
    for (int j = i; j < s; ++j) sq.push_back(mul(max_ideal_.col(i), max_ideal_.col(j)));
  Mat t = Mat::from_cols(sq, dim());
  std::vector<int> sel = nakayama_select(dvr_, max_ideal_, t, max_ideal_);
  return static_cast<long>(sel.size());
}

Scalar point_eval(const Vec& lambda, const Vec& a) {
  Scalar out(0);
  for (std::size_t i = 0; i < a.size(); ++i) out += lambda[i] * a[i];
  return out;
}

OPoint point_kernel(const FinAlgebra& a, const Vec& lambda) {
  const int d = a.dim();
  if (static_cast<int>(lambda.size()) != d)
    fail(ErrKind::not_algebra_map, "point has wrong number of coordinates");
  for (const auto& s : lambda)
    if (!a.dvr().in_ring(s))
      fail(ErrKind::not_algebra_map, "point coordinate outside the base ring: " + s.str());
  if (!(point_eval(lambda, a.unit()) == Scalar(1)))
    fail(ErrKind::not_algebra_map, "point does not send the unit to 1");
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      Scalar lhs = point_eval(lambda, a.basis_mult(i).col(j));
      Scalar rhs = lambda[i] * lambda[j];
      if (!(lhs == rhs))
        fail(ErrKind::not_algebra_map,
             "point is not multiplicative on (" + a.labels()[i] + ", " + a.labels()[j] +
                 "): got " + lhs.str() + ", expected " + rhs.str());
    }
  Mat row(1, d);
  for (int j = 0; j < d; ++j) row.set(0, j, lambda[j]);
  OPoint pt;
  pt.lambda = lambda;
  pt.kernel = kernel_O(a.dvr(), row);
  return pt;
}

FinModule::FinModule(AlgebraPtr alg, int ngens, Mat relations, std::vector<Mat> action)
    : alg_(std::move(alg)), ngens_(ngens), rel_(0, 0), action_(std::move(action)) {
  const Dvr& dvr = alg_->dvr();
  const int d = alg_->dim();
  if (ngens_ <= 0) fail(ErrKind::validation, "module needs at least one generator");
  if (relations.rows() != ngens_ && relations.cols() == 0) relations = Mat(ngens_, 0);
  if (relations.rows() != ngens_)
    fail(ErrKind::validation, "relation columns do not match the generator count");
  if (static_cast<int>(action_.size()) != d)
    fail(ErrKind::validation, "need one action matrix per algebra basis element");
  for (const auto& m : action_) {
    if (m.rows() != ngens_ || m.cols() != ngens_)
      fail(ErrKind::validation, "action matrix has wrong shape");
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j)
        if (!dvr.in_ring(m.at(i, j)))
          fail(ErrKind::validation, "action entry outside the base ring");
  }
  for (int i = 0; i < relations.rows(); ++i)
    for (int j = 0; j < relations.cols(); ++j)
      if (!dvr.in_ring(relations.at(i, j)))
        fail(ErrKind::validation, "relation entry outside the base ring");
  rel_ = lattice_basis(dvr, relations);

  // relations must be stable under the action
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < rel_.cols(); ++j)
      if (!lattice_contains(dvr, rel_, action_[i].apply(rel_.col(j))))
        fail(ErrKind::validation,
             "action of " + alg_->labels()[i] + " does not preserve the relations");

  // the unit acts as the identity modulo relations
  Mat u = action_of(alg_->unit());
  for (int j = 0; j < ngens_; ++j) {
    Vec diff = u.col(j);
    diff[j] -= Scalar(1);
    if (!lattice_contains(dvr, rel_, diff))
      fail(ErrKind::validation, "unit does not act as identity on the module");
  }

  // compatibility with the multiplication, modulo relations
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Mat lhs = action_[i] * action_[j];
      Mat rhs = action_of(alg_->basis_mult(i).col(j));
      for (int c = 0; c < ngens_; ++c) {
        Vec diff(ngens_);
        for (int r = 0; r < ngens_; ++r) diff[r] = lhs.at(r, c) - rhs.at(r, c);
        if (!lattice_contains(dvr, rel_, diff))
          fail(ErrKind::validation, "action is not compatible with the multiplication on (" +
                                        alg_->labels()[i] + ", " + alg_->labels()[j] + ")");
      }
    }
}

FinModule FinModule::regular(AlgebraPtr alg) {
  const int d = alg->dim();
  std::vector<Mat> act;
  for (int i = 0; i < d; ++i) act.push_back(alg->basis_mult(i));
  return FinModule(alg, d, Mat(d, 0), std::move(act));
}

FinModule FinModule::quotient_ring(AlgebraPtr alg, const Mat& ideal) {
  const int d = alg->dim();
  std::vector<Mat> act;
  for (int i = 0; i < d; ++i) act.push_back(alg->basis_mult(i));
  return FinModule(alg, d, lattice_basis(alg->dvr(), ideal), std::move(act));
}

FinModule FinModule::algebra_presentation(AlgebraPtr alg, int g, const Mat& rel_cols) {
  const int d = alg->dim();
  if (g <= 0) fail(ErrKind::validation, "presentation needs at least one generator");
  if (rel_cols.cols() > 0 && rel_cols.rows() != g * d)
    fail(ErrKind::validation, "presentation column length must be (generators) x (algebra rank)");
  std::vector<Vec> lattice_cols;
  for (int c = 0; c < rel_cols.cols(); ++c) {
    for (int j = 0; j < d; ++j) {
      Vec w(g * d, Scalar(0));
      for (int b = 0; b < g; ++b) {
        Vec block(d);
        for (int i = 0; i < d; ++i) block[i] = rel_cols.at(b * d + i, c);
        Vec prod = alg->basis_mult(j).apply(block);
        for (int i = 0; i < d; ++i) w[b * d + i] = prod[i];
      }
      lattice_cols.push_back(w);
    }
  }
  Mat lat = Mat::from_cols(lattice_cols, g * d);
  std::vector<Mat> act;
  for (int i = 0; i < d; ++i) act.push_back(blockdiag_repeat(alg->basis_mult(i), g));
  return FinModule(alg, g * d, lat, std::move(act));
}

FinModule FinModule::direct_sum(const FinModule& m, const FinModule& n) {
  if (m.alg_.get() != n.alg_.get())
    fail(ErrKind::validation, "direct sum requires modules over the same algebra");
  const int r = m.ngens_, s = n.ngens_;
  Mat rel(r + s, m.rel_.cols() + n.rel_.cols());
  for (int j = 0; j < m.rel_.cols(); ++j)
    for (int i = 0; i < r; ++i) rel.set(i, j, m.rel_.at(i, j));
  for (int j = 0; j < n.rel_.cols(); ++j)
    for (int i = 0; i < s; ++i) rel.set(r + i, m.rel_.cols() + j, n.rel_.at(i, j));
  std::vector<Mat> act;
  for (int k = 0; k < m.algebra().dim(); ++k) {
    Mat a(r + s, r + s);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) a.set(i, j, m.action_[k].at(i, j));
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) a.set(r + i, r + j, n.action_[k].at(i, j));
    act.push_back(a);
  }
  return FinModule(m.alg_, r + s, rel, std::move(act));
}

Mat FinModule::action_of(const Vec& a) const {
  Mat out(ngens_, ngens_);
  for (int i = 0; i < algebra().dim(); ++i) {
    if (a[i].is_zero()) continue;
    for (int r = 0; r < ngens_; ++r)
      for (int c = 0; c < ngens_; ++c) out.set(r, c, out.at(r, c) + a[i] * action_[i].at(r, c));
  }
  return out;
}

FinOModule FinModule::underlying() const { return FinOModule(alg_->dvr(), ngens_, rel_); }

bool FinModule::is_zero() const { return underlying().is_zero_module(); }

Mat annihilator_lattice(const FinModule& m, const Mat& elements) {
  const Dvr& dvr = m.algebra().dvr();
  const int r = m.ngens();
  const int s = elements.cols();
  if (s == 0) return lattice_basis(dvr, Mat::identity(r));
  Mat stacked(r * s, r);
  for (int k = 0; k < s; ++k) {
    Mat a = m.action_of(elements.col(k));
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) stacked.set(k * r + i, j, a.at(i, j));
  }
  const Mat& rel = m.relations();
  Mat target(r * s, rel.cols() * s);
  for (int k = 0; k < s; ++k)
    for (int j = 0; j < rel.cols(); ++j)
      for (int i = 0; i < r; ++i) target.set(k * r + i, k * rel.cols() + j, rel.at(i, j));
  return preimage_lattice(dvr, stacked, target);
}

Mat submodule_lattice(const FinModule& m, const Mat& elements) {
  const Dvr& dvr = m.algebra().dvr();
  const int r = m.ngens();
  std::vector<Vec> cols;
  for (int k = 0; k < elements.cols(); ++k) {
    Mat a = m.action_of(elements.col(k));
    for (int j = 0; j < r; ++j) cols.push_back(a.col(j));
  }
  for (int j = 0; j < m.relations().cols(); ++j) cols.push_back(m.relations().col(j));
  return lattice_basis(dvr, Mat::from_cols(cols, r));
}

Mat point_annihilator_ideal(const FinAlgebra& a, const OPoint& pt) {
  const int d = a.dim();
  const int s = pt.kernel.cols();
  if (s == 0) return lattice_basis(a.dvr(), Mat::identity(d));
  Mat stacked(d * s, d);
  for (int k = 0; k < s; ++k) {
    Mat ak = a.action_matrix(pt.kernel.col(k));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) stacked.set(k * d + i, j, ak.at(i, j));
  }
  return kernel_O(a.dvr(), stacked);
}

FinOModule congruence_module_c0(const FinModule& m, const OPoint& pt) {
  const Dvr& dvr = m.algebra().dvr();
  Mat mp = annihilator_lattice(m, pt.kernel);
  Mat ideal = point_annihilator_ideal(m.algebra(), pt);
  Mat mi = annihilator_lattice(m, ideal);
  Mat all = Mat::hstack(Mat::hstack(mp, mi), m.relations());
  return FinOModule(dvr, m.ngens(), all);
}

FinOModule cotangent(const FinAlgebra& a, const OPoint& pt) {
  const Dvr& dvr = a.dvr();
  const Mat& ker = pt.kernel;
  std::vector<Vec> prods;
  for (int i = 0; i < ker.cols(); ++i)
    for (int j = i; j < ker.cols(); ++j) prods.push_back(a.mul(ker.col(i), ker.col(j)));
  Mat sq = lattice_basis(dvr, Mat::from_cols(prods, a.dim()));
  return quotient_presentation(dvr, ker, sq);
}

namespace {

// span of the stable power of the point kernel ideal on the generic fiber
Mat stable_kernel_power(const FinAlgebra& a, const OPoint& pt) {
  const Mat& ker = pt.kernel;
  Mat cur = ker;
  int cur_rank = rank_E(cur);
  while (true) {
    std::vector<Vec> prods;
    for (int i = 0; i < ker.cols(); ++i)
      for (int j = 0; j < cur.cols(); ++j) prods.push_back(a.mul(ker.col(i), cur.col(j)));
    Mat next = Mat::from_cols(prods, a.dim());
    int next_rank = rank_E(next);
    if (next_rank == cur_rank) return cur;
    cur = next;
    cur_rank = next_rank;
  }
}

Mat module_image_cols(const FinModule& m, const Mat& elements) {
  const int r = m.ngens();
  std::vector<Vec> cols;
  for (int k = 0; k < elements.cols(); ++k) {
    Mat a = m.action_of(elements.col(k));
    for (int j = 0; j < r; ++j) cols.push_back(a.col(j));
  }
  return Mat::from_cols(cols, r);
}

}  // namespace

RankAtPoint rank_at_point(const FinModule& m, const OPoint& pt) {
  const FinAlgebra& a = m.algebra();
  const int r = m.ngens();
  Mat jinf = stable_kernel_power(a, pt);
  RankAtPoint out;
  out.dim_local_algebra = a.dim() - rank_E(jinf);
  Mat jm = module_image_cols(m, jinf);
  out.dim_local_module = r - rank_E(Mat::hstack(m.relations(), jm));
  Mat pm = module_image_cols(m, pt.kernel);
  long covol = r - rank_E(Mat::hstack(m.relations(), pm));
  out.mu = covol;
  out.supported = out.dim_local_module > 0;
  out.free_at_point = (out.dim_local_module == out.mu * out.dim_local_algebra);
  if ((out.mu > 0) != out.supported)
    fail(ErrKind::internal_inconsistency, "generator count and support disagree at the point");
  return out;
}

bool is_regular_c0(const FinAlgebra& a, const OPoint& pt) {
  Mat jinf = stable_kernel_power(a, pt);
  return a.dim() - rank_E(jinf) == 1;
}

bool depth_ge1(const FinModule& m) { return m.underlying().divisors().empty(); }

namespace {

// rows of the transform matrix projecting onto the torsion-free coordinates
// of O^r / (lattice spanned by b)
Mat torsion_free_projection(const Dvr& dvr, int r, const Mat& b) {
  SmithForm f = smith_normal_form(dvr, b);
  Mat pi(r - f.rank, r);
  for (int i = f.rank; i < r; ++i)
    for (int j = 0; j < r; ++j) pi.set(i - f.rank, j, f.U.at(i, j));
  return pi;
}

}  // namespace

EtaResult eta_c0(const FinModule& m, const OPoint& pt) {
  const Dvr& dvr = m.algebra().dvr();
  const int r = m.ngens();
  Mat s = annihilator_lattice(m, pt.kernel);
  Mat b = lattice_basis(dvr, Mat::hstack(module_image_cols(m, pt.kernel), m.relations()));
  Mat pi = torsion_free_projection(dvr, r, b);
  FinOModule coker(dvr, pi.rows(), pi * s);
  EtaResult out{coker, coker.length()};
  return out;
}

KappaResult kappa_c0(const FinModule& m, const OPoint& pt) {
  const Dvr& dvr = m.algebra().dvr();
  Mat s = annihilator_lattice(m, pt.kernel);
  Mat ideal = point_annihilator_ideal(m.algebra(), pt);
  Mat w = module_image_cols(m, ideal);

  // express relations and the image of the annihilator ideal in coordinates
  // of M[p]; both lie inside it
  auto coords_in_s = [&](const Vec& v) {
    auto c = lattice_coords(dvr, s, v);
    if (!c)
      fail(ErrKind::internal_inconsistency,
           "expected element of the point-kernel annihilator submodule");
    return *c;
  };
  const Mat& rel = m.relations();
  std::vector<Vec> relc, wc;
  for (int j = 0; j < rel.cols(); ++j) relc.push_back(coords_in_s(rel.col(j)));
  for (int j = 0; j < w.cols(); ++j) wc.push_back(coords_in_s(w.col(j)));
  Mat relm = Mat::from_cols(relc, s.cols());
  Mat wm = Mat::from_cols(wc, s.cols());

  Mat pi = torsion_free_projection(dvr, s.cols(), relm);
  FinOModule coker(dvr, pi.rows(), pi * wm);
  KappaResult out{coker, coker.length()};
  return out;
}

Certificate certificate_c0(const FinModule& m, const OPoint& pt, bool strict) {
  const Dvr& dvr = m.algebra().dvr();
  if (m.is_zero()) fail(ErrKind::validation, "module is zero");
  Certificate cert;
  RankAtPoint rk = rank_at_point(m, pt);
  cert.mu = rk.mu;
  cert.supported = rk.supported;
  cert.free_at_point = rk.free_at_point;
  cert.regular = is_regular_c0(m.algebra(), pt);
  cert.depth_ok = depth_ge1(m);

  if (strict) {
    if (!cert.regular)
      fail(ErrKind::not_regular_point, "point is not a reduced isolated point of the generic fiber");
    if (!cert.supported) fail(ErrKind::not_supported, "module vanishes at the point");
    if (!cert.depth_ok) fail(ErrKind::zero_depth, "module has nonzero torsion over the base ring");
  }
  if (!(cert.regular && cert.supported && cert.depth_ok)) {
    cert.applicable = false;
    return cert;
  }

  FinOModule cot = cotangent(m.algebra(), pt);
  FinOModule psi = congruence_module_c0(m, pt);
  auto cot_len = cot.length();
  auto psi_len = psi.length();
  if (!psi_len || !cot_len) {
    if (strict)
      fail(ErrKind::non_finite_congruence_module,
           "congruence-module data is not of finite length at this point");
    cert.applicable = false;
    return cert;
  }
  cert.length_cotangent = *cot_len;
  cert.length_psi = *psi_len;
  cert.delta = cert.mu * cert.length_cotangent - cert.length_psi;
  cert.applicable = true;
  cert.complete_intersection = (cert.delta == 0);
  cert.free_summand = (cert.delta == 0);
  return cert;
}

Certificate wiles_defect_c0(const FinModule& m, const OPoint& pt) {
  return certificate_c0(m, pt, true);
}

Certificate certify_c0(const FinModule& m, const OPoint& pt) {
  return certificate_c0(m, pt, true);
}

std::vector<int> nakayama_select(const Dvr& dvr, const Mat& kbasis, const Mat& tgens,
                                 const Mat& candidates) {
  std::vector<int> out;
  if (kbasis.cols() == 0) return out;
  FpSolver solver(dvr.prime(), kbasis.cols());
  for (int j = 0; j < tgens.cols(); ++j) {
    auto c = lattice_coords(dvr, kbasis, tgens.col(j));
    if (!c)
      fail(ErrKind::internal_inconsistency, "quotient generators escape the ambient lattice");
    solver.insert(fp_reduce_vec(dvr, *c));
  }
  for (int j = 0; j < candidates.cols(); ++j) {
    auto c = lattice_coords(dvr, kbasis, candidates.col(j));
    if (!c)
      fail(ErrKind::internal_inconsistency, "candidate generator escapes the ambient lattice");
    if (solver.insert(fp_reduce_vec(dvr, *c))) out.push_back(j);
  }
  return out;
}

namespace {

Vec algebra_det(const FinAlgebra& a, const std::vector<std::vector<Vec>>& rows,
                std::vector<int> cols) {
  const int n = static_cast<int>(cols.size());
  const int row = static_cast<int>(rows.size()) - n;
  if (n == 1) return rows[row][cols[0]];
  Vec acc(a.dim(), Scalar(0));
  for (int k = 0; k < n; ++k) {
    std::vector<int> rest;
    for (int t = 0; t < n; ++t)
      if (t != k) rest.push_back(cols[t]);
    Vec sub = algebra_det(a, rows, rest);
    Vec term = a.mul(rows[row][cols[k]], sub);
    if (k % 2 == 0)
      acc = vec_add(acc, term);
    else
      acc = vec_add(acc, vec_scale(Scalar(-1), term));
  }
  return acc;
}

}  // namespace

void fitting_inclusion_check(const FinAlgebra& a, const OPoint& pt) {
  const Dvr& dvr = a.dvr();
  const int d = a.dim();
  const int s = pt.kernel.cols();
  if (s == 0) return;  // kernel ideal is zero, nothing to check

  // relation lattice of the kernel generators as an A-module map A^s -> A
  Mat map(d, s * d);
  for (int k = 0; k < s; ++k) {
    Mat ak = a.action_matrix(pt.kernel.col(k));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) map.set(i, k * d + j, ak.at(i, j));
  }
  Mat kmod = kernel_O(dvr, map);
  if (kmod.cols() < s) return;  // too few relations for any maximal minor

  // minimal A-module generators of the relation lattice
  const Mat& mi = a.maximal_ideal();
  std::vector<Vec> tcols;
  for (int t = 0; t < mi.cols(); ++t) {
    Mat big = blockdiag_repeat(a.action_matrix(mi.col(t)), s);
    for (int j = 0; j < kmod.cols(); ++j) tcols.push_back(big.apply(kmod.col(j)));
  }
  Mat tg = Mat::from_cols(tcols, s * d);
  std::vector<int> sel = nakayama_select(dvr, kmod, tg, kmod);
  if (static_cast<int>(sel.size()) < s) return;

  std::vector<std::vector<Vec>> rows(s);
  for (int i = 0; i < s; ++i) {
    rows[i].resize(sel.size());
    for (std::size_t l = 0; l < sel.size(); ++l) {
      Vec block(d);
      for (int q = 0; q < d; ++q) block[q] = kmod.at(i * d + q, sel[l]);
      rows[i][l] = block;
    }
  }

  const int t = static_cast<int>(sel.size());
  // guard against combinatorial blowup on adversarial input
  double work = 1.0;
  for (int i = 0; i < s; ++i) work *= static_cast<double>(t - i) / (i + 1);
  if (work > 200000.0)
    fail(ErrKind::validation, "kernel ideal presentation too large for the fitting check");

  Mat ann = point_annihilator_ideal(a, pt);
  std::vector<int> choice(s);
  for (int i = 0; i < s; ++i) choice[i] = i;
  while (true) {
    Vec det = algebra_det(a, rows, choice);
    Mat gens = a.action_matrix(det);
    if (!lattice_contains_all(dvr, ann, gens))
      fail(ErrKind::internal_inconsistency,
           "fitting ideal of the kernel escapes the annihilator: minor " + a.describe(det));
    int pos = s - 1;
    while (pos >= 0 && choice[pos] == t - s + pos) --pos;
    if (pos < 0) break;
    ++choice[pos];
    for (int q = pos + 1; q < s; ++q) choice[q] = choice[q - 1] + 1;
  }
}

}  // namespace congmod
