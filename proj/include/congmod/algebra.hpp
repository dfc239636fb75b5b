// Finite flat local O-algebras given by structure constants, augmentation
// points, finitely generated modules, and the congruence-module calculus
// attached to a point of the generic fiber.
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "congmod/matrix.hpp"

namespace congmod {

class FinAlgebra;
using AlgebraPtr = std::shared_ptr<const FinAlgebra>;

// A = O^d with commutative associative unital multiplication, local with
// residue field F_p. Construction validates all of that and throws
// NotAssociative / NotLocal / validation errors otherwise.
class FinAlgebra {
 public:
  // mult[i] is the matrix of multiplication by basis element i; column j of
  // mult[i] holds the coordinates of b_i * b_j.
  FinAlgebra(Dvr dvr, std::vector<std::string> labels, std::vector<Mat> mult, Vec unit);

  static AlgebraPtr make(Dvr dvr, std::vector<std::string> labels, std::vector<Mat> mult,
                         Vec unit);

  const Dvr& dvr() const { return dvr_; }
  int dim() const { return static_cast<int>(mult_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  const Vec& unit() const { return unit_; }
  const Mat& basis_mult(int i) const { return mult_[i]; }

  Vec mul(const Vec& a, const Vec& b) const;
  Vec power(const Vec& a, long e) const;
  // Matrix of multiplication by a.
  Mat action_matrix(const Vec& a) const;

  // Canonical basis of the maximal ideal m_A = p*O^d + (nilradical lift).
  const Mat& maximal_ideal() const { return max_ideal_; }
  // dim_Fp m_A / m_A^2
  long edim() const;
  std::string describe(const Vec& a) const;

 private:
  void validate() const;
  void compute_maximal_ideal();

  Dvr dvr_;
  std::vector<std::string> labels_;
  std::vector<Mat> mult_;
  Vec unit_;
  Mat max_ideal_;
};

// O-algebra map lambda: A -> O together with the lattice of its kernel.
struct OPoint {
  Vec lambda;
  Mat kernel;  // canonical basis, d x (d-1)
};

// Validates multiplicativity and unitality; throws NotAlgebraMap with the
// offending basis pair in the message.
OPoint point_kernel(const FinAlgebra& a, const Vec& lambda);
Scalar point_eval(const Vec& lambda, const Vec& a);

// Finitely generated A-module, presented as O^r / (relation lattice) with an
// A-action through r x r matrices for each algebra basis element.
class FinModule {
 public:
  FinModule(AlgebraPtr alg, int ngens, Mat relations, std::vector<Mat> action);

  static FinModule regular(AlgebraPtr alg);
  // A / J for an ideal lattice J (columns in O^d).
  static FinModule quotient_ring(AlgebraPtr alg, const Mat& ideal);
  // A^g modulo the A-span of the given columns of length g*d (g blocks of
  // algebra elements).
  static FinModule algebra_presentation(AlgebraPtr alg, int g, const Mat& rel_cols);
  static FinModule direct_sum(const FinModule& m, const FinModule& n);

  const FinAlgebra& algebra() const { return *alg_; }
  const AlgebraPtr& algebra_ptr() const { return alg_; }
  int ngens() const { return ngens_; }
  const Mat& relations() const { return rel_; }
  const Mat& basis_action(int i) const { return action_[i]; }
  Mat action_of(const Vec& a) const;  // r x r matrix of the action of a in A

  // O^r / relations as an abstract O-module.
  FinOModule underlying() const;
  bool is_zero() const;

 private:
  AlgebraPtr alg_;
  int ngens_;
  Mat rel_;
  std::vector<Mat> action_;
};

// Lattice {v : g v in relations for every column g of elements}, i.e. the
// elements of M killed by the ideal generated by the given algebra elements.
Mat annihilator_lattice(const FinModule& m, const Mat& elements);
// Lattice spanned by (elements)*M together with the relations.
Mat submodule_lattice(const FinModule& m, const Mat& elements);

// Ann_A(p_lambda) as a lattice in O^d.
Mat point_annihilator_ideal(const FinAlgebra& a, const OPoint& pt);

// Psi(M) = M / (M[p_lambda] + M[Ann(p_lambda)]) as an O-module.
FinOModule congruence_module_c0(const FinModule& m, const OPoint& pt);

// p_lambda / p_lambda^2 as an O-module.
FinOModule cotangent(const FinAlgebra& a, const OPoint& pt);

struct RankAtPoint {
  long mu = 0;                 // minimal generators of the localized module
  long dim_local_algebra = 0;  // dim_E of the local factor of A_E at lambda
  long dim_local_module = 0;   // dim_E of the localized module
  bool supported = false;
  bool free_at_point = false;
};
RankAtPoint rank_at_point(const FinModule& m, const OPoint& pt);

bool is_regular_c0(const FinAlgebra& a, const OPoint& pt);
// True when the underlying O-module of M is torsion free.
bool depth_ge1(const FinModule& m);

struct EtaResult {
  FinOModule coker;                    // coker of M[p] -> torsion-free part of M/pM
  std::optional<long> coker_length;    // nullopt when infinite
};
EtaResult eta_c0(const FinModule& m, const OPoint& pt);

struct KappaResult {
  FinOModule coker;  // coker of I*M -> torsion-free part of M[p], I = Ann(p)
  std::optional<long> length;
};
KappaResult kappa_c0(const FinModule& m, const OPoint& pt);

struct CrossCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Certificate {
  long mu = 0;
  bool supported = false;
  bool free_at_point = false;
  bool regular = false;
  bool depth_ok = false;
  bool applicable = false;  // all hypotheses hold and delta is defined
  long length_cotangent = 0;
  long length_psi = 0;
  long delta = 0;
  bool complete_intersection = false;  // delta == 0 verdict for M = A
  bool free_summand = false;           // mu copies of A split off M
  std::vector<CrossCheck> checks;
};

// Strict versions: throw NotRegularPoint / NotSupported / ZeroDepth /
// NonFiniteCongruenceModule when the hypotheses fail.
Certificate wiles_defect_c0(const FinModule& m, const OPoint& pt);
Certificate certify_c0(const FinModule& m, const OPoint& pt);
// Permissive version used by the reporting layer: hypothesis failures are
// recorded in the certificate instead of thrown.
Certificate certificate_c0(const FinModule& m, const OPoint& pt, bool strict);

// Fitt_0^A(p_lambda) is contained in Ann_A(p_lambda); recomputed from a
// minimal presentation of the kernel ideal. InternalInconsistency on failure.
void fitting_inclusion_check(const FinAlgebra& a, const OPoint& pt);

// Indices of a minimal generating subset of candidate columns for the
// quotient K / T where T contains p*K; computed in K-coordinates.
std::vector<int> nakayama_select(const Dvr& dvr, const Mat& kbasis, const Mat& tgens,
                                 const Mat& candidates);

}  // namespace congmod
