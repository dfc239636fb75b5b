// Koszul complexes on a sequence of algebra elements with coefficients in a
// finitely generated module, their homology as O-modules, the exterior
// product structure, contraction homotopies, and the criteria built from the
// top wedge of first homology.
#pragma once

#include <utility>

#include "congmod/algebra.hpp"

namespace congmod {

// K_i = M^{C(n,i)} indexed by size-i subsets of {0..n-1} in lex order;
// d(e_S x m) = sum_t (-1)^(t-1) a_{s_t} e_{S-s_t} x m.
struct KoszulComplex {
  KoszulComplex(FinModule m, Mat seq) : module(std::move(m)), sequence(std::move(seq)) {}

  FinModule module;
  Mat sequence;  // columns: elements of the algebra
  int n = 0;
  std::vector<std::vector<std::vector<int>>> subsets;  // per degree, lex order
  std::vector<Mat> diff;  // diff[i] : K_i -> K_{i-1}, valid for 1 <= i <= n
  std::vector<Mat> rel;   // relation lattice of K_i (blocks of module relations)
};

// Builds the complex and verifies d(d(x)) dies in the relations.
KoszulComplex koszul_complex(const FinModule& m, const Mat& sequence);

// Cycle and boundary lattices inside O^{r * C(n,i)} (boundaries include the
// relation blocks), and their quotient.
Mat koszul_cycles(const KoszulComplex& k, int i);
Mat koszul_boundaries(const KoszulComplex& k, int i);
FinOModule koszul_homology(const KoszulComplex& k, int i);

// Exterior product of a degree-i chain of ka (whose coefficient blocks are
// read as algebra elements, so ka must have one generator row per algebra
// basis element) with a degree-j chain of km.
Vec koszul_product(const KoszulComplex& ka, int i, const Vec& z, const KoszulComplex& km,
                   int j, const Vec& w);

// Contraction against the chosen sequence element: degree-raising maps h with
// d h + h d = a_index, verified exactly modulo the relation blocks.
std::vector<Mat> koszul_contraction(const KoszulComplex& k, int index);

// The sequence must minimally generate its ideal in the coefficient ring
// (module relations act as the defining ideal of that ring); throws
// NotMinimalGenerators naming a redundant element.
void require_minimal_sequence(const KoszulComplex& k);

// Whether the n-fold products of degree-1 cycles span the top cycles modulo
// boundaries, i.e. the top exterior power of H_1 generates H_n.
bool koszul_wedge_top(const KoszulComplex& k);
// Weaker: some n-fold product of the degree-1 cycle basis survives modulo
// boundaries (top wedge of H_1 is nonzero).
bool koszul_top_wedge_nonzero(const KoszulComplex& k);

// dim_Fp of m_R / m_R^2 for R = A/J, together with lifted minimal generators.
struct PairEmbedding {
  long edim = 0;
  Mat generators;  // columns in O^d lifting a minimal generating set of m_R
};
PairEmbedding pair_embedding(const FinAlgebra& a, const Mat& ideal_j);

// Complete-intersection test for the artinian quotient R = A/J via the top
// wedge of the first Koszul homology on minimal generators of m_R.
// Throws NotArtinian when R has infinite length.
bool wiebe_criterion(const AlgebraPtr& a, const Mat& ideal_j);

// Columns of pt.kernel that minimally generate the kernel ideal.
Mat minimal_kernel_generators(const FinAlgebra& a, const OPoint& pt);

// coker( top wedge of H_1(K(a;A)) x H_0(K(a;M)) -> H_top(K(a;M)) ) for a
// minimal generating sequence of the kernel ideal of the point; its length
// recovers the defect when the certificate hypotheses hold.
FinOModule koszul_defect_module(const FinModule& m, const OPoint& pt);

}  // namespace congmod
