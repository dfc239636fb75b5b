// Stock families of finite flat local O-algebras used by the test corpus,
// the bundled catalog, and the randomized searches.
#pragma once

#include <cstdint>

#include "congmod/algebra.hpp"

namespace congmod {

// O itself.
AlgebraPtr trivial_algebra(const Dvr& dvr);

// O[x]/(x^2 - p^m x), basis {1, x}.
AlgebraPtr hypersurface_algebra(const Dvr& dvr, long m);

// O[x_1..x_k]/(x_i^2 - p^{m_i} x_i, x_i x_j), basis {1, x_1, ..., x_k}.
// The spectrum is k+1 copies of Spec O glued along the origin branch.
AlgebraPtr branches_algebra(const Dvr& dvr, const std::vector<long>& ms);

// O[x_1..x_n]/(all products x_i x_j), basis {1, x_1, ..., x_n}.
AlgebraPtr square_zero_algebra(const Dvr& dvr, int n);

// A tensor B over O, basis b_i ⊗ c_j in row-major order.
AlgebraPtr tensor_algebra(const AlgebraPtr& a, const AlgebraPtr& b);

// Truncated polynomial ring O[x]/(x^n), basis {1, x, ..., x^{n-1}}.
AlgebraPtr truncated_algebra(const Dvr& dvr, int n);

// The point with lambda(x_i) = values[i] on any of the families above where
// the basis is {1, generators...}.
OPoint origin_point(const FinAlgebra& a);
OPoint coordinate_point(const FinAlgebra& a, const Vec& values);

}  // namespace congmod
