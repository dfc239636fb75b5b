// Brute-force oracles for differential testing.  These deliberately use the
// slowest, most direct definitions (minor expansions, full enumerations) so
// the optimized implementations have something independent to agree with.
#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "congmod/dvr.hpp"
#include "congmod/matrix.hpp"

namespace congmod::oracle {

inline Scalar minor_det(const Mat& a, const std::vector<int>& r, const std::vector<int>& c) {
  size_t k = r.size();
  if (k == 0) return Scalar(1);
  Scalar det(0);
  std::vector<int> sub(c.begin() + 1, c.end());
  for (size_t i = 0; i < k; ++i) {
    std::vector<int> rs;
    for (size_t j = 0; j < k; ++j)
      if (j != i) rs.push_back(r[j]);
    Scalar cof = a.at(r[i], c[0]) * minor_det(a, rs, sub);
    det = (i % 2 == 0) ? det + cof : det - cof;
  }
  return det;
}

inline void subsets(int n, int k, std::vector<std::vector<int>>& out) {
  std::vector<int> cur;
  std::vector<int> stack;
  // iterative lexicographic enumeration
  std::vector<int> s(k);
  for (int i = 0; i < k; ++i) s[i] = i;
  if (k > n) return;
  while (true) {
    out.push_back(s);
    int i = k - 1;
    while (i >= 0 && s[i] == n - k + i) --i;
    if (i < 0) break;
    ++s[i];
    for (int j = i + 1; j < k; ++j) s[j] = s[j - 1] + 1;
  }
}

// gcd-valuation of all k x k minors; nullopt when all minors vanish
inline std::optional<long> minor_gcd_valuation(const Dvr& dvr, const Mat& a, int k) {
  if (k == 0) return 0;
  if (k > a.rows() || k > a.cols()) return std::nullopt;
  std::vector<std::vector<int>> rs, cs;
  subsets(a.rows(), k, rs);
  subsets(a.cols(), k, cs);
  std::optional<long> best;
  for (const auto& r : rs)
    for (const auto& c : cs) {
      Scalar d = minor_det(a, r, c);
      if (d.is_zero()) continue;
      long v = *dvr.valuation(d);
      if (!best || v < *best) best = v;
    }
  return best;
}

// Elementary divisor valuations straight from the definition d_k = v(gcd of
// k-minors) - v(gcd of (k-1)-minors).
inline std::vector<long> divisors_by_minors(const Dvr& dvr, const Mat& a) {
  std::vector<long> out;
  long prev = 0;
  for (int k = 1; k <= std::min(a.rows(), a.cols()); ++k) {
    auto g = minor_gcd_valuation(dvr, a, k);
    if (!g) break;
    out.push_back(*g - prev);
    prev = *g;
  }
  return out;
}

// Fitting ideal of coker(a) with g generators, from the raw minor definition.
inline std::optional<long> fitting_by_minors(const Dvr& dvr, const Mat& a, int g, int i) {
  int k = g - i;
  if (k <= 0) return 0;
  return minor_gcd_valuation(dvr, a, k);
}

}  // namespace congmod::oracle
