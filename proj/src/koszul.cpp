#include "congmod/koszul.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace congmod {

namespace {

// size-k subsets of {0..n-1} in lexicographic order
std::vector<std::vector<int>> combinations(int n, int k) {
  std::vector<std::vector<int>> out;
  if (k < 0 || k > n) return out;
  std::vector<int> cur(k);
  for (int i = 0; i < k; ++i) cur[i] = i;
  while (true) {
    out.push_back(cur);
    int i = k - 1;
    while (i >= 0 && cur[i] == n - k + i) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

int subset_index(const std::vector<std::vector<int>>& list, const std::vector<int>& s) {
  auto it = std::lower_bound(list.begin(), list.end(), s);
  if (it == list.end() || *it != s)
    fail(ErrKind::internal_inconsistency, "subset missing from the koszul index table");
  return static_cast<int>(it - list.begin());
}

Mat blockdiag_copies(const Mat& b, int copies) {
  Mat out(b.rows() * copies, b.cols() * copies);
  for (int c = 0; c < copies; ++c)
    for (int i = 0; i < b.rows(); ++i)
      for (int j = 0; j < b.cols(); ++j) out.at(c * b.rows() + i, c * b.cols() + j) = b.at(i, j);
  return out;
}

Vec chain_block(const Vec& chain, int r, int idx) {
  Vec out(r);
  for (int t = 0; t < r; ++t) out[t] = chain[static_cast<size_t>(idx) * r + t];
  return out;
}

bool vec_is_zero(const Vec& v) {
  for (const auto& x : v)
    if (!x.is_zero()) return false;
  return true;
}

long binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long out = 1;
  for (int i = 0; i < k; ++i) out = out * (n - i) / (i + 1);
  return out;
}

// all n-fold products of the degree-1 cycle basis, as top-degree chains whose
// single block is an algebra element (the empty product is the unit)
std::vector<Vec> top_wedge_products(const KoszulComplex& k) {
  std::vector<Vec> out;
  if (k.n == 0) {
    out.push_back(k.module.algebra().unit());
    return out;
  }
  Mat z1 = koszul_cycles(k, 1);
  if (binom(z1.cols(), k.n) > 100000)
    fail(ErrKind::validation, "too many wedge products for this instance");
  for (const auto& pick : combinations(z1.cols(), k.n)) {
    Vec cur = z1.col(pick[0]);
    for (int t = 1; t < k.n; ++t) cur = koszul_product(k, t, cur, k, 1, z1.col(pick[t]));
    out.push_back(cur);
  }
  return out;
}

}  // namespace

Mat minimal_kernel_generators(const FinAlgebra& a, const OPoint& pt) {
  const Dvr& dvr = a.dvr();
  const Mat& mi = a.maximal_ideal();
  std::vector<Vec> tg;
  for (int i = 0; i < mi.cols(); ++i)
    for (int j = 0; j < pt.kernel.cols(); ++j) tg.push_back(a.mul(mi.col(i), pt.kernel.col(j)));
  auto sel = nakayama_select(dvr, pt.kernel, Mat::from_cols(tg, a.dim()), pt.kernel);
  return pt.kernel.take_cols(sel);
}

KoszulComplex koszul_complex(const FinModule& m, const Mat& sequence) {
  const FinAlgebra& a = m.algebra();
  const Dvr& dvr = a.dvr();
  const int d = a.dim();
  const int r = m.ngens();
  if (sequence.rows() != d)
    fail(ErrKind::validation, "koszul sequence columns must be algebra elements");
  const int n = sequence.cols();
  if (n > 12) fail(ErrKind::validation, "koszul sequence longer than 12 is not supported");
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < n; ++j)
      if (!dvr.in_ring(sequence.at(i, j)))
        fail(ErrKind::validation, "koszul sequence entries must lie in the base ring");

  KoszulComplex k(m, sequence);
  k.n = n;
  k.subsets.resize(n + 1);
  for (int i = 0; i <= n; ++i) k.subsets[i] = combinations(n, i);

  std::vector<Mat> act;
  act.reserve(n);
  for (int j = 0; j < n; ++j) act.push_back(m.action_of(sequence.col(j)));

  k.diff.resize(n + 1);
  for (int i = 1; i <= n; ++i) {
    const auto& src = k.subsets[i];
    const auto& dst = k.subsets[i - 1];
    Mat dm(r * static_cast<int>(dst.size()), r * static_cast<int>(src.size()));
    for (int si = 0; si < static_cast<int>(src.size()); ++si) {
      const auto& s = src[si];
      for (int t = 0; t < i; ++t) {
        std::vector<int> rest;
        for (int u = 0; u < i; ++u)
          if (u != t) rest.push_back(s[u]);
        const int ti = subset_index(dst, rest);
        const Scalar sign((t % 2 == 0) ? 1 : -1);
        const Mat& blk = act[s[t]];
        for (int x = 0; x < r; ++x)
          for (int y = 0; y < r; ++y) dm.at(ti * r + x, si * r + y) = sign * blk.at(x, y);
      }
    }
    k.diff[i] = dm;
  }

  k.rel.resize(n + 1);
  for (int i = 0; i <= n; ++i)
    k.rel[i] = blockdiag_copies(m.relations(), static_cast<int>(k.subsets[i].size()));

  for (int i = 2; i <= n; ++i) {
    Mat sq = k.diff[i - 1] * k.diff[i];
    for (int j = 0; j < sq.cols(); ++j)
      if (!lattice_contains(dvr, k.rel[i - 2], sq.col(j)))
        fail(ErrKind::internal_inconsistency, "koszul differential does not square to zero");
  }
  return k;
}

Mat koszul_cycles(const KoszulComplex& k, int i) {
  if (i < 0 || i > k.n) fail(ErrKind::validation, "koszul degree out of range");
  const Dvr& dvr = k.module.algebra().dvr();
  if (i == 0) return lattice_basis(dvr, Mat::identity(k.module.ngens()));
  return preimage_lattice(dvr, k.diff[i], k.rel[i - 1]);
}

Mat koszul_boundaries(const KoszulComplex& k, int i) {
  if (i < 0 || i > k.n) fail(ErrKind::validation, "koszul degree out of range");
  const Dvr& dvr = k.module.algebra().dvr();
  if (i == k.n) return lattice_basis(dvr, k.rel[i]);
  return lattice_basis(dvr, Mat::hstack(k.diff[i + 1], k.rel[i]));
}

FinOModule koszul_homology(const KoszulComplex& k, int i) {
  const Dvr& dvr = k.module.algebra().dvr();
  Mat z = koszul_cycles(k, i);
  Mat b = (i == k.n) ? k.rel[i] : Mat::hstack(k.diff[i + 1], k.rel[i]);
  return quotient_presentation(dvr, z, b);
}

Vec koszul_product(const KoszulComplex& ka, int i, const Vec& z, const KoszulComplex& km,
                   int j, const Vec& w) {
  const FinAlgebra& alg = km.module.algebra();
  const int d = alg.dim();
  const int r = km.module.ngens();
  if (&ka.module.algebra() != &alg)
    fail(ErrKind::validation, "koszul product factors live over different algebras");
  if (ka.n != km.n || ka.sequence != km.sequence)
    fail(ErrKind::validation, "koszul product requires the same sequence on both sides");
  if (ka.module.ngens() != d)
    fail(ErrKind::validation, "left koszul factor must have algebra-element coefficients");
  if (i < 0 || j < 0 || i + j > ka.n)
    fail(ErrKind::validation, "koszul product degrees out of range");
  if (static_cast<int>(z.size()) != d * static_cast<int>(ka.subsets[i].size()) ||
      static_cast<int>(w.size()) != r * static_cast<int>(km.subsets[j].size()))
    fail(ErrKind::validation, "koszul chain has the wrong length for its degree");

  const auto& union_list = km.subsets[i + j];
  Vec out(static_cast<size_t>(r) * union_list.size(), Scalar(0));
  for (int si = 0; si < static_cast<int>(ka.subsets[i].size()); ++si) {
    Vec alpha = chain_block(z, d, si);
    if (vec_is_zero(alpha)) continue;
    Mat act = km.module.action_of(alpha);
    const auto& s = ka.subsets[i][si];
    for (int tj = 0; tj < static_cast<int>(km.subsets[j].size()); ++tj) {
      Vec blk = chain_block(w, r, tj);
      if (vec_is_zero(blk)) continue;
      const auto& t = km.subsets[j][tj];
      std::vector<int> meet;
      std::set_intersection(s.begin(), s.end(), t.begin(), t.end(), std::back_inserter(meet));
      if (!meet.empty()) continue;
      long inv = 0;
      for (int a : s)
        for (int b : t)
          if (a > b) ++inv;
      std::vector<int> uni;
      std::merge(s.begin(), s.end(), t.begin(), t.end(), std::back_inserter(uni));
      const int ui = subset_index(union_list, uni);
      const Scalar sign((inv % 2 == 0) ? 1 : -1);
      Vec term = act.apply(blk);
      for (int x = 0; x < r; ++x)
        out[static_cast<size_t>(ui) * r + x] += sign * term[x];
    }
  }
  return out;
}

std::vector<Mat> koszul_contraction(const KoszulComplex& k, int index) {
  if (index < 0 || index >= k.n) fail(ErrKind::validation, "contraction index out of range");
  const Dvr& dvr = k.module.algebra().dvr();
  const int r = k.module.ngens();
  std::vector<Mat> h(k.n);
  for (int i = 0; i < k.n; ++i) {
    const auto& src = k.subsets[i];
    const auto& dst = k.subsets[i + 1];
    Mat hm(r * static_cast<int>(dst.size()), r * static_cast<int>(src.size()));
    for (int si = 0; si < static_cast<int>(src.size()); ++si) {
      const auto& s = src[si];
      if (std::binary_search(s.begin(), s.end(), index)) continue;
      int pos = 0;
      while (pos < static_cast<int>(s.size()) && s[pos] < index) ++pos;
      std::vector<int> uni = s;
      uni.insert(uni.begin() + pos, index);
      const int ui = subset_index(dst, uni);
      const Scalar sign((pos % 2 == 0) ? 1 : -1);
      for (int t = 0; t < r; ++t) hm.at(ui * r + t, si * r + t) = sign;
    }
    h[i] = hm;
  }

  Mat act = k.module.action_of(k.sequence.col(index));
  for (int i = 0; i <= k.n; ++i) {
    const int dim = r * static_cast<int>(k.subsets[i].size());
    Mat e(dim, dim);
    if (i < k.n) e = k.diff[i + 1] * h[i];
    if (i > 0) e = e + h[i - 1] * k.diff[i];
    Mat delta = e - blockdiag_copies(act, static_cast<int>(k.subsets[i].size()));
    for (int j = 0; j < dim; ++j)
      if (!lattice_contains(dvr, k.rel[i], delta.col(j)))
        fail(ErrKind::internal_inconsistency, "contraction homotopy identity failed");
  }
  return h;
}

void require_minimal_sequence(const KoszulComplex& k) {
  const FinAlgebra& a = k.module.algebra();
  const Dvr& dvr = a.dvr();
  const int d = a.dim();
  if (k.module.ngens() != d)
    fail(ErrKind::validation,
         "sequence minimality is tested in a ring presentation of the coefficients");
  const Mat& jlat = k.module.relations();

  std::vector<Vec> gens;
  for (int j = 0; j < k.n; ++j) {
    Mat aj = a.action_matrix(k.sequence.col(j));
    for (int c = 0; c < d; ++c) gens.push_back(aj.col(c));
  }
  for (int c = 0; c < jlat.cols(); ++c) gens.push_back(jlat.col(c));
  Mat kb = lattice_basis(dvr, Mat::from_cols(gens, d));

  const Mat& mi = a.maximal_ideal();
  std::vector<Vec> tg;
  for (int i = 0; i < mi.cols(); ++i)
    for (int c = 0; c < kb.cols(); ++c) tg.push_back(a.mul(mi.col(i), kb.col(c)));
  for (int c = 0; c < jlat.cols(); ++c) tg.push_back(jlat.col(c));

  auto sel = nakayama_select(dvr, kb, Mat::from_cols(tg, d), k.sequence);
  if (static_cast<int>(sel.size()) == k.n) return;
  for (int j = 0; j < k.n; ++j) {
    if (std::find(sel.begin(), sel.end(), j) == sel.end())
      fail(ErrKind::not_minimal_generators,
           "sequence element " + std::to_string(j) + " is redundant modulo the others");
  }
  fail(ErrKind::internal_inconsistency, "nakayama selection returned out-of-range indices");
}

bool koszul_wedge_top(const KoszulComplex& k) {
  require_minimal_sequence(k);
  const Dvr& dvr = k.module.algebra().dvr();
  const int r = k.module.ngens();
  Mat ztop = koszul_cycles(k, k.n);
  std::vector<Vec> img;
  for (const auto& p : top_wedge_products(k)) {
    Mat act = k.module.action_of(p);
    for (int j = 0; j < r; ++j) img.push_back(act.col(j));
  }
  for (int c = 0; c < k.rel[k.n].cols(); ++c) img.push_back(k.rel[k.n].col(c));
  Mat w = lattice_basis(dvr, Mat::from_cols(img, r));
  return lattice_eq(dvr, w, ztop);
}

bool koszul_top_wedge_nonzero(const KoszulComplex& k) {
  require_minimal_sequence(k);
  const Dvr& dvr = k.module.algebra().dvr();
  Mat btop = koszul_boundaries(k, k.n);
  for (const auto& p : top_wedge_products(k))
    if (!lattice_contains(dvr, btop, p)) return true;
  return false;
}

PairEmbedding pair_embedding(const FinAlgebra& a, const Mat& ideal_j) {
  const Dvr& dvr = a.dvr();
  const int d = a.dim();
  if (ideal_j.rows() != d) fail(ErrKind::validation, "ideal columns must have algebra dimension");
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < ideal_j.cols(); ++j)
      if (!dvr.in_ring(ideal_j.at(i, j)))
        fail(ErrKind::validation, "ideal entries must lie in the base ring");
  Mat jlat = lattice_basis(dvr, ideal_j);
  for (int c = 0; c < jlat.cols(); ++c)
    for (int i = 0; i < d; ++i) {
      Vec e(d, Scalar(0));
      e[i] = Scalar(1);
      if (!lattice_contains(dvr, jlat, a.mul(e, jlat.col(c))))
        fail(ErrKind::validation, "the given lattice is not an ideal");
    }
  if (!lattice_contains_all(dvr, a.maximal_ideal(), jlat))
    fail(ErrKind::validation, "the ideal is the unit ideal");

  const Mat& mi = a.maximal_ideal();
  std::vector<Vec> tg;
  for (int i = 0; i < mi.cols(); ++i)
    for (int j = 0; j < mi.cols(); ++j) tg.push_back(a.mul(mi.col(i), mi.col(j)));
  for (int c = 0; c < jlat.cols(); ++c) tg.push_back(jlat.col(c));

  auto sel = nakayama_select(dvr, mi, Mat::from_cols(tg, d), mi);
  PairEmbedding out;
  out.edim = static_cast<long>(sel.size());
  out.generators = mi.take_cols(sel);
  return out;
}

bool wiebe_criterion(const AlgebraPtr& a, const Mat& ideal_j) {
  FinModule rmod = FinModule::quotient_ring(a, ideal_j);
  if (rmod.is_zero()) fail(ErrKind::validation, "the quotient ring is zero");
  if (!rmod.underlying().length())
    fail(ErrKind::not_artinian, "the quotient ring has infinite length over the base ring");
  PairEmbedding pe = pair_embedding(*a, ideal_j);
  KoszulComplex k = koszul_complex(rmod, pe.generators);
  return koszul_top_wedge_nonzero(k);
}

FinOModule koszul_defect_module(const FinModule& m, const OPoint& pt) {
  const FinAlgebra& a = m.algebra();
  const Dvr& dvr = a.dvr();
  const int r = m.ngens();
  Mat seq = minimal_kernel_generators(a, pt);
  const int n = seq.cols();
  if (binom(n, n / 2) * static_cast<long>(r) > 4000)
    fail(ErrKind::validation, "koszul defect module instance too large");
  KoszulComplex ka = koszul_complex(FinModule::regular(m.algebra_ptr()), seq);
  KoszulComplex km = koszul_complex(m, seq);

  Mat ztop = koszul_cycles(km, n);
  std::vector<Vec> img;
  for (const auto& p : top_wedge_products(ka)) {
    Mat act = m.action_of(p);
    for (int j = 0; j < r; ++j) img.push_back(act.col(j));
  }
  for (int c = 0; c < km.rel[n].cols(); ++c) img.push_back(km.rel[n].col(c));
  return quotient_presentation(dvr, ztop, Mat::from_cols(img, r));
}

}  // namespace congmod
