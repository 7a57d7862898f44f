#include "qnc/constructions.hpp"

#include <utility>

#include "qnc/errors.hpp"

namespace qnc {

namespace {

// Step matrix A_i for a profile with l1 >= l2.  A_0 = I; transpositions
// realize the first l3 pullbacks, 3x3 blocks add the paired directions that
// raise both ranks, 2x2 shears raise only the shift-side rank.
FqMatrix step_matrix(const RankTriple& t, const FieldRef& spec, int i) {
  FqMatrix a = FqMatrix::identity(spec, t.m0);
  const FieldElement zero = FieldElement::zero(spec);
  const FieldElement one = FieldElement::one(spec);
  if (i <= t.l3) {
    if (i >= 2) {
      a.at(0, 0) = zero;
      a.at(i - 1, i - 1) = zero;
      a.at(0, i - 1) = one;
      a.at(i - 1, 0) = one;
    }
  } else if (i <= t.l2) {
    const int k = i - t.l3;  // 1 .. l2 - l3
    const int r1 = t.l3 + 2 * k - 2;
    const int r2 = t.l3 + 2 * k - 1;
    // Block ((1 0 1) (1 1 0) (0 0 1)) on rows/columns (0, r1, r2).
    a.at(0, r2) = one;
    a.at(r1, 0) = one;
  } else if (i <= t.l1) {
    const int k = i - t.l2;  // 1 .. l1 - l2
    a.at(2 * t.l2 - t.l3 + k - 1, 0) = one;
  }
  return a;
}

}  // namespace

void validate(const RankTriple& t) {
  const bool ok = t.m1 >= t.l1 && t.l1 >= t.l3 && t.l3 >= 1 && t.m1 >= t.l2 && t.l2 >= t.l3 &&
                  t.m0 >= t.l1 + t.l2 - t.l3;
  if (!ok) throw InvalidTriple("rank profile fails the realizability conditions");
}

LayeredNetwork rank_triple_network(const RankTriple& t, const FieldRef& spec) {
  validate(t);
  const bool swapped = t.l1 < t.l2;
  RankTriple s = t;
  if (swapped) std::swap(s.l1, s.l2);

  // gbar_{i-1} = A_i^{-1} A_{i-1}, so the pullback product
  // gbar_0^{-1} gbar_1^{-1} ... gbar_{i-1}^{-1} collapses to A_i.
  std::vector<Layer> layers;
  FqMatrix prev = FqMatrix::identity(spec, s.m0);
  for (int i = 1; i <= s.m1; ++i) {
    FqMatrix cur = step_matrix(s, spec, i);
    FqMatrix gbar = inverse(cur) * prev;
    layers.push_back(basis_linear_layer(swapped ? inverse(gbar).transpose() : gbar));
    prev = std::move(cur);
  }
  layers.push_back(basis_linear_layer(FqMatrix::identity(spec, s.m0)));
  return make_layered(spec, s.m0, std::move(layers));
}

LayeredNetwork worst_case_network(int m0, int m1, const FieldRef& spec) {
  return rank_triple_network(RankTriple{m1, m1, 1, m0, m1}, spec);
}

LayeredNetwork identity_network(int m0, int m1, const FieldRef& spec) {
  if (m1 < 0) throw DimensionError("negative interval count");
  std::vector<Layer> layers(static_cast<std::size_t>(m1) + 1,
                            basis_linear_layer(FqMatrix::identity(spec, m0)));
  return make_layered(spec, m0, std::move(layers));
}

}  // namespace qnc
