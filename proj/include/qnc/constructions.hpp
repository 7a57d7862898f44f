#pragma once

#include "qnc/network.hpp"

namespace qnc {

// Target rank profile for a generated basis-linear network: l1 and l2 are the
// ranks of the shift-side and phase-side error matrices, l3 the rank of their
// pairing product.  Realizable iff m1 >= l1 >= l3 >= 1, m1 >= l2 >= l3 >= 1
// and m0 >= l1 + l2 - l3.
struct RankTriple {
  int l1 = 0;
  int l2 = 0;
  int l3 = 0;
  int m0 = 0;
  int m1 = 0;
};

// Throws InvalidTriple when the profile is not realizable.
void validate(const RankTriple& t);

// Basis-linear network with m1 + 1 layers whose error matrices have exactly
// the ranks (l1, l2, l3).  The layers compose transpositions against shear
// blocks so that consecutive pullbacks telescope; when l1 < l2 the whole
// sequence is transpose-inverted, exchanging the two basis roles.
LayeredNetwork rank_triple_network(const RankTriple& t, const FieldRef& spec);

// The profile (l1, l2, l3) = (m1, m1, 1) maximizing the register cost of m1
// corruptions; requires m0 >= 2 m1 - 1.
LayeredNetwork worst_case_network(int m0, int m1, const FieldRef& spec);

// All layers identity; the cheapest reference instance.
LayeredNetwork identity_network(int m0, int m1, const FieldRef& spec);

}  // namespace qnc
