#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "qnc/linalg.hpp"

namespace qnc {

// Ambient phase space F_q^{2m0}: coordinates 1..m0 are shift components,
// coordinates m0+1..2m0 are phase components.
struct SymplecticContext {
  FieldRef spec;
  int m0 = 0;

  // The block matrix [[0, -I], [I, 0]].
  FqMatrix J() const;
};

// u^T J v evaluated over F_q.  Bilinear and alternating.
FieldElement fq_form(const FqVector& u, const FqVector& v, const SymplecticContext& ctx);

// Trace of fq_form, an element of F_p.  This is the pairing that controls
// Weyl operator commutation phases.
int fp_pairing(const FqVector& u, const FqVector& v, const SymplecticContext& ctx);

// True iff g^T J g = J over F_q.
bool is_symplectic(const FqMatrix& g, const SymplecticContext& ctx);

// Hyperbolic basis of span(vectors): pairs (w_i, w_i') inside the span with
// fq_form(w_i', w_j) = delta_ij (the value 1 of F_q) and
// fq_form(w_i, w_j) = fq_form(w_i', w_j') = 0.  Requires the restricted
// form to be nondegenerate; throws DegenerateForm otherwise.
std::pair<std::vector<FqVector>, std::vector<FqVector>> lc1_diagonalize(
    const std::vector<FqVector>& vectors, const SymplecticContext& ctx);

// Full hyperbolic basis adapted to an error space V = span(V_basis):
//   w_1..w_m0 and w_1'..w_m0' with the complete pairwise form table, laid
//   out as three index blocks:
//     1 .. m0-m**                  message pairs, orthogonal to V
//     m0-m**+1 .. m0-m**+m*        pairs spanning the nondegenerate part of V
//     m0-m**+m*+1 .. m0            w_i from the radical of V; partners from
//                                  the complement
//   V itself lies inside span{w_i, w_i' : i > m0-m**}, so every error
//   direction touches only the last m** register pairs.
struct WBasis {
  std::vector<FqVector> w;
  std::vector<FqVector> w_prime;
  int m_star = 0;
  int m_star_star = 0;
};

WBasis build_w_basis(const std::vector<FqVector>& V_basis, const SymplecticContext& ctx);

// m* = rank(P_V^T J P_V)/2 and m** = dim V - m*.  Checks m* >= 1 and
// m** >= m*, and m** <= 2*m1 - 1 when m1 is supplied.
std::pair<int, int> compute_invariants(const std::vector<FqVector>& V_basis,
                                       const SymplecticContext& ctx,
                                       std::optional<int> m1 = std::nullopt);

}  // namespace qnc
