#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>
#include <vector>

#include "qnc/errors.hpp"
#include "qnc/field.hpp"
#include "qnc/linalg.hpp"
#include "qnc/symplectic.hpp"

namespace qnc {

// Dense complex operators; register 1 is the slowest-varying (most
// significant) digit of the basis index throughout.
using DenseOperator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

bool is_unitary(const DenseOperator& u, double tol = 1e-10);

inline std::size_t state_dim(const FieldRef& spec, int registers) {
  std::size_t d = 1;
  for (int i = 0; i < registers; ++i) d *= spec->q();
  return d;
}

// Mixed-radix coding between computational-basis indices and register
// digit vectors over F_q.
std::size_t encode_state_index(const FqVector& digits);
FqVector decode_state_index(const FieldRef& spec, int n, std::size_t index);

// Displacement label (s, t): X(s) Z(t) acts on n registers.
struct WeylLabel {
  FqVector s, t;
  WeylLabel(FqVector s_, FqVector t_);
  int registers() const { return static_cast<int>(s.size()); }
  const FieldRef& spec() const { return s.spec(); }
};

// W(s,t) = X(s) Z(t) with X(s)|x> = |x+s>, Z(t)|x> = w^{sum tr(x_i t_i)}|x>.
DenseOperator weyl(const WeylLabel& label);

// |y>_F = q^{-n/2} sum_x w^{sum tr(x_i y_i)} |x>.
StateVector fourier_state(const FqVector& y);
// Unitary sending |y> to |y>_F on n registers.
DenseOperator fourier_unitary(const FieldRef& spec, int n);

// Permutation unitary |x> -> |g x| for invertible g over F_q.
DenseOperator basis_linear_unitary(const FqMatrix& g);

// Places an operator acting on k registers (in the order given by
// `positions`, 0-based) into an n-register space, identity elsewhere.
DenseOperator embed_on_registers(const DenseOperator& op, const std::vector<int>& positions,
                                 int n, int q);

struct MetaplecticCertificate {
  // Conjugation phase found for each generator label, |c| = 1.
  std::vector<std::pair<WeylLabel, std::complex<double>>> generator_phases;
  // Max deviation of U W(s,t) U^dag from c W(g(s,t)) over the checked set.
  double max_deviation = 0.0;
  // True when every label in F_q^{2n} was checked, not just generators.
  bool exhaustive = false;
};

struct MetaplecticResult {
  DenseOperator u;
  MetaplecticCertificate certificate;
};

// Unitary U with U W(s,t) U^dag = c(s,t) W(g(s,t)) for symplectic g.
// Odd characteristic uses a generator decomposition (partial Fourier *
// basis-linear * quadratic phases); characteristic 2 solves the
// intertwining constraints directly.  Both are exposed for cross-checks.
MetaplecticResult metaplectic(const FqMatrix& g, const SymplecticContext& ctx);
DenseOperator metaplectic_by_decomposition(const FqMatrix& g, const SymplecticContext& ctx);
DenseOperator metaplectic_by_intertwining(const FqMatrix& g, const SymplecticContext& ctx);

// Scales u so its largest-magnitude entry (first in row-major order among
// near-ties) is real positive; keeps serialized operators reproducible.
void normalize_global_phase(DenseOperator& u);

}  // namespace qnc
