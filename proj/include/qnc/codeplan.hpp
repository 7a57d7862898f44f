#pragma once

#include <vector>

#include "qnc/network.hpp"
#include "qnc/simulate.hpp"
#include "qnc/symplectic.hpp"

namespace qnc {

// Input-side directions the corruptions can reach: the shift and phase axes
// of the corrupted register pulled back through the preceding layers.
// Entries 1..m1 pull back the shift axis, entries m1+1..2m1 the phase axis.
std::vector<FqVector> error_vectors(const LayeredNetwork& net);

// Choice of the state fed into the sacrificial registers.
enum class Rho0 { mixed, pure_zero };

// Code data for a Clifford network: the protected message occupies the first
// m0 - m** registers after the change of frame by g_star; the remaining m**
// registers absorb every reachable error direction.
struct CodePlan {
  FieldRef spec;
  int m0 = 0;
  int m1 = 0;
  std::vector<FqVector> v;        // 2 m1 pullback directions
  std::vector<FqVector> v_basis;  // reduced basis of their span
  int m_star = 0;
  int m_star_star = 0;
  WBasis wbasis;
  FqMatrix g_star;  // columns w_1..w_m0 then w_1'..w_m0'
  DenseOperator u_encode;
  DenseOperator u_decode;
  int message_registers = 0;
  DensityMatrix rho0;  // on the m** sacrificial registers
  double rate_bits = 0.0;
};

// Builds the full plan.  Throws NotClifford for opaque layers and NoCapacity
// when the error span costs every register (m** >= m0).
CodePlan plan_code(const LayeredNetwork& net, Rho0 rho0_choice = Rho0::mixed);

// u_encode (rho_msg (x) rho0) u_encode^dag, validated.
DensityMatrix encode(const CodePlan& plan, const DensityMatrix& rho_msg);
// Trace over the sacrificial registers of u_decode rho u_decode^dag.
DensityMatrix decode(const CodePlan& plan, const DensityMatrix& rho_out);

// Raw linear forms of the same maps, usable on arbitrary operators (needed
// when evaluating entanglement fidelity through matrix units).
DenseOperator encode_op(const CodePlan& plan, const DenseOperator& msg);
DenseOperator decode_op(const CodePlan& plan, const DenseOperator& out);

// Fidelity of encode -> corrupted network -> decode against a reference
// maximally entangled with the message registers.
double entanglement_fidelity(const CodePlan& plan, const LayeredNetwork& net,
                             const CorruptionModel& model);

}  // namespace qnc
