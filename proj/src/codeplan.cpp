#include "qnc/codeplan.hpp"

#include <cmath>
#include <utility>

#include "qnc/errors.hpp"
#include "qnc/weyl.hpp"

namespace qnc {

std::vector<FqVector> error_vectors(const LayeredNetwork& net) {
  if (!is_clifford(net)) throw NotClifford("pullback directions need symplectic layer data");
  const int m0 = net.m0;
  std::vector<FqVector> shifts, phases;
  FqMatrix acc = FqMatrix::identity(net.spec, 2 * m0);
  for (int i = 1; i <= net.m1; ++i) {
    acc = acc * inverse(*net.layers[i - 1].symplectic);
    shifts.push_back(acc.column(0));
    phases.push_back(acc.column(m0));
  }
  shifts.insert(shifts.end(), phases.begin(), phases.end());
  return shifts;
}

CodePlan plan_code(const LayeredNetwork& net, Rho0 rho0_choice) {
  const std::size_t dim = state_dim(net.spec, net.m0);
  if (dim > 4096) throw ResourceLimit("state space exceeds the dense synthesis limit");
  const SymplecticContext ctx{net.spec, net.m0};

  std::vector<FqVector> v = error_vectors(net);
  std::vector<FqVector> basis = reduce_to_basis(v);
  const auto [m_star, m_star_star] = compute_invariants(basis, ctx, net.m1);
  if (m_star_star >= net.m0) {
    throw NoCapacity("error span costs every register; no message space remains");
  }
  WBasis wb = build_w_basis(basis, ctx);

  std::vector<FqVector> columns = wb.w;
  columns.insert(columns.end(), wb.w_prime.begin(), wb.w_prime.end());
  FqMatrix g_star = FqMatrix::from_columns(columns);
  if (!is_symplectic(g_star, ctx)) {
    throw InternalError("adapted basis does not assemble into a symplectic frame");
  }

  const DenseOperator u_gs = metaplectic(g_star, ctx).u;
  const auto us = layer_unitaries(net);
  DenseOperator u_decode = u_gs.adjoint();
  for (const DenseOperator& u : us) u_decode = u_decode * u.adjoint();

  const int message_registers = net.m0 - m_star_star;
  const std::size_t aux_dim = state_dim(net.spec, m_star_star);
  DensityMatrix rho0 = rho0_choice == Rho0::mixed ? DensityMatrix::maximally_mixed(aux_dim)
                                                  : DensityMatrix::basis_state(aux_dim, 0);
  const double rate_bits =
      message_registers * std::log2(static_cast<double>(net.spec->q()));

  return CodePlan{net.spec,
                  net.m0,
                  net.m1,
                  std::move(v),
                  std::move(basis),
                  m_star,
                  m_star_star,
                  std::move(wb),
                  std::move(g_star),
                  u_gs,
                  std::move(u_decode),
                  message_registers,
                  std::move(rho0),
                  rate_bits};
}

DenseOperator encode_op(const CodePlan& plan, const DenseOperator& msg) {
  const std::size_t msg_dim = state_dim(plan.spec, plan.message_registers);
  if (static_cast<std::size_t>(msg.rows()) != msg_dim || msg.rows() != msg.cols()) {
    throw DimensionError("message operator size does not match the plan");
  }
  const DenseOperator joint = tensor(msg, plan.rho0.matrix());
  return plan.u_encode * joint * plan.u_encode.adjoint();
}

DenseOperator decode_op(const CodePlan& plan, const DenseOperator& out) {
  const std::size_t dim = state_dim(plan.spec, plan.m0);
  if (static_cast<std::size_t>(out.rows()) != dim || out.rows() != out.cols()) {
    throw DimensionError("network output size does not match the plan");
  }
  const DenseOperator rotated = plan.u_decode * out * plan.u_decode.adjoint();
  const std::vector<std::size_t> dims(static_cast<std::size_t>(plan.m0),
                                      static_cast<std::size_t>(plan.spec->q()));
  std::vector<int> keep(static_cast<std::size_t>(plan.message_registers));
  for (int i = 0; i < plan.message_registers; ++i) keep[i] = i;
  return partial_trace(rotated, dims, keep);
}

DensityMatrix encode(const CodePlan& plan, const DensityMatrix& rho_msg) {
  return DensityMatrix(encode_op(plan, rho_msg.matrix()));
}

DensityMatrix decode(const CodePlan& plan, const DensityMatrix& rho_out) {
  return DensityMatrix(decode_op(plan, rho_out.matrix()));
}

double entanglement_fidelity(const CodePlan& plan, const LayeredNetwork& net,
                             const CorruptionModel& model) {
  const std::size_t msg_dim = state_dim(plan.spec, plan.message_registers);
  return entanglement_fidelity(msg_dim, [&](const DenseOperator& m) {
    return decode_op(plan, apply_network(net, model, encode_op(plan, m)));
  });
}

}  // namespace qnc
