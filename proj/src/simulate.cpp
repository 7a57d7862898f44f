#include "qnc/simulate.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "qnc/errors.hpp"

namespace qnc {

namespace {

constexpr std::size_t kStateLimit = 4096;

void check_density(const DenseOperator& m) {
  if (m.rows() != m.cols() || m.rows() < 1) throw DimensionError("density matrix must be square");
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
    throw InvalidState("density matrix is not Hermitian");
  }
  if (std::abs(m.trace().real() - 1.0) > 1e-10 || std::abs(m.trace().imag()) > 1e-10) {
    throw InvalidState("density matrix trace differs from one");
  }
  Eigen::SelfAdjointEigenSolver<DenseOperator> eig(m, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10) {
    throw InvalidState("density matrix has a negative eigenvalue");
  }
}

std::size_t product(const std::vector<std::size_t>& dims) {
  std::size_t d = 1;
  for (std::size_t x : dims) d *= x;
  return d;
}

// Digits of `index` in the mixed radix given by dims, most significant first.
std::vector<std::size_t> mixed_digits(std::size_t index, const std::vector<std::size_t>& dims) {
  std::vector<std::size_t> out(dims.size());
  for (std::size_t i = dims.size(); i-- > 0;) {
    out[i] = index % dims[i];
    index /= dims[i];
  }
  return out;
}

std::size_t mixed_index(const std::vector<std::size_t>& digits,
                        const std::vector<std::size_t>& dims) {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) idx = idx * dims[i] + digits[i];
  return idx;
}

void guard_dim(std::size_t dim) {
  if (dim > kStateLimit) throw ResourceLimit("state space exceeds the dense simulation limit");
}

}  // namespace

DensityMatrix::DensityMatrix(DenseOperator m) : m_(std::move(m)) { check_density(m_); }

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  const double n = psi.norm();
  if (std::abs(n - 1.0) > 1e-10) throw InvalidState("pure state vector is not normalized");
  return DensityMatrix(psi * psi.adjoint());
}

DensityMatrix DensityMatrix::basis_state(std::size_t dim, std::size_t k) {
  if (k >= dim) throw DimensionError("basis index out of range");
  StateVector psi = StateVector::Zero(dim);
  psi(k) = 1.0;
  return pure(psi);
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  return DensityMatrix(DenseOperator::Identity(dim, dim) / static_cast<double>(dim));
}

KrausChannel::KrausChannel(std::vector<DenseOperator> kraus) : ks_(std::move(kraus)) {
  if (ks_.empty()) throw DimensionError("channel needs at least one Kraus operator");
  const auto d = ks_.front().rows();
  DenseOperator sum = DenseOperator::Zero(d, d);
  for (const DenseOperator& k : ks_) {
    if (k.rows() != d || k.cols() != d) throw DimensionError("Kraus operators must share one size");
    sum += k.adjoint() * k;
  }
  if ((sum - DenseOperator::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10) {
    throw InvalidState("Kraus operators do not sum to a trace-preserving channel");
  }
}

KrausChannel KrausChannel::identity(std::size_t dim) {
  return KrausChannel({DenseOperator::Identity(dim, dim)});
}

DenseOperator KrausChannel::apply(const DenseOperator& op) const {
  DenseOperator out = DenseOperator::Zero(op.rows(), op.cols());
  for (const DenseOperator& k : ks_) out += k * op * k.adjoint();
  return out;
}

DenseOperator tensor(const DenseOperator& a, const DenseOperator& b) {
  return Eigen::kroneckerProduct(a, b);
}

DenseOperator embed_mixed(const DenseOperator& op, const std::vector<int>& positions,
                          const std::vector<std::size_t>& dims) {
  const int n = static_cast<int>(dims.size());
  std::vector<char> used(dims.size(), 0);
  std::vector<std::size_t> sub_dims;
  for (int p : positions) {
    if (p < 0 || p >= n || used[p]) throw DimensionError("invalid embedding positions");
    used[p] = 1;
    sub_dims.push_back(dims[p]);
  }
  const std::size_t sub = product(sub_dims);
  if (static_cast<std::size_t>(op.rows()) != sub || op.rows() != op.cols()) {
    throw DimensionError("operator size does not match the chosen registers");
  }
  std::vector<int> rest;
  std::vector<std::size_t> rest_dims;
  for (int i = 0; i < n; ++i) {
    if (!used[i]) {
      rest.push_back(i);
      rest_dims.push_back(dims[i]);
    }
  }
  const std::size_t total = product(dims);
  const std::size_t rest_total = product(rest_dims);
  DenseOperator out = DenseOperator::Zero(total, total);
  std::vector<std::size_t> full(dims.size());
  auto compose = [&](const std::vector<std::size_t>& sub_digits,
                     const std::vector<std::size_t>& rest_digits) {
    for (std::size_t i = 0; i < positions.size(); ++i) full[positions[i]] = sub_digits[i];
    for (std::size_t i = 0; i < rest.size(); ++i) full[rest[i]] = rest_digits[i];
    return mixed_index(full, dims);
  };
  for (std::size_t r = 0; r < sub; ++r) {
    const auto rd = mixed_digits(r, sub_dims);
    for (std::size_t c = 0; c < sub; ++c) {
      if (op(r, c) == std::complex<double>(0.0, 0.0)) continue;
      const auto cd = mixed_digits(c, sub_dims);
      for (std::size_t t = 0; t < rest_total; ++t) {
        const auto td = mixed_digits(t, rest_dims);
        out(compose(rd, td), compose(cd, td)) = op(r, c);
      }
    }
  }
  return out;
}

DenseOperator partial_trace(const DenseOperator& rho, const std::vector<std::size_t>& dims,
                            const std::vector<int>& keep) {
  if (rho.rows() != rho.cols() || static_cast<std::size_t>(rho.rows()) != product(dims)) {
    throw DimensionError("operator size does not match the register dimensions");
  }
  std::vector<char> kept(dims.size(), 0);
  int prev = -1;
  for (int k : keep) {
    if (k <= prev || k >= static_cast<int>(dims.size())) {
      throw DimensionError("kept registers must be strictly increasing and in range");
    }
    kept[k] = 1;
    prev = k;
  }
  std::vector<int> traced;
  std::vector<std::size_t> keep_dims, trace_dims;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (kept[i]) {
      keep_dims.push_back(dims[i]);
    } else {
      traced.push_back(static_cast<int>(i));
      trace_dims.push_back(dims[i]);
    }
  }
  const std::size_t kd = product(keep_dims);
  const std::size_t td = product(trace_dims);
  DenseOperator out = DenseOperator::Zero(kd, kd);
  std::vector<std::size_t> full(dims.size());
  auto compose = [&](const std::vector<std::size_t>& keep_digits,
                     const std::vector<std::size_t>& trace_digits) {
    for (std::size_t i = 0, j = 0, l = 0; i < dims.size(); ++i) {
      full[i] = kept[i] ? keep_digits[j++] : trace_digits[l++];
    }
    return mixed_index(full, dims);
  };
  for (std::size_t a = 0; a < kd; ++a) {
    const auto ad = mixed_digits(a, keep_dims);
    for (std::size_t b = 0; b < kd; ++b) {
      const auto bd = mixed_digits(b, keep_dims);
      std::complex<double> s = 0.0;
      for (std::size_t t = 0; t < td; ++t) {
        const auto tdg = mixed_digits(t, trace_dims);
        s += rho(compose(ad, tdg), compose(bd, tdg));
      }
      out(a, b) = s;
    }
  }
  return out;
}

namespace {

DenseOperator apply_individual(const LayeredNetwork& net, const std::vector<KrausChannel>& gammas,
                               const DenseOperator& op) {
  const std::size_t q = static_cast<std::size_t>(net.spec->q());
  if (static_cast<int>(gammas.size()) != net.m1) {
    throw DimensionError("need exactly one channel per corrupted interval");
  }
  for (const KrausChannel& g : gammas) {
    if (g.dim() != q) throw DimensionError("corruption channel must act on one register");
  }
  const auto us = layer_unitaries(net);
  DenseOperator cur = us[0] * op * us[0].adjoint();
  for (int i = 1; i <= net.m1; ++i) {
    DenseOperator next = DenseOperator::Zero(cur.rows(), cur.cols());
    for (const DenseOperator& k : gammas[i - 1].kraus()) {
      const DenseOperator ke = embed_on_registers(k, {0}, net.m0, net.spec->q());
      next += ke * cur * ke.adjoint();
    }
    cur = us[i] * next * us[i].adjoint();
  }
  return cur;
}

DenseOperator apply_adaptive(const LayeredNetwork& net, const AdaptiveAdversary& adv,
                             const DenseOperator& op) {
  const std::size_t q = static_cast<std::size_t>(net.spec->q());
  const std::size_t net_dim = state_dim(net.spec, net.m0);
  if (adv.memory_dim < 1) throw DimensionError("adversary memory must be at least one-dimensional");
  guard_dim(net_dim * static_cast<std::size_t>(adv.memory_dim));
  if (static_cast<int>(adv.steps.size()) != net.m1) {
    throw DimensionError("need exactly one adversary unitary per corrupted interval");
  }
  if (static_cast<std::size_t>(adv.memory_init.size()) !=
      static_cast<std::size_t>(adv.memory_dim)) {
    throw DimensionError("adversary memory state size mismatch");
  }
  if (std::abs(adv.memory_init.norm() - 1.0) > 1e-10) {
    throw InvalidState("adversary memory state is not normalized");
  }
  std::vector<std::size_t> dims(static_cast<std::size_t>(net.m0), q);
  dims.push_back(static_cast<std::size_t>(adv.memory_dim));
  const int mem_pos = net.m0;
  const auto us = layer_unitaries(net);
  const DenseOperator mem0 = adv.memory_init * adv.memory_init.adjoint();
  const DenseOperator id_mem =
      DenseOperator::Identity(adv.memory_dim, adv.memory_dim);

  DenseOperator joint = tensor(op, mem0);
  DenseOperator u0 = tensor(us[0], id_mem);
  joint = u0 * joint * u0.adjoint();
  for (int i = 1; i <= net.m1; ++i) {
    const DenseOperator& step = adv.steps[i - 1];
    if (static_cast<std::size_t>(step.rows()) != q * static_cast<std::size_t>(adv.memory_dim) ||
        step.rows() != step.cols()) {
      throw DimensionError("adversary unitary size mismatch");
    }
    if (!is_unitary(step)) throw InvalidState("adversary step is not unitary");
    const DenseOperator se = embed_mixed(step, {0, mem_pos}, dims);
    joint = se * joint * se.adjoint();
    const DenseOperator ui = tensor(us[i], id_mem);
    joint = ui * joint * ui.adjoint();
  }
  std::vector<int> keep(static_cast<std::size_t>(net.m0));
  for (int i = 0; i < net.m0; ++i) keep[i] = i;
  return partial_trace(joint, dims, keep);
}

DenseOperator apply_mix_substitution(const LayeredNetwork& net, const DenseOperator& op) {
  const std::size_t q = static_cast<std::size_t>(net.spec->q());
  const std::vector<std::size_t> dims(static_cast<std::size_t>(net.m0), q);
  std::vector<int> rest(static_cast<std::size_t>(net.m0) - 1);
  for (int i = 1; i < net.m0; ++i) rest[i - 1] = i;
  const DenseOperator mixed =
      DenseOperator::Identity(q, q) / static_cast<double>(q);
  const auto us = layer_unitaries(net);
  DenseOperator cur = us[0] * op * us[0].adjoint();
  for (int i = 1; i <= net.m1; ++i) {
    if (net.m0 == 1) {
      cur = mixed * cur.trace();
    } else {
      cur = tensor(mixed, partial_trace(cur, dims, rest));
    }
    cur = us[i] * cur * us[i].adjoint();
  }
  return cur;
}

}  // namespace

DenseOperator apply_network(const LayeredNetwork& net, const CorruptionModel& model,
                            const DenseOperator& op) {
  const std::size_t dim = state_dim(net.spec, net.m0);
  guard_dim(dim);
  if (static_cast<std::size_t>(op.rows()) != dim || op.rows() != op.cols()) {
    throw DimensionError("input operator size does not match the network");
  }
  if (const auto* ind = std::get_if<Individual>(&model)) {
    return apply_individual(net, ind->gammas, op);
  }
  if (const auto* ad = std::get_if<Adaptive>(&model)) {
    return apply_adaptive(net, ad->adversary, op);
  }
  return apply_mix_substitution(net, op);
}

DensityMatrix run_network(const LayeredNetwork& net, const CorruptionModel& model,
                          const DensityMatrix& rho_in) {
  return DensityMatrix(apply_network(net, model, rho_in.matrix()));
}

DensityMatrix run_individual(const LayeredNetwork& net, const std::vector<KrausChannel>& gammas,
                             const DensityMatrix& rho_in) {
  return run_network(net, Individual{gammas}, rho_in);
}

DensityMatrix run_adaptive(const LayeredNetwork& net, const AdaptiveAdversary& adv,
                           const DensityMatrix& rho_in) {
  return run_network(net, Adaptive{adv}, rho_in);
}

DensityMatrix run_mix_substitution(const LayeredNetwork& net, const DensityMatrix& rho_in) {
  return run_network(net, MixSubstitution{}, rho_in);
}

double entanglement_fidelity(std::size_t dim,
                             const std::function<DenseOperator(const DenseOperator&)>& map) {
  // F = (1/dim^2) sum_{ij} <i| map(|i><j|) |j>, the overlap of the channel's
  // Choi state with the maximally entangled state.
  std::complex<double> acc = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      DenseOperator unit = DenseOperator::Zero(dim, dim);
      unit(i, j) = 1.0;
      acc += map(unit)(i, j);
    }
  }
  return acc.real() / static_cast<double>(dim * dim);
}

double Rng::uniform() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // (0,1] for the radius draw keeps log() finite.
  const double u1 = (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::uint64_t Rng::integer(std::uint64_t bound) {
  if (bound == 0) throw DimensionError("empty integer range");
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = gen_();
  } while (x >= limit);
  return x % bound;
}

DenseOperator Rng::haar_unitary(std::size_t dim) {
  DenseOperator a(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) a(i, j) = std::complex<double>(normal(), normal());
  }
  Eigen::HouseholderQR<DenseOperator> qr(a);
  DenseOperator q = qr.householderQ();
  const DenseOperator r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (std::size_t i = 0; i < dim; ++i) {
    const std::complex<double> d = r(i, i);
    q.col(i) *= d / std::abs(d);
  }
  return q;
}

StateVector Rng::haar_state(std::size_t dim) {
  StateVector psi(dim);
  for (std::size_t i = 0; i < dim; ++i) psi(i) = std::complex<double>(normal(), normal());
  return psi / psi.norm();
}

KrausChannel Rng::kraus_channel(std::size_t dim, int count) {
  if (count < 1) throw DimensionError("channel needs at least one Kraus operator");
  const std::size_t rows = dim * static_cast<std::size_t>(count);
  DenseOperator a(rows, dim);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < dim; ++j) a(i, j) = std::complex<double>(normal(), normal());
  }
  Eigen::HouseholderQR<DenseOperator> qr(a);
  DenseOperator iso = qr.householderQ() * DenseOperator::Identity(rows, dim);
  const DenseOperator r =
      qr.matrixQR().topRows(dim).triangularView<Eigen::Upper>();
  for (std::size_t j = 0; j < dim; ++j) {
    const std::complex<double> d = r(j, j);
    iso.col(j) *= d / std::abs(d);
  }
  std::vector<DenseOperator> ks;
  for (int k = 0; k < count; ++k) {
    ks.push_back(iso.block(static_cast<std::size_t>(k) * dim, 0, dim, dim));
  }
  return KrausChannel(std::move(ks));
}

DensityMatrix Rng::density(std::size_t dim) {
  DenseOperator a(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) a(i, j) = std::complex<double>(normal(), normal());
  }
  DenseOperator rho = a * a.adjoint();
  return DensityMatrix(rho / rho.trace());
}

AdaptiveAdversary Rng::adversary(int q, int m1, int memory_dim) {
  AdaptiveAdversary adv;
  adv.memory_dim = memory_dim;
  adv.memory_init = StateVector::Zero(memory_dim);
  adv.memory_init(0) = 1.0;
  for (int i = 0; i < m1; ++i) {
    adv.steps.push_back(haar_unitary(static_cast<std::size_t>(q) * memory_dim));
  }
  return adv;
}

}  // namespace qnc
