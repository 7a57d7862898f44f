#include "qnc/capacity.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>

#include "qnc/errors.hpp"

namespace qnc {

namespace {

// Entropy in bits of a Hermitian PSD matrix with unit trace.
double entropy_of(const DenseOperator& m) {
  Eigen::SelfAdjointEigenSolver<DenseOperator> es(m, Eigen::EigenvaluesOnly);
  double h = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double ev = es.eigenvalues()[i];
    if (ev < -1e-10) throw InvalidState("negative eigenvalue in entropy input");
    if (ev < 1e-12) continue;
    h -= ev * std::log2(ev);
  }
  return h;
}

std::size_t int_pow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

PauliDistribution zero_distribution(const FieldRef& spec, int registers) {
  const std::size_t labels = int_pow(spec->q(), 2 * registers);
  return PauliDistribution{spec, registers, std::vector<double>(labels, 0.0)};
}

// Kraus set of one interval's substitution: all displacements, weight 1/q^2.
std::vector<DenseOperator> substitution_kraus(const FieldRef& spec, int m0) {
  const int q = spec->q();
  std::vector<DenseOperator> ks;
  for (int s = 0; s < q; ++s) {
    for (int t = 0; t < q; ++t) {
      const DenseOperator w =
          weyl(WeylLabel{decode_state_index(spec, 1, s), decode_state_index(spec, 1, t)});
      ks.push_back(embed_on_registers(w / static_cast<double>(q), {0}, m0, q));
    }
  }
  return ks;
}

// Kraus operators of the full individually corrupted network,
// U_m1 K_m1 ... U_1 K_1 U_0 over all corruption choices.
std::vector<DenseOperator> network_kraus(const std::vector<DenseOperator>& us,
                                         const std::vector<std::vector<DenseOperator>>& per_interval) {
  std::vector<DenseOperator> cur{us[0]};
  for (std::size_t i = 0; i < per_interval.size(); ++i) {
    std::vector<DenseOperator> next;
    next.reserve(cur.size() * per_interval[i].size());
    for (const DenseOperator& k : per_interval[i])
      for (const DenseOperator& c : cur) next.push_back(us[i + 1] * k * c);
    cur = std::move(next);
  }
  return cur;
}

// Natural representation built column by column; vec is column-major, so
// vec(K X K^dag) = (conj(K) (x) K) vec(X).
DenseOperator superoperator_of(std::size_t dim,
                               const std::function<DenseOperator(const DenseOperator&)>& map) {
  DenseOperator s(dim * dim, dim * dim);
  DenseOperator unit = DenseOperator::Zero(dim, dim);
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t i = 0; i < dim; ++i) {
      unit(i, j) = 1.0;
      const DenseOperator out = map(unit);
      unit(i, j) = 0.0;
      s.col(j * dim + i) = Eigen::Map<const StateVector>(out.data(), out.size());
    }
  }
  return s;
}

DenseOperator superoperator_of(const std::vector<DenseOperator>& kraus) {
  const Eigen::Index d2 = kraus.front().rows() * kraus.front().cols();
  DenseOperator s = DenseOperator::Zero(d2, d2);
  for (const DenseOperator& k : kraus)
    s += Eigen::kroneckerProduct(k.conjugate(), k).eval();
  return s;
}

// Hermitian square root with tiny negative eigenvalues clamped to zero.
DenseOperator psd_sqrt(const DenseOperator& m, const char* what) {
  Eigen::SelfAdjointEigenSolver<DenseOperator> es(m);
  Eigen::VectorXd ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < -1e-10) throw ConfigError(what);
    ev[i] = std::sqrt(std::max(ev[i], 0.0));
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

double log2q(const FieldRef& spec) { return std::log2(static_cast<double>(spec->q())); }

struct NelderMead {
  // Maximizes f via the standard reflect/expand/contract/shrink moves.
  static double run(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd& x,
                    double step, int iterations) {
    const int n = static_cast<int>(x.size());
    std::vector<Eigen::VectorXd> pts(n + 1, x);
    std::vector<double> vals(n + 1);
    for (int i = 1; i <= n; ++i) pts[i][i - 1] += step;
    for (int i = 0; i <= n; ++i) vals[i] = -f(pts[i]);

    std::vector<int> order(n + 1);
    for (int it = 0; it < iterations; ++it) {
      for (int i = 0; i <= n; ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
      if (vals[order[n]] - vals[order[0]] < 1e-11) break;

      Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
      for (int i = 0; i < n; ++i) centroid += pts[order[i]];
      centroid /= n;
      const int worst = order[n];

      const Eigen::VectorXd refl = centroid + (centroid - pts[worst]);
      const double fr = -f(refl);
      if (fr < vals[order[0]]) {
        const Eigen::VectorXd exp = centroid + 2.0 * (centroid - pts[worst]);
        const double fe = -f(exp);
        if (fe < fr) {
          pts[worst] = exp;
          vals[worst] = fe;
        } else {
          pts[worst] = refl;
          vals[worst] = fr;
        }
      } else if (fr < vals[order[n - 1]]) {
        pts[worst] = refl;
        vals[worst] = fr;
      } else {
        const Eigen::VectorXd con =
            centroid + 0.5 * ((fr < vals[worst] ? refl : pts[worst]) - centroid);
        const double fc = -f(con);
        if (fc < std::min(fr, vals[worst])) {
          pts[worst] = con;
          vals[worst] = fc;
        } else {
          for (int i = 0; i <= n; ++i) {
            if (i == order[0]) continue;
            pts[i] = pts[order[0]] + 0.5 * (pts[i] - pts[order[0]]);
            vals[i] = -f(pts[i]);
          }
        }
      }
    }
    int best = 0;
    for (int i = 1; i <= n; ++i)
      if (vals[i] < vals[best]) best = i;
    x = pts[best];
    return -vals[best];
  }
};

DensityMatrix params_to_state(const Eigen::VectorXd& theta, std::size_t dim) {
  DenseOperator l(dim, dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) {
      const std::size_t k = 2 * (r * dim + c);
      l(r, c) = std::complex<double>(theta[k], theta[k + 1]);
    }
  DenseOperator g = l * l.adjoint();
  const double tr = g.trace().real();
  if (tr < 1e-12) return DensityMatrix::maximally_mixed(dim);
  return DensityMatrix(g / tr);
}

Eigen::VectorXd state_to_params(const DensityMatrix& rho) {
  const std::size_t dim = rho.dim();
  const DenseOperator l = psd_sqrt(rho.matrix(), "state square root");
  Eigen::VectorXd theta(2 * dim * dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) {
      const std::size_t k = 2 * (r * dim + c);
      theta[k] = l(r, c).real();
      theta[k + 1] = l(r, c).imag();
    }
  return theta;
}

}  // namespace

double von_neumann_entropy(const DensityMatrix& rho) { return entropy_of(rho.matrix()); }

double coherent_information(const DensityMatrix& rho, const KrausChannel& channel) {
  const auto& ks = channel.kraus();
  if (static_cast<std::size_t>(ks.front().cols()) != rho.dim()) {
    throw DimensionError("channel input does not match the state");
  }
  const double h_out = entropy_of(channel.apply(rho.matrix()));

  const std::size_t n = ks.size();
  DenseOperator env(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j; k < n; ++k) {
      env(j, k) = (ks[j] * rho.matrix() * ks[k].adjoint()).trace();
      env(k, j) = std::conj(env(j, k));
    }
  }
  return h_out - entropy_of(env);
}

PauliDistribution point_mass_distribution(const FieldRef& spec, int registers) {
  PauliDistribution p = zero_distribution(spec, registers);
  p.weights[0] = 1.0;
  return p;
}

PauliDistribution mix_distribution(const FieldRef& spec, int registers) {
  PauliDistribution p = zero_distribution(spec, registers);
  const double w = 1.0 / static_cast<double>(p.weights.size());
  std::fill(p.weights.begin(), p.weights.end(), w);
  return p;
}

PauliDistribution mixz_distribution(const FieldRef& spec, int registers) {
  PauliDistribution p = zero_distribution(spec, registers);
  const std::size_t states = int_pow(spec->q(), registers);
  for (std::size_t s = 0; s < states; ++s) p.weights[s * states] = 1.0 / states;
  return p;
}

KrausChannel pauli_channel(const PauliDistribution& p) {
  const std::size_t states = int_pow(p.spec->q(), p.registers);
  if (p.weights.size() != states * states) {
    throw ConfigError("displacement distribution has the wrong label count");
  }
  double total = 0.0;
  std::vector<DenseOperator> ks;
  for (std::size_t s = 0; s < states; ++s) {
    for (std::size_t t = 0; t < states; ++t) {
      const double w = p.weights[s * states + t];
      if (w < 0.0) throw ConfigError("negative displacement weight");
      total += w;
      if (w == 0.0) continue;
      ks.push_back(std::sqrt(w) * weyl(WeylLabel{decode_state_index(p.spec, p.registers, s),
                                                 decode_state_index(p.spec, p.registers, t)}));
    }
  }
  if (std::abs(total - 1.0) > 1e-10) throw ConfigError("displacement weights do not sum to 1");
  return KrausChannel(std::move(ks));
}

ChannelReport verify_direct_bound(const LayeredNetwork& net,
                                  const std::vector<KrausChannel>& gammas) {
  const int q = net.spec->q();
  if (static_cast<int>(gammas.size()) != net.m1) {
    throw ConfigError("need one corruption channel per interval");
  }
  for (const KrausChannel& g : gammas) {
    if (g.dim() != static_cast<std::size_t>(q)) {
      throw DimensionError("corruption channel must act on one register");
    }
  }
  const std::size_t dim = state_dim(net.spec, net.m0);
  const auto us = layer_unitaries(net);

  // Witness input: |0><0| on the corrupted register, maximally mixed on the
  // rest, pulled back through the first layer.
  const std::size_t rest = dim / q;
  DenseOperator witness = DenseOperator::Zero(dim, dim);
  for (std::size_t r = 0; r < rest; ++r) witness(r, r) = 1.0 / static_cast<double>(rest);
  const DensityMatrix rho_in(us[0].adjoint() * witness * us[0]);

  std::vector<std::vector<DenseOperator>> per_interval;
  for (const KrausChannel& g : gammas) {
    std::vector<DenseOperator> embedded;
    for (const DenseOperator& k : g.kraus())
      embedded.push_back(embed_on_registers(k, {0}, net.m0, q));
    per_interval.push_back(std::move(embedded));
  }
  const KrausChannel channel(network_kraus(us, per_interval));

  ChannelReport r;
  r.coherent_info_bits = coherent_information(rho_in, channel);
  r.coherent_info_logq = r.coherent_info_bits / log2q(net.spec);
  r.bound_bits = (net.m0 - 2 * net.m1 + 1) * log2q(net.spec);
  r.tolerance = 1e-6;
  r.verdict = r.coherent_info_bits >= r.bound_bits - r.tolerance;
  r.samples = 1;
  r.dim_in = static_cast<int>(dim);
  r.dim_out = static_cast<int>(dim);
  return r;
}

std::vector<ChannelReport> direct_bound_sweep(const FieldRef& spec, int m0, int m1, int samples,
                                              Rng& rng) {
  const std::size_t dim = state_dim(spec, m0);
  std::vector<ChannelReport> out;
  for (int s = 0; s < samples; ++s) {
    std::vector<Layer> layers;
    for (int i = 0; i <= m1; ++i) layers.push_back(dense_layer(rng.haar_unitary(dim)));
    const LayeredNetwork net = make_layered(spec, m0, layers);
    std::vector<KrausChannel> gammas;
    for (int i = 0; i < m1; ++i) gammas.push_back(rng.kraus_channel(spec->q(), 2));
    ChannelReport r = verify_direct_bound(net, gammas);
    r.seed = static_cast<std::uint64_t>(s);
    out.push_back(std::move(r));
  }
  return out;
}

ChannelReport verify_converse(const CodePlan& plan, const LayeredNetwork& net) {
  const FieldRef& spec = plan.spec;
  const int q = spec->q();
  const std::size_t dim = state_dim(spec, plan.m0);

  const auto decoded = [&](const DenseOperator& x) {
    const DenseOperator coded = plan.u_encode * x * plan.u_encode.adjoint();
    const DenseOperator out = apply_network(net, MixSubstitution{}, coded);
    return (plan.u_decode * out * plan.u_decode.adjoint()).eval();
  };

  // Reference: identity on the message block, full displacement mixing on
  // the paired block, shift-only mixing (Fourier pinching) on the rest.
  const int pinched = plan.m_star_star - plan.m_star;
  const DenseOperator id_msg =
      DenseOperator::Identity(state_dim(spec, plan.message_registers),
                              state_dim(spec, plan.message_registers));
  std::vector<DenseOperator> mix_part{DenseOperator::Identity(1, 1)};
  if (plan.m_star > 0) mix_part = pauli_channel(mix_distribution(spec, plan.m_star)).kraus();
  std::vector<DenseOperator> pinch_part{DenseOperator::Identity(1, 1)};
  if (pinched > 0) pinch_part = pauli_channel(mixz_distribution(spec, pinched)).kraus();
  std::vector<DenseOperator> reference;
  for (const DenseOperator& a : mix_part)
    for (const DenseOperator& b : pinch_part) reference.push_back(tensor(id_msg, tensor(a, b)));

  const double dist =
      (superoperator_of(dim, decoded) - superoperator_of(reference)).cwiseAbs().maxCoeff();
  if (dist > 1e-9) {
    throw ConverseMismatch("decoded substitution channel is not the expected product form");
  }

  // Coherent information at maximally mixed message (x) pure rest, from the
  // decoded channel's own Kraus set.
  const auto us = layer_unitaries(net);
  std::vector<std::vector<DenseOperator>> per_interval(
      static_cast<std::size_t>(plan.m1), substitution_kraus(spec, plan.m0));
  std::vector<DenseOperator> us_coded = us;
  us_coded[0] = us[0] * plan.u_encode;
  std::vector<DenseOperator> ks = network_kraus(us_coded, per_interval);
  for (DenseOperator& k : ks) k = plan.u_decode * k;

  const std::size_t msg_dim = state_dim(spec, plan.message_registers);
  const std::size_t aux_dim = dim / msg_dim;
  DenseOperator rho = DenseOperator::Zero(dim, dim);
  for (std::size_t y = 0; y < msg_dim; ++y)
    rho(y * aux_dim, y * aux_dim) = 1.0 / static_cast<double>(msg_dim);

  ChannelReport r;
  r.coherent_info_bits = coherent_information(DensityMatrix(rho), KrausChannel(std::move(ks)));
  r.coherent_info_logq = r.coherent_info_bits / log2q(spec);
  r.rate_bits = plan.rate_bits;
  r.bound_bits = plan.message_registers * log2q(spec);
  r.tolerance = 1e-6;
  r.verdict = std::abs(r.coherent_info_bits - r.bound_bits) <= r.tolerance;
  r.samples = 1;
  r.dim_in = static_cast<int>(dim);
  r.dim_out = static_cast<int>(dim);
  return r;
}

KrausChannel measure_prepare_channel(const MeasurePrepare& mp) {
  if (mp.povm.empty() || mp.povm.size() != mp.outputs.size()) {
    throw ConfigError("need one prepared state per measurement effect");
  }
  const Eigen::Index din = mp.povm.front().rows();
  DenseOperator total = DenseOperator::Zero(din, din);
  std::vector<DenseOperator> ks;
  for (std::size_t k = 0; k < mp.povm.size(); ++k) {
    const DenseOperator& m = mp.povm[k];
    if (m.rows() != din || m.cols() != din) throw ConfigError("effect size mismatch");
    if (mp.outputs[k].dim() != static_cast<std::size_t>(din)) {
      throw ConfigError("prepared state size mismatch");
    }
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
      throw ConfigError("measurement effect is not Hermitian");
    }
    total += m;
    const DenseOperator b = psd_sqrt(m, "measurement effect is not positive");

    Eigen::SelfAdjointEigenSolver<DenseOperator> es(mp.outputs[k].matrix());
    for (Eigen::Index r = 0; r < es.eigenvalues().size(); ++r) {
      const double lam = es.eigenvalues()[r];
      if (lam < 1e-13) continue;
      for (Eigen::Index j = 0; j < din; ++j) {
        if (b.row(j).norm() < 1e-14) continue;
        ks.push_back(std::sqrt(lam) * es.eigenvectors().col(r) * b.row(j));
      }
    }
  }
  if ((total - DenseOperator::Identity(din, din)).cwiseAbs().maxCoeff() > 1e-10) {
    throw ConfigError("measurement effects do not resolve the identity");
  }
  return KrausChannel(std::move(ks));
}

MaxIcResult max_coherent_information(const KrausChannel& channel, Rng& rng, int restarts) {
  const std::size_t dim = static_cast<std::size_t>(channel.kraus().front().cols());
  const auto value = [&](const DensityMatrix& rho) { return coherent_information(rho, channel); };

  MaxIcResult best{value(DensityMatrix::maximally_mixed(dim)), DensityMatrix::maximally_mixed(dim),
                   restarts};
  for (std::size_t k = 0; k < dim; ++k) {
    const DensityMatrix cand = DensityMatrix::basis_state(dim, k);
    const double v = value(cand);
    if (v > best.value_bits) {
      best.value_bits = v;
      best.argmax = cand;
    }
  }

  const auto objective = [&](const Eigen::VectorXd& theta) {
    return value(params_to_state(theta, dim));
  };
  for (int r = 0; r <= restarts; ++r) {
    Eigen::VectorXd theta;
    if (r == 0) {
      theta = state_to_params(best.argmax);
    } else {
      theta.resize(2 * dim * dim);
      for (Eigen::Index i = 0; i < theta.size(); ++i) theta[i] = 0.5 * rng.normal();
    }
    const double v = NelderMead::run(objective, theta, 0.2, 400);
    if (v > best.value_bits) {
      best.value_bits = v;
      best.argmax = params_to_state(theta, dim);
    }
  }
  return best;
}

EbReport eb_coherent_check(const MeasurePrepare& channel_a, const KrausChannel& channel_b,
                           int samples, Rng& rng, std::optional<double> analytic_max_bits) {
  const KrausChannel a = measure_prepare_channel(channel_a);
  const std::size_t dim_a = static_cast<std::size_t>(a.kraus().front().cols());
  const std::size_t dim_b = static_cast<std::size_t>(channel_b.kraus().front().cols());

  std::vector<DenseOperator> joint_kraus;
  for (const DenseOperator& ka : a.kraus())
    for (const DenseOperator& kb : channel_b.kraus()) joint_kraus.push_back(tensor(ka, kb));
  const KrausChannel joint(std::move(joint_kraus));

  const MaxIcResult opt = max_coherent_information(channel_b, rng);

  EbReport r;
  r.max_single_bits = analytic_max_bits.value_or(opt.value_bits);
  r.optimizer_gap = analytic_max_bits ? *analytic_max_bits - opt.value_bits : 0.0;
  r.tolerance = 1e-6;
  r.samples = samples;

  r.worst_excess = -1e300;
  for (int s = 0; s < samples; ++s) {
    const DensityMatrix rho = rng.density(dim_a * dim_b);
    const double ic = coherent_information(rho, joint);
    r.worst_excess = std::max(r.worst_excess, ic - r.max_single_bits);
  }

  // A pure state through the measure-and-prepare side contributes nothing,
  // so the product input achieves the single-system value exactly.
  const DensityMatrix pure_a = DensityMatrix::pure(rng.haar_state(dim_a));
  const DensityMatrix tau = opt.argmax;
  const DensityMatrix prod{tensor(pure_a.matrix(), tau.matrix())};
  r.product_gap =
      std::abs(coherent_information(prod, joint) - coherent_information(tau, channel_b));

  r.verdict = r.worst_excess <= r.tolerance && r.product_gap <= r.tolerance;
  return r;
}

ClassicalReport classical_bound_check(int d, int m0, int m1,
                                      const std::vector<std::vector<int>>& f_list,
                                      const std::vector<std::vector<std::vector<double>>>& kernels) {
  if (d < 2 || m0 < 1 || m1 < 0) throw ConfigError("invalid classical network shape");
  if (static_cast<int>(f_list.size()) != m1 + 1 || static_cast<int>(kernels.size()) != m1) {
    throw ConfigError("need m1+1 permutations and m1 kernels");
  }
  std::size_t n = 1;
  for (int i = 0; i < m0; ++i) {
    n *= static_cast<std::size_t>(d);
    if (n > 65536) throw ResourceLimit("classical state space too large");
  }

  for (const auto& f : f_list) {
    if (f.size() != n) throw NotInvertible("permutation table has the wrong size");
    std::vector<char> seen(n, 0);
    for (int v : f) {
      if (v < 0 || static_cast<std::size_t>(v) >= n || seen[v]) {
        throw NotInvertible("table is not a permutation");
      }
      seen[v] = 1;
    }
  }
  for (const auto& k : kernels) {
    if (static_cast<int>(k.size()) != d) throw InvalidState("kernel has the wrong shape");
    for (const auto& row : k)
      if (static_cast<int>(row.size()) != d) throw InvalidState("kernel has the wrong shape");
    for (int c = 0; c < d; ++c) {
      double col = 0.0;
      for (int y = 0; y < d; ++y) {
        if (k[y][c] < 0.0) throw InvalidState("negative kernel entry");
        col += k[y][c];
      }
      if (std::abs(col - 1.0) > 1e-12) throw InvalidState("kernel column does not sum to 1");
    }
  }

  const std::size_t rest = n / static_cast<std::size_t>(d);
  const auto apply_perm = [&](const std::vector<int>& f, std::vector<double>& p) {
    std::vector<double> next(n, 0.0);
    for (std::size_t x = 0; x < n; ++x) next[f[x]] = p[x];
    p = std::move(next);
  };
  const auto apply_kernel = [&](const std::vector<std::vector<double>>& k,
                                std::vector<double>& p) {
    std::vector<double> next(n, 0.0);
    for (std::size_t r = 0; r < rest; ++r)
      for (int c = 0; c < d; ++c) {
        const double mass = p[static_cast<std::size_t>(c) * rest + r];
        if (mass == 0.0) continue;
        for (int y = 0; y < d; ++y) next[static_cast<std::size_t>(y) * rest + r] += k[y][c] * mass;
      }
    p = std::move(next);
  };

  std::vector<std::vector<double>> rows(n);
  std::vector<double> marginal(n, 0.0);
  for (std::size_t x0 = 0; x0 < n; ++x0) {
    std::vector<double> p(n, 0.0);
    p[x0] = 1.0;
    for (int i = 0; i < m1; ++i) {
      apply_perm(f_list[i], p);
      apply_kernel(kernels[i], p);
    }
    apply_perm(f_list[m1], p);
    for (std::size_t x = 0; x < n; ++x) marginal[x] += p[x] / static_cast<double>(n);
    rows[x0] = std::move(p);
  }

  double info = 0.0;
  for (std::size_t x0 = 0; x0 < n; ++x0)
    for (std::size_t x = 0; x < n; ++x) {
      const double pc = rows[x0][x];
      if (pc <= 0.0) continue;
      info += pc / static_cast<double>(n) * std::log2(pc / marginal[x]);
    }

  ClassicalReport r;
  r.info_bits = info;
  r.bound_bits = (m0 - m1) * std::log2(static_cast<double>(d));
  r.tolerance = 1e-9;
  r.verdict = info >= r.bound_bits - r.tolerance;
  return r;
}

}  // namespace qnc
