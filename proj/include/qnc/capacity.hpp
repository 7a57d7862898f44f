#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qnc/codeplan.hpp"
#include "qnc/network.hpp"
#include "qnc/simulate.hpp"
#include "qnc/weyl.hpp"

namespace qnc {

// -sum lambda log2 lambda over the spectrum; eigenvalues below 1e-12 count
// as zero.  Throws InvalidState when an eigenvalue is negative beyond
// tolerance.
double von_neumann_entropy(const DensityMatrix& rho);

// H(output) - H(environment) in bits.  The environment state is the Gram
// matrix rho_E[j,k] = tr(K_j rho K_k^dag), so its dimension is the number of
// Kraus operators; the value does not depend on that choice.
double coherent_information(const DensityMatrix& rho, const KrausChannel& channel);

// Probability distribution over displacement labels (s, t) on `registers`
// registers.  weights[s_idx * q^n + t_idx] with both indices in state order.
struct PauliDistribution {
  FieldRef spec;
  int registers = 0;
  std::vector<double> weights;
};

PauliDistribution point_mass_distribution(const FieldRef& spec, int registers);
// Uniform over all q^{2n} labels; the resulting channel fully depolarizes.
PauliDistribution mix_distribution(const FieldRef& spec, int registers);
// Uniform over the pure shifts {(s, 0)}; the resulting channel pinches in
// the Fourier basis.
PauliDistribution mixz_distribution(const FieldRef& spec, int registers);

// Kraus set {sqrt(P(s,t)) W(s,t)}.  Throws ConfigError for a negative weight
// or a total differing from 1 beyond 1e-10.
KrausChannel pauli_channel(const PauliDistribution& p);

struct ChannelReport {
  double coherent_info_bits = 0.0;
  double coherent_info_logq = 0.0;
  double rate_bits = 0.0;
  double bound_bits = 0.0;
  double tolerance = 0.0;
  bool verdict = false;
  int samples = 0;
  std::uint64_t seed = 0;
  int dim_in = 0;
  int dim_out = 0;
};

// Coherent information of the individually corrupted network at the witness
// input: |0><0| on the corrupted register, maximally mixed elsewhere, pulled
// back through the first layer.  Passes iff the value reaches
// (m0 - 2 m1 + 1) log2 q within 1e-6.
ChannelReport verify_direct_bound(const LayeredNetwork& net,
                                  const std::vector<KrausChannel>& gammas);

// Runs verify_direct_bound over `samples` random networks (Haar unitary
// layers) with random two-operator corruption channels.
std::vector<ChannelReport> direct_bound_sweep(const FieldRef& spec, int m0, int m1, int samples,
                                              Rng& rng);

// Checks that decode . substitute . encode factorizes as identity on the
// message registers, full mixing on the m* paired registers, and Fourier
// pinching on the m** - m* remaining ones (throws ConverseMismatch beyond
// 1e-9 in superoperator distance), then evaluates the coherent information
// at maximally-mixed message (x) pure rest, which must equal
// (m0 - m**) log2 q within 1e-6.
ChannelReport verify_converse(const CodePlan& plan, const LayeredNetwork& net);

// Measure-and-prepare description: Lambda(rho) = sum_k tr(M_k rho) chi_k.
// Channels of this form break entanglement with any reference.
struct MeasurePrepare {
  std::vector<DenseOperator> povm;      // M_k >= 0, sum M_k = I
  std::vector<DensityMatrix> outputs;   // chi_k
};

// Kraus form of the measure-and-prepare map.  Throws ConfigError on count
// mismatch, a non-PSD effect, or an incomplete POVM.
KrausChannel measure_prepare_channel(const MeasurePrepare& mp);

struct MaxIcResult {
  double value_bits = 0.0;
  DensityMatrix argmax;
  int restarts = 0;
};

// Best-effort maximum of I_c(tau, channel) over input states: Nelder-Mead
// ascent over a Cholesky-style parametrization from multiple starts, seeded
// with the maximally mixed and basis states.
MaxIcResult max_coherent_information(const KrausChannel& channel, Rng& rng, int restarts = 6);

struct EbReport {
  double max_single_bits = 0.0;   // best found max_tau I_c(tau, channel_b)
  double optimizer_gap = 0.0;     // analytic reference minus optimized value
  double worst_excess = 0.0;      // max over samples of I_c(joint) - max_single_bits
  double product_gap = 0.0;       // deviation from equality at a product input
  double tolerance = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
  bool verdict = false;
};

// Samples random joint inputs for the product of a measure-and-prepare
// channel with channel_b and checks I_c never exceeds the single-system
// maximum beyond 1e-6; also checks equality at pure (x) tau inputs.  When an
// analytic maximum is supplied it overrides the optimizer, whose shortfall
// is reported as optimizer_gap.
EbReport eb_coherent_check(const MeasurePrepare& channel_a, const KrausChannel& channel_b,
                           int samples, Rng& rng,
                           std::optional<double> analytic_max_bits = std::nullopt);

struct ClassicalReport {
  double info_bits = 0.0;
  double bound_bits = 0.0;
  double tolerance = 0.0;
  bool verdict = false;
};

// Exact mutual information between a uniform input on [d]^{m0} and the
// output of m1 rounds of (permutation, corrupt coordinate 0) followed by a
// final permutation.  f_list holds m1+1 permutation tables on [0, d^{m0});
// kernels[i][y][c] is the probability the corrupted coordinate becomes y
// given value c.  Passes iff the information reaches (m0 - m1) log2 d within
// 1e-9.  Throws NotInvertible for a non-permutation table and InvalidState
// for a non-stochastic kernel.
ClassicalReport classical_bound_check(int d, int m0, int m1,
                                      const std::vector<std::vector<int>>& f_list,
                                      const std::vector<std::vector<std::vector<double>>>& kernels);

}  // namespace qnc
