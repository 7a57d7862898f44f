#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <variant>
#include <vector>

#include "qnc/network.hpp"

namespace qnc {

// Validated state: Hermitian within 1e-12, eigenvalues >= -1e-10, unit trace
// within 1e-10.  Throws InvalidState otherwise.
class DensityMatrix {
 public:
  explicit DensityMatrix(DenseOperator m);

  static DensityMatrix pure(const StateVector& psi);
  static DensityMatrix basis_state(std::size_t dim, std::size_t k);
  static DensityMatrix maximally_mixed(std::size_t dim);

  const DenseOperator& matrix() const { return m_; }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }

 private:
  DenseOperator m_;
};

// Trace-preserving Kraus set on one system: sum K^dag K = I within 1e-10.
class KrausChannel {
 public:
  explicit KrausChannel(std::vector<DenseOperator> kraus);

  static KrausChannel identity(std::size_t dim);

  const std::vector<DenseOperator>& kraus() const { return ks_; }
  std::size_t dim() const { return static_cast<std::size_t>(ks_.front().rows()); }

  // sum_k K_k op K_k^dag; linear, accepts arbitrary operators.
  DenseOperator apply(const DenseOperator& op) const;

 private:
  std::vector<DenseOperator> ks_;
};

// Unitary attack with persistent memory: step i acts on the corrupted
// register tensored with the memory (register first, memory second).
struct AdaptiveAdversary {
  int memory_dim = 1;
  StateVector memory_init;            // memory_dim entries, unit norm
  std::vector<DenseOperator> steps;   // m1 unitaries of size q*memory_dim
};

struct Individual {
  std::vector<KrausChannel> gammas;  // one per interval
};
struct Adaptive {
  AdaptiveAdversary adversary;
};
// Replaces the corrupted register by the completely mixed state.
struct MixSubstitution {};

using CorruptionModel = std::variant<Individual, Adaptive, MixSubstitution>;

// a (x) b with a as the more significant factor.
DenseOperator tensor(const DenseOperator& a, const DenseOperator& b);

// Operator on the registers listed in `positions` (in that order) embedded
// into the space with per-register dimensions `dims`, identity elsewhere.
// Generalizes embed_on_registers to non-uniform register sizes.
DenseOperator embed_mixed(const DenseOperator& op, const std::vector<int>& positions,
                          const std::vector<std::size_t>& dims);

// Reduced operator on the registers in `keep` (strictly increasing), tracing
// out the rest.
DenseOperator partial_trace(const DenseOperator& rho, const std::vector<std::size_t>& dims,
                            const std::vector<int>& keep);

// Linear action of the corrupted network on an arbitrary operator of size
// q^m0: U_0 first, then per interval the corruption on register 1 followed
// by U_i.  Throws ResourceLimit when q^m0 (times the adversary memory, if
// any) exceeds 4096.
DenseOperator apply_network(const LayeredNetwork& net, const CorruptionModel& model,
                            const DenseOperator& op);

// Validated wrappers over apply_network.
DensityMatrix run_network(const LayeredNetwork& net, const CorruptionModel& model,
                          const DensityMatrix& rho_in);
DensityMatrix run_individual(const LayeredNetwork& net, const std::vector<KrausChannel>& gammas,
                             const DensityMatrix& rho_in);
DensityMatrix run_adaptive(const LayeredNetwork& net, const AdaptiveAdversary& adv,
                           const DensityMatrix& rho_in);
DensityMatrix run_mix_substitution(const LayeredNetwork& net, const DensityMatrix& rho_in);

// <Phi| (map (x) Id)(|Phi><Phi|) |Phi> for the maximally entangled |Phi> on
// dim x dim; `map` must be the linear channel action, defined on arbitrary
// operators (it is evaluated on matrix units).
double entanglement_fidelity(std::size_t dim,
                             const std::function<DenseOperator(const DenseOperator&)>& map);

// Deterministic random source: explicit Box-Muller over mt19937_64 so the
// stream is reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform();  // [0, 1)
  double normal();
  std::uint64_t integer(std::uint64_t bound);  // [0, bound)

  DenseOperator haar_unitary(std::size_t dim);
  StateVector haar_state(std::size_t dim);
  KrausChannel kraus_channel(std::size_t dim, int count);
  DensityMatrix density(std::size_t dim);
  AdaptiveAdversary adversary(int q, int m1, int memory_dim);

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace qnc
