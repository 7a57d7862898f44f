#pragma once

#include <optional>
#include <vector>

#include "qnc/field.hpp"
#include "qnc/linalg.hpp"
#include "qnc/symplectic.hpp"
#include "qnc/weyl.hpp"

namespace qnc {

// One interval unitary of the layered normal form: either a symplectic label
// action (Clifford layer) or an opaque dense unitary.
struct Layer {
  std::optional<FqMatrix> symplectic;  // 2 m0 x 2 m0
  std::optional<DenseOperator> dense;  // q^m0 x q^m0
};

Layer symplectic_layer(FqMatrix g);
// Expands gbar to block-diag(gbar, (gbar^{-1})^T).
Layer basis_linear_layer(const FqMatrix& gbar);
Layer dense_layer(DenseOperator u);

// Layered normal form: m1 + 1 interval unitaries U_0 .. U_{m1}; the corrupted
// system of interval i is register 1.
struct LayeredNetwork {
  FieldRef spec;
  int m0 = 0;
  int m1 = 0;
  std::vector<Layer> layers;
};

// Validates layer count and shapes, symplectic and unitarity conditions.
LayeredNetwork make_layered(const FieldRef& spec, int m0, std::vector<Layer> layers);

bool is_clifford(const LayeredNetwork& net);
bool is_basis_linear(const LayeredNetwork& net);

// The m0 x m0 block of a basis-linear layer, if the layer is one.
std::optional<FqMatrix> basis_linear_part(const Layer& layer, int m0);

// Dense unitaries of every layer; basis-linear layers map basis states
// directly, other Clifford layers go through metaplectic synthesis.
std::vector<DenseOperator> layer_unitaries(const LayeredNetwork& net);

// A node transforms its in-edges (in edge-id order) into its out-edges (same
// order); absent operators mean wire-through.  basis_linear is k x k over the
// field, dense is q^k x q^k.
struct DagNode {
  std::optional<FqMatrix> basis_linear;
  std::optional<DenseOperator> dense;
};

struct DagEdge {
  int from = 0;
  int to = 0;
};

// Acyclic single-sender single-receiver network; edge ids are positions in
// `edges`, node ids positions in `nodes`; `corrupted` lists attacked edges.
struct DagNetwork {
  FieldRef spec;
  int sender = 0;
  int receiver = 0;
  std::vector<DagNode> nodes;
  std::vector<DagEdge> edges;
  std::vector<int> corrupted;
};

// Rewrites the DAG into the layered normal form: node unitaries are scheduled
// topologically between corruptions and every interval ends with the wire
// permutation that brings the next corrupted edge to register 1.  Corruptions
// with no forced order are applied lowest edge id first.
LayeredNetwork reorganize(const DagNetwork& dag);

// The corrupted edge handled in each interval, in interval order; callers
// attaching per-edge channels to the reorganized network need this map.
std::vector<int> corruption_schedule(const DagNetwork& dag);

}  // namespace qnc
