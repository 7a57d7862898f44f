#include "qnc/network.hpp"

#include <algorithm>
#include <queue>
#include <string>

namespace qnc {

namespace {

// Identity outside `positions`, blk on them: y[pos_i] = sum_j blk[i][j] x[pos_j].
FqMatrix embed_field_map(const FqMatrix& blk, const std::vector<int>& positions, int m0) {
  FqMatrix big = FqMatrix::identity(blk.spec(), m0);
  for (std::size_t i = 0; i < positions.size(); ++i) {
    big.at(positions[i], positions[i]) = FieldElement::zero(blk.spec());
    for (std::size_t j = 0; j < positions.size(); ++j) {
      big.at(positions[i], positions[j]) = blk.at(i, j);
    }
  }
  return big;
}

std::vector<int> schedule(const DagNetwork& dag, const std::vector<std::vector<char>>& reach) {
  std::vector<int> order, pending = dag.corrupted;
  std::sort(pending.begin(), pending.end());
  auto precedes = [&](int a, int b) {
    return a != b && reach[dag.edges[a].to][dag.edges[b].from];
  };
  while (!pending.empty()) {
    auto it = std::find_if(pending.begin(), pending.end(), [&](int b) {
      return std::none_of(pending.begin(), pending.end(),
                          [&](int a) { return precedes(a, b); });
    });
    if (it == pending.end()) throw InternalError("corruption precedence has a cycle");
    order.push_back(*it);
    pending.erase(it);
  }
  return order;
}

// new[i] = old[perm[i]].
FqMatrix permutation_matrix(const FieldRef& spec, const std::vector<int>& perm) {
  FqMatrix p(spec, perm.size(), perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) p.at(i, perm[i]) = FieldElement::one(spec);
  return p;
}

FqMatrix block_diag_pair(const FqMatrix& a, const FqMatrix& d) {
  const int n = static_cast<int>(a.rows());
  FqMatrix g(a.spec(), 2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      g.at(i, j) = a.at(i, j);
      g.at(n + i, n + j) = d.at(i, j);
    }
  }
  return g;
}

}  // namespace

Layer symplectic_layer(FqMatrix g) {
  Layer l;
  l.symplectic = std::move(g);
  return l;
}

Layer basis_linear_layer(const FqMatrix& gbar) {
  if (gbar.rows() != gbar.cols()) throw DimensionError("basis-linear layer must be square");
  Layer l;
  l.symplectic = block_diag_pair(gbar, inverse(gbar).transpose());
  return l;
}

Layer dense_layer(DenseOperator u) {
  Layer l;
  l.dense = std::move(u);
  return l;
}

LayeredNetwork make_layered(const FieldRef& spec, int m0, std::vector<Layer> layers) {
  if (m0 < 1) throw DimensionError("network needs at least one channel");
  if (layers.empty()) throw DimensionError("layered network needs at least one interval unitary");
  const SymplecticContext ctx{spec, m0};
  const std::size_t dim = state_dim(spec, m0);
  for (const Layer& l : layers) {
    if (l.symplectic.has_value() == l.dense.has_value()) {
      throw ConfigError("layer must carry exactly one of a symplectic or a dense unitary");
    }
    if (l.symplectic) {
      if (!is_symplectic(*l.symplectic, ctx)) throw NotSymplectic("layer fails g^T J g = J");
    } else {
      if (static_cast<std::size_t>(l.dense->rows()) != dim || l.dense->rows() != l.dense->cols()) {
        throw DimensionError("dense layer size does not match q^{m0}");
      }
      if (!is_unitary(*l.dense)) throw InvalidState("dense layer is not unitary");
    }
  }
  LayeredNetwork net;
  net.spec = spec;
  net.m0 = m0;
  net.m1 = static_cast<int>(layers.size()) - 1;
  net.layers = std::move(layers);
  return net;
}

bool is_clifford(const LayeredNetwork& net) {
  return std::all_of(net.layers.begin(), net.layers.end(),
                     [](const Layer& l) { return l.symplectic.has_value(); });
}

bool is_basis_linear(const LayeredNetwork& net) {
  return std::all_of(net.layers.begin(), net.layers.end(), [&](const Layer& l) {
    return basis_linear_part(l, net.m0).has_value();
  });
}

std::optional<FqMatrix> basis_linear_part(const Layer& layer, int m0) {
  if (!layer.symplectic) return std::nullopt;
  const FqMatrix& g = *layer.symplectic;
  for (int i = 0; i < m0; ++i) {
    for (int j = 0; j < m0; ++j) {
      if (!g.at(i, m0 + j).is_zero() || !g.at(m0 + i, j).is_zero()) return std::nullopt;
    }
  }
  FqMatrix a(g.spec(), m0, m0);
  for (int i = 0; i < m0; ++i)
    for (int j = 0; j < m0; ++j) a.at(i, j) = g.at(i, j);
  return a;
}

std::vector<DenseOperator> layer_unitaries(const LayeredNetwork& net) {
  std::vector<DenseOperator> us;
  const SymplecticContext ctx{net.spec, net.m0};
  for (const Layer& l : net.layers) {
    if (l.dense) {
      us.push_back(*l.dense);
    } else if (auto gbar = basis_linear_part(l, net.m0)) {
      us.push_back(basis_linear_unitary(*gbar));
    } else {
      us.push_back(metaplectic(*l.symplectic, ctx).u);
    }
  }
  return us;
}

namespace {

struct DagInfo {
  int m0 = 0;
  std::vector<std::vector<int>> in_edges, out_edges;  // per node, ascending edge id
  std::vector<int> topo;                              // min node id first
  std::vector<std::vector<char>> reach;               // reflexive-transitive closure
  bool clifford = true;
};

DagInfo analyze(const DagNetwork& dag) {
  const int nn = static_cast<int>(dag.nodes.size());
  if (dag.sender < 0 || dag.sender >= nn || dag.receiver < 0 || dag.receiver >= nn ||
      dag.sender == dag.receiver) {
    throw ConfigError("sender and receiver must be distinct valid nodes");
  }
  DagInfo info;
  info.in_edges.resize(nn);
  info.out_edges.resize(nn);
  for (std::size_t e = 0; e < dag.edges.size(); ++e) {
    const DagEdge& ed = dag.edges[e];
    if (ed.from < 0 || ed.from >= nn || ed.to < 0 || ed.to >= nn) {
      throw ConfigError("edge endpoint out of range");
    }
    info.out_edges[ed.from].push_back(static_cast<int>(e));
    info.in_edges[ed.to].push_back(static_cast<int>(e));
  }

  // Kahn with a min-heap keeps the node order deterministic.
  std::vector<int> indeg(nn);
  for (int v = 0; v < nn; ++v) indeg[v] = static_cast<int>(info.in_edges[v].size());
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int v = 0; v < nn; ++v) {
    if (indeg[v] == 0) ready.push(v);
  }
  while (!ready.empty()) {
    const int v = ready.top();
    ready.pop();
    info.topo.push_back(v);
    for (int e : info.out_edges[v]) {
      if (--indeg[dag.edges[e].to] == 0) ready.push(dag.edges[e].to);
    }
  }
  if (static_cast<int>(info.topo.size()) != nn) throw NotADag("network graph contains a cycle");

  info.m0 = static_cast<int>(info.out_edges[dag.sender].size());
  if (info.m0 < 1) throw DegreeError("sender has no outgoing channel");
  if (!info.in_edges[dag.sender].empty()) throw DegreeError("sender has an incoming channel");
  if (!info.out_edges[dag.receiver].empty()) throw DegreeError("receiver has an outgoing channel");
  if (static_cast<int>(info.in_edges[dag.receiver].size()) != info.m0) {
    throw DegreeError("receiver in-degree differs from sender out-degree");
  }
  for (int v = 0; v < nn; ++v) {
    if (v == dag.sender || v == dag.receiver) {
      if (dag.nodes[v].basis_linear || dag.nodes[v].dense) {
        throw ConfigError("terminal nodes carry no unitary");
      }
      continue;
    }
    const std::size_t k = info.in_edges[v].size();
    if (k != info.out_edges[v].size()) throw DegreeError("intermediate in/out degree mismatch");
    const DagNode& node = dag.nodes[v];
    if (node.basis_linear && node.dense) throw ConfigError("node carries two unitaries");
    if (node.basis_linear) {
      if (node.basis_linear->rows() != node.basis_linear->cols() ||
          node.basis_linear->rows() != k) {
        throw DimensionError("node map size does not match its degree");
      }
      if (rank(*node.basis_linear) != static_cast<int>(k)) {
        throw SingularMatrix("node map is not invertible");
      }
    }
    if (node.dense) {
      info.clifford = false;
      if (static_cast<std::size_t>(node.dense->rows()) != state_dim(dag.spec, static_cast<int>(k)) ||
          node.dense->rows() != node.dense->cols()) {
        throw DimensionError("node unitary size does not match its degree");
      }
      if (!is_unitary(*node.dense)) throw InvalidState("node unitary fails the unitarity check");
    }
  }

  std::vector<char> seen(dag.edges.size(), 0);
  for (int e : dag.corrupted) {
    if (e < 0 || e >= static_cast<int>(dag.edges.size()) || seen[e]) {
      throw ConfigError("corrupted edges must be distinct valid edge ids");
    }
    seen[e] = 1;
  }

  info.reach.assign(nn, std::vector<char>(nn, 0));
  for (int i = static_cast<int>(info.topo.size()) - 1; i >= 0; --i) {
    const int v = info.topo[static_cast<std::size_t>(i)];
    info.reach[v][v] = 1;
    for (int e : info.out_edges[v]) {
      const int w = dag.edges[e].to;
      for (int u = 0; u < nn; ++u) info.reach[v][u] |= info.reach[w][u];
    }
  }
  return info;
}

struct Rewriter {
  const DagNetwork& dag;
  const DagInfo& info;
  std::vector<int> wire_of_edge;
  std::vector<char> fired;
  FqMatrix acc_bar;
  DenseOperator acc;

  Rewriter(const DagNetwork& d, const DagInfo& i)
      : dag(d),
        info(i),
        wire_of_edge(d.edges.size(), -1),
        fired(d.nodes.size(), 0),
        acc_bar(FqMatrix::identity(d.spec, i.m0)) {
    if (!info.clifford) {
      const std::size_t dim = state_dim(d.spec, i.m0);
      acc = DenseOperator::Identity(dim, dim);
    }
    for (std::size_t w = 0; w < info.out_edges[d.sender].size(); ++w) {
      wire_of_edge[info.out_edges[d.sender][w]] = static_cast<int>(w);
    }
    fired[d.sender] = 1;
  }

  void fire(int v) {
    fired[v] = 1;
    std::vector<int> positions;
    for (int e : info.in_edges[v]) {
      if (wire_of_edge[e] < 0) throw InternalError("node fired before its inputs exist");
      positions.push_back(wire_of_edge[e]);
      wire_of_edge[e] = -1;
    }
    const DagNode& node = dag.nodes[v];
    if (node.basis_linear) {
      if (info.clifford) {
        acc_bar = embed_field_map(*node.basis_linear, positions, info.m0) * acc_bar;
      } else {
        acc = embed_on_registers(basis_linear_unitary(*node.basis_linear), positions, info.m0,
                                 dag.spec->q()) *
              acc;
      }
    } else if (node.dense) {
      acc = embed_on_registers(*node.dense, positions, info.m0, dag.spec->q()) * acc;
    }
    for (std::size_t i = 0; i < positions.size(); ++i) {
      wire_of_edge[info.out_edges[v][i]] = positions[i];
    }
  }

  // Fires every unfired ancestor of `target` in topological order.
  void fire_ancestors(int target) {
    for (int v : info.topo) {
      if (!fired[v] && info.reach[v][target]) fire(v);
    }
  }

  void apply_permutation(const std::vector<int>& perm) {
    if (info.clifford) {
      acc_bar = permutation_matrix(dag.spec, perm) * acc_bar;
    } else {
      acc = basis_linear_unitary(permutation_matrix(dag.spec, perm)) * acc;
    }
    std::vector<int> next(wire_of_edge.size(), -1);
    std::vector<int> inv(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = static_cast<int>(i);
    for (std::size_t e = 0; e < wire_of_edge.size(); ++e) {
      if (wire_of_edge[e] >= 0) next[e] = inv[wire_of_edge[e]];
    }
    wire_of_edge = next;
  }

  Layer finish_layer() {
    Layer l = info.clifford ? basis_linear_layer(acc_bar) : dense_layer(acc);
    acc_bar = FqMatrix::identity(dag.spec, info.m0);
    if (!info.clifford) {
      const std::size_t dim = state_dim(dag.spec, info.m0);
      acc = DenseOperator::Identity(dim, dim);
    }
    return l;
  }
};

}  // namespace

std::vector<int> corruption_schedule(const DagNetwork& dag) {
  return schedule(dag, analyze(dag).reach);
}

LayeredNetwork reorganize(const DagNetwork& dag) {
  const DagInfo info = analyze(dag);
  Rewriter rw(dag, info);
  std::vector<Layer> layers;

  for (int c : schedule(dag, info.reach)) {
    rw.fire_ancestors(dag.edges[c].from);
    const int w = rw.wire_of_edge[c];
    if (w < 0) throw InternalError("corrupted edge missing after its source fired");
    std::vector<int> swap(info.m0);
    for (int i = 0; i < info.m0; ++i) swap[i] = i;
    std::swap(swap[0], swap[w]);
    rw.apply_permutation(swap);
    layers.push_back(rw.finish_layer());
  }

  for (int v : info.topo) {
    if (!rw.fired[v] && v != dag.receiver) rw.fire(v);
  }
  std::vector<int> out_perm(info.m0);
  for (int i = 0; i < info.m0; ++i) {
    const int w = rw.wire_of_edge[info.in_edges[dag.receiver][i]];
    if (w < 0) throw InternalError("receiver input missing after all nodes fired");
    out_perm[i] = w;
  }
  rw.apply_permutation(out_perm);
  layers.push_back(rw.finish_layer());

  return make_layered(dag.spec, info.m0, std::move(layers));
}

}  // namespace qnc
