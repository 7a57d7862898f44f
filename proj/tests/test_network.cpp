#include <doctest.h>

#include <algorithm>
#include <complex>
#include <random>
#include <vector>

#include "qnc/errors.hpp"
#include "qnc/field.hpp"
#include "qnc/linalg.hpp"
#include "qnc/network.hpp"
#include "qnc/weyl.hpp"

using namespace qnc;
using cx = std::complex<double>;

namespace {

FqMatrix make_mat(const FieldRef& spec, const std::vector<std::vector<int>>& rows) {
  FqMatrix m(spec, rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m.at(i, j) = FieldElement::from_int(spec, rows[i][j]);
  return m;
}

double max_abs(const DenseOperator& m) { return m.cwiseAbs().maxCoeff(); }

DenseOperator haar_unitary(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  DenseOperator a(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) a(i, j) = cx(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<DenseOperator> qr(a);
  DenseOperator q = qr.householderQ();
  DenseOperator r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (std::size_t i = 0; i < dim; ++i) q.col(i) *= r(i, i) / std::abs(r(i, i));
  return q;
}

// Trace-preserving Kraus pair from a random isometry.
std::vector<DenseOperator> random_channel(std::size_t dim, std::mt19937_64& rng) {
  DenseOperator big = haar_unitary(2 * dim, rng);
  std::vector<DenseOperator> ks;
  ks.push_back(big.block(0, 0, dim, dim));
  ks.push_back(big.block(dim, 0, dim, dim));
  return ks;
}

FqMatrix random_invertible(const FieldRef& spec, int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> code(0, spec->q() - 1);
  FqMatrix a(spec, n, n);
  do {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a.at(i, j) = FieldElement::from_int(spec, code(rng));
  } while (rank(a) != n);
  return a;
}

void apply_channel_at(DenseOperator& rho, const std::vector<DenseOperator>& ks, int position,
                      int n, int q) {
  DenseOperator out = DenseOperator::Zero(rho.rows(), rho.cols());
  for (const DenseOperator& k : ks) {
    DenseOperator ke = embed_on_registers(k, {position}, n, q);
    out += ke * rho * ke.adjoint();
  }
  rho = out;
}

// Reference run of the layered form: U_0, then channel-on-register-1 / U_i.
DenseOperator run_layered(const LayeredNetwork& net,
                          const std::vector<std::vector<DenseOperator>>& channels,
                          DenseOperator rho) {
  const auto us = layer_unitaries(net);
  rho = us[0] * rho * us[0].adjoint();
  for (int i = 1; i <= net.m1; ++i) {
    apply_channel_at(rho, channels[i - 1], 0, net.m0, net.spec->q());
    rho = us[i] * rho * us[i].adjoint();
  }
  return rho;
}

// Independent oracle: simulate the DAG on one register per edge.  Nodes fire
// in topological order, moving their output onto the out-edge registers; the
// channel of a corrupted edge is applied as soon as the edge is created.
DenseOperator run_dag_oracle(const DagNetwork& dag,
                             const std::vector<std::vector<DenseOperator>>& channel_of,
                             const DenseOperator& rho_in) {
  const int q = dag.spec->q();
  const int ne = static_cast<int>(dag.edges.size());
  const std::size_t dim = state_dim(dag.spec, ne);

  std::vector<std::vector<int>> in_edges(dag.nodes.size()), out_edges(dag.nodes.size());
  for (int e = 0; e < ne; ++e) {
    out_edges[dag.edges[e].from].push_back(e);
    in_edges[dag.edges[e].to].push_back(e);
  }
  auto corrupt = [&](DenseOperator& rho, int edge) {
    for (std::size_t c = 0; c < dag.corrupted.size(); ++c) {
      if (dag.corrupted[c] == edge) apply_channel_at(rho, channel_of[c], edge, ne, q);
    }
  };

  // Isometry placing the sender state on its out-edge registers.
  const int m0 = static_cast<int>(out_edges[dag.sender].size());
  const std::size_t small = state_dim(dag.spec, m0);
  DenseOperator inject = DenseOperator::Zero(dim, small);
  for (std::size_t idx = 0; idx < small; ++idx) {
    FqVector digits = decode_state_index(dag.spec, m0, idx);
    FqVector full(dag.spec, ne);
    for (int i = 0; i < m0; ++i) full[out_edges[dag.sender][i]] = digits[i];
    inject(encode_state_index(full), idx) = 1.0;
  }
  DenseOperator rho = inject * rho_in * inject.adjoint();
  for (int e : out_edges[dag.sender]) corrupt(rho, e);

  // Node ids in the tests are already topological.
  DenseOperator swap2(q * q, q * q);
  swap2.setZero();
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b) swap2(b * q + a, a * q + b) = 1.0;
  for (int v = 0; v < static_cast<int>(dag.nodes.size()); ++v) {
    if (v == dag.sender || v == dag.receiver || in_edges[v].empty()) continue;
    DenseOperator u;
    if (dag.nodes[v].dense) {
      u = *dag.nodes[v].dense;
    } else if (dag.nodes[v].basis_linear) {
      u = basis_linear_unitary(*dag.nodes[v].basis_linear);
    } else {
      u = DenseOperator::Identity(state_dim(dag.spec, static_cast<int>(in_edges[v].size())),
                                  state_dim(dag.spec, static_cast<int>(in_edges[v].size())));
    }
    DenseOperator ue = embed_on_registers(u, in_edges[v], ne, q);
    rho = ue * rho * ue.adjoint();
    for (std::size_t i = 0; i < in_edges[v].size(); ++i) {
      DenseOperator se = embed_on_registers(swap2, {in_edges[v][i], out_edges[v][i]}, ne, q);
      rho = se * rho * se.adjoint();
      corrupt(rho, out_edges[v][i]);
    }
  }

  // Read out the receiver registers; everything else is back to |0>.
  DenseOperator extract = DenseOperator::Zero(dim, small);
  for (std::size_t idx = 0; idx < small; ++idx) {
    FqVector digits = decode_state_index(dag.spec, m0, idx);
    FqVector full(dag.spec, ne);
    for (int i = 0; i < m0; ++i) full[in_edges[dag.receiver][i]] = digits[i];
    extract(encode_state_index(full), idx) = 1.0;
  }
  DenseOperator out = extract.adjoint() * rho * extract;
  REQUIRE(std::abs(out.trace().real() - rho.trace().real()) < 1e-9);
  return out;
}

DenseOperator random_density(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  DenseOperator a(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) a(i, j) = cx(gauss(rng), gauss(rng));
  DenseOperator rho = a * a.adjoint();
  return rho / rho.trace();
}

}  // namespace

TEST_SUITE_BEGIN("network");

TEST_CASE("layer validation") {
  auto f2 = make_field(2);
  CHECK_THROWS_AS(make_layered(f2, 0, {}), DimensionError);
  CHECK_THROWS_AS(make_layered(f2, 1, {}), DimensionError);

  Layer both = basis_linear_layer(FqMatrix::identity(f2, 2));
  both.dense = DenseOperator::Identity(4, 4);
  CHECK_THROWS_AS(make_layered(f2, 2, {both}), ConfigError);

  FqMatrix bad = FqMatrix::identity(f2, 4);
  bad.at(0, 1) = FieldElement::one(f2);
  CHECK_THROWS_AS(make_layered(f2, 2, {symplectic_layer(bad)}), NotSymplectic);

  CHECK_THROWS_AS(make_layered(f2, 2, {dense_layer(DenseOperator::Identity(3, 3))}),
                  DimensionError);
  DenseOperator nu = DenseOperator::Identity(4, 4);
  nu(0, 0) = 2.0;
  CHECK_THROWS_AS(make_layered(f2, 2, {dense_layer(nu)}), InvalidState);

  std::mt19937_64 rng(1);
  auto net = make_layered(f2, 2,
                          {basis_linear_layer(make_mat(f2, {{1, 1}, {0, 1}})),
                           dense_layer(haar_unitary(4, rng))});
  CHECK(net.m1 == 1);
  CHECK(!is_clifford(net));
  CHECK(!is_basis_linear(net));
  CHECK(basis_linear_part(net.layers[0], 2).has_value());
  CHECK(*basis_linear_part(net.layers[0], 2) == make_mat(f2, {{1, 1}, {0, 1}}));
}

TEST_CASE("layer unitaries synthesize each representation") {
  auto f2 = make_field(2);
  SymplecticContext ctx{f2, 1};
  FqMatrix gbar = make_mat(f2, {{1}});
  auto net = make_layered(f2, 1,
                          {basis_linear_layer(gbar), symplectic_layer(ctx.J()),
                           dense_layer(DenseOperator::Identity(2, 2))});
  auto us = layer_unitaries(net);
  REQUIRE(us.size() == 3);
  CHECK(max_abs(us[0] - DenseOperator::Identity(2, 2)) < 1e-12);
  CHECK(max_abs(us[1] - fourier_unitary(f2, 1)) < 1e-9);
  CHECK(max_abs(us[2] - DenseOperator::Identity(2, 2)) < 1e-12);
}

TEST_CASE("reorganize wires only") {
  auto f2 = make_field(2);
  // Sender 0, receiver 1, two direct edges; corruption on edge 0.
  DagNetwork dag;
  dag.spec = f2;
  dag.sender = 0;
  dag.receiver = 1;
  dag.nodes.resize(2);
  dag.edges = {{0, 1}, {0, 1}};
  dag.corrupted = {0};
  auto net = reorganize(dag);
  CHECK(net.m0 == 2);
  CHECK(net.m1 == 1);
  REQUIRE(net.layers.size() == 2);
  for (const Layer& l : net.layers) {
    auto gbar = basis_linear_part(l, 2);
    REQUIRE(gbar.has_value());
    CHECK(*gbar == FqMatrix::identity(f2, 2));
  }
  CHECK(corruption_schedule(dag) == std::vector<int>{0});

  // Corrupting the other edge instead needs one swap.
  dag.corrupted = {1};
  auto swapped = reorganize(dag);
  CHECK(*basis_linear_part(swapped.layers[0], 2) == make_mat(f2, {{0, 1}, {1, 0}}));
  CHECK(*basis_linear_part(swapped.layers[1], 2) == make_mat(f2, {{0, 1}, {1, 0}}));
}

TEST_CASE("reorganize rejects malformed graphs") {
  auto f2 = make_field(2);
  DagNetwork dag;
  dag.spec = f2;
  dag.sender = 0;
  dag.receiver = 1;
  dag.nodes.resize(3);
  dag.edges = {{0, 2}, {2, 2}, {2, 1}};
  CHECK_THROWS_AS(reorganize(dag), NotADag);

  dag.edges = {{0, 2}, {2, 1}, {2, 1}};  // node 2: in 1, out 2
  CHECK_THROWS_AS(reorganize(dag), DegreeError);

  dag.edges = {{0, 2}, {0, 2}, {2, 1}, {2, 1}};
  dag.corrupted = {0, 0};
  CHECK_THROWS_AS(reorganize(dag), ConfigError);

  dag.corrupted = {0};
  CHECK_NOTHROW(reorganize(dag));

  DagNetwork back = dag;
  back.nodes.resize(4);
  back.edges.push_back({1, 3});  // receiver with an outgoing channel
  CHECK_THROWS_AS(reorganize(back), DegreeError);
}

TEST_CASE("reorganize keeps six wires as permutations") {
  auto f2 = make_field(2);
  // Three pass-through nodes on six wires, two corruptions downstream.
  DagNetwork dag;
  dag.spec = f2;
  dag.sender = 0;
  dag.receiver = 4;
  dag.nodes.resize(5);
  dag.edges = {
      {0, 1}, {0, 1}, {0, 2}, {0, 2}, {0, 3}, {0, 3},  // sender fan-out
      {1, 4}, {1, 4}, {2, 4}, {2, 4}, {3, 4}, {3, 4},  // into the receiver
  };
  dag.corrupted = {7, 10};
  auto net = reorganize(dag);
  CHECK(net.m0 == 6);
  CHECK(net.m1 == 2);
  for (const Layer& l : net.layers) {
    auto gbar = basis_linear_part(l, 6);
    REQUIRE(gbar.has_value());
    for (int i = 0; i < 6; ++i) {
      int ones = 0;
      for (int j = 0; j < 6; ++j) {
        if (!gbar->at(i, j).is_zero()) {
          ++ones;
          CHECK(gbar->at(i, j) == FieldElement::one(f2));
        }
      }
      CHECK(ones == 1);
    }
  }
}

TEST_CASE("reorganize embeds an intermediate block") {
  auto f2 = make_field(2);
  FqMatrix gbar = make_mat(f2, {{1, 1}, {0, 1}});
  DagNetwork dag;
  dag.spec = f2;
  dag.sender = 0;
  dag.receiver = 2;
  dag.nodes.resize(3);
  dag.nodes[1].basis_linear = gbar;
  dag.edges = {{0, 1}, {0, 1}, {0, 2}, {1, 2}, {1, 2}};
  dag.corrupted = {3};  // downstream of the node
  auto net = reorganize(dag);
  CHECK(net.m1 == 1);
  REQUIRE(is_basis_linear(net));
  // The node fires before the corruption and edge 3 already sits on wire 0,
  // so U_0 is just the block embedded on wires 0 and 1; U_1 restores the
  // receiver order (edges 2, 3, 4) from wires (2, 0, 1).
  FqMatrix embedded = make_mat(f2, {{1, 1, 0}, {0, 1, 0}, {0, 0, 1}});
  CHECK(*basis_linear_part(net.layers[0], 3) == embedded);
  CHECK(*basis_linear_part(net.layers[1], 3) == make_mat(f2, {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}}));
}

TEST_CASE("reorganize matches the edge-space oracle") {
  auto f2 = make_field(2);
  std::mt19937_64 rng(2026);
  std::uniform_int_distribution<int> m0_pick(2, 3), node_pick(0, 2), op_pick(0, 2);
  for (int trial = 0; trial < 30; ++trial) {
    const int m0 = m0_pick(rng);
    const int inner = node_pick(rng);
    DagNetwork dag;
    dag.spec = f2;
    dag.sender = 0;
    dag.receiver = inner + 1;
    dag.nodes.resize(inner + 2);

    // Edges are created in waves; every intermediate consumes from the pool.
    std::vector<int> pool;
    for (int i = 0; i < m0; ++i) {
      dag.edges.push_back({0, -1});
      pool.push_back(static_cast<int>(dag.edges.size()) - 1);
    }
    const bool dense_net = trial % 2 == 1;
    for (int v = 1; v <= inner; ++v) {
      std::uniform_int_distribution<int> deg_pick(1, std::min<int>(2, m0));
      const int deg = deg_pick(rng);
      for (int d = 0; d < deg; ++d) {
        std::uniform_int_distribution<int> which(0, static_cast<int>(pool.size()) - 1);
        const int slot = which(rng);
        dag.edges[pool[slot]].to = v;
        pool.erase(pool.begin() + slot);
      }
      for (int d = 0; d < deg; ++d) {
        dag.edges.push_back({v, -1});
        pool.push_back(static_cast<int>(dag.edges.size()) - 1);
      }
      if (dense_net) {
        dag.nodes[v].dense = haar_unitary(state_dim(f2, deg), rng);
      } else if (op_pick(rng) != 0) {
        dag.nodes[v].basis_linear = random_invertible(f2, deg, rng);
      }
    }
    for (int e : pool) dag.edges[e].to = dag.receiver;

    std::vector<int> ids(dag.edges.size());
    std::uniform_int_distribution<int> cnum(1, 2);
    const int nc = cnum(rng);
    std::vector<int> corrupted;
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
    std::shuffle(ids.begin(), ids.end(), rng);
    for (int i = 0; i < nc; ++i) corrupted.push_back(ids[i]);
    dag.corrupted = corrupted;

    auto net = reorganize(dag);
    CHECK(net.m0 == m0);
    CHECK(net.m1 == nc);
    if (!dense_net) CHECK(is_basis_linear(net));

    std::vector<std::vector<DenseOperator>> channel_of;
    for (int i = 0; i < nc; ++i) channel_of.push_back(random_channel(2, rng));
    const auto order = corruption_schedule(dag);
    std::vector<std::vector<DenseOperator>> by_interval;
    for (int e : order) {
      for (std::size_t c = 0; c < dag.corrupted.size(); ++c) {
        if (dag.corrupted[c] == e) by_interval.push_back(channel_of[c]);
      }
    }
    REQUIRE(by_interval.size() == static_cast<std::size_t>(nc));

    DenseOperator rho_in = random_density(state_dim(f2, m0), rng);
    DenseOperator via_dag = run_dag_oracle(dag, channel_of, rho_in);
    DenseOperator via_layers = run_layered(net, by_interval, rho_in);
    CHECK(max_abs(via_dag - via_layers) < 1e-9);
  }
}

TEST_SUITE_END();
