#include <doctest.h>

#include <utility>
#include <vector>

#include "qnc/constructions.hpp"
#include "qnc/errors.hpp"
#include "qnc/linalg.hpp"
#include "qnc/symplectic.hpp"

using namespace qnc;

namespace {

// Pullback vectors recomputed from the layers by the literal products
// gbar_0^{-1}..gbar_{i-1}^{-1} e_1 and gbar_0^T..gbar_{i-1}^T e_1, kept
// independent of the telescoped generator formulas.
std::pair<std::vector<FqVector>, std::vector<FqVector>> pullbacks(const LayeredNetwork& net) {
  std::vector<FqVector> vbar, vbar_prime;
  FqMatrix acc = FqMatrix::identity(net.spec, net.m0);
  FqMatrix acc_prime = FqMatrix::identity(net.spec, net.m0);
  for (int i = 1; i <= net.m1; ++i) {
    const FqMatrix gbar = *basis_linear_part(net.layers[i - 1], net.m0);
    acc = acc * inverse(gbar);
    acc_prime = acc_prime * gbar.transpose();
    vbar.push_back(acc.column(0));
    vbar_prime.push_back(acc_prime.column(0));
  }
  return {vbar, vbar_prime};
}

struct MeasuredRanks {
  int l1, l2, l3;
};

MeasuredRanks measure(const LayeredNetwork& net) {
  auto [vbar, vbar_prime] = pullbacks(net);
  const FqMatrix vb = FqMatrix::from_columns(vbar);
  const FqMatrix vbp = FqMatrix::from_columns(vbar_prime);
  return {rank(vb), rank(vbp), rank(vbp.transpose() * vb)};
}

// Split embedding of the pullbacks into phase space, for the invariants.
std::vector<FqVector> phase_space_errors(const LayeredNetwork& net) {
  auto [vbar, vbar_prime] = pullbacks(net);
  std::vector<FqVector> v;
  for (const FqVector& b : vbar) {
    FqVector full(net.spec, 2 * net.m0);
    for (int j = 0; j < net.m0; ++j) full[j] = b[j];
    v.push_back(full);
  }
  for (const FqVector& b : vbar_prime) {
    FqVector full(net.spec, 2 * net.m0);
    for (int j = 0; j < net.m0; ++j) full[net.m0 + j] = b[j];
    v.push_back(full);
  }
  return v;
}

FqVector unit(const FieldRef& spec, int n, int i) { return FqVector::unit(spec, n, i); }

}  // namespace

TEST_SUITE_BEGIN("constructions");

TEST_CASE("triple validation") {
  CHECK_NOTHROW(validate({1, 1, 1, 1, 1}));
  CHECK_NOTHROW(validate({3, 2, 1, 4, 3}));
  CHECK_THROWS_AS(validate({1, 1, 0, 2, 1}), InvalidTriple);  // l3 < 1
  CHECK_THROWS_AS(validate({2, 1, 1, 3, 1}), InvalidTriple);  // l1 > m1
  CHECK_THROWS_AS(validate({1, 2, 1, 3, 1}), InvalidTriple);  // l2 > m1
  CHECK_THROWS_AS(validate({2, 2, 1, 2, 2}), InvalidTriple);  // m0 < l1+l2-l3
  CHECK_THROWS_AS(validate({1, 1, 2, 5, 3}), InvalidTriple);  // l3 > l1
}

TEST_CASE("all-ones-rank profile pins every pullback to the first axis") {
  for (int p : {2, 3}) {
    auto spec = make_field(p);
    auto net = rank_triple_network({1, 1, 1, 2, 3}, spec);
    CHECK(net.m1 == 3);
    auto [vbar, vbar_prime] = pullbacks(net);
    for (const FqVector& v : vbar) CHECK(v == unit(spec, 2, 0));
    for (const FqVector& v : vbar_prime) CHECK(v == unit(spec, 2, 0));
    auto r = measure(net);
    CHECK(r.l1 == 1);
    CHECK(r.l2 == 1);
    CHECK(r.l3 == 1);
  }
}

TEST_CASE("profile (2,2,1) produces the paired shear directions") {
  auto f2 = make_field(2);
  auto net = rank_triple_network({2, 2, 1, 4, 2}, f2);
  auto [vbar, vbar_prime] = pullbacks(net);
  REQUIRE(vbar.size() == 2);
  CHECK(vbar[0] == unit(f2, 4, 0));
  CHECK(vbar[1] == unit(f2, 4, 0) + unit(f2, 4, 1));
  CHECK(vbar_prime[0] == unit(f2, 4, 0));
  CHECK(vbar_prime[1] == unit(f2, 4, 0) + unit(f2, 4, 2));
  // The pairing matrix is all ones, rank 1.
  const FqMatrix prod =
      FqMatrix::from_columns(vbar_prime).transpose() * FqMatrix::from_columns(vbar);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(prod.at(i, j) == FieldElement::one(f2));
  CHECK(rank(prod) == 1);
}

TEST_CASE("profile (2,1,1) raises only the shift-side rank") {
  auto f2 = make_field(2);
  auto net = rank_triple_network({2, 1, 1, 3, 2}, f2);
  auto r = measure(net);
  CHECK(r.l1 == 2);
  CHECK(r.l2 == 1);
  CHECK(r.l3 == 1);
}

TEST_CASE("swapped profile exchanges the two ranks") {
  auto f3 = make_field(3);
  auto net = rank_triple_network({1, 2, 1, 3, 2}, f3);
  auto r = measure(net);
  CHECK(r.l1 == 1);
  CHECK(r.l2 == 2);
  CHECK(r.l3 == 1);
}

TEST_CASE("exhaustive realization over small fields") {
  for (int p : {2, 3}) {
    auto spec = make_field(p);
    for (int m1 = 1; m1 <= 3; ++m1) {
      for (int m0 = 1; m0 <= 5; ++m0) {
        for (int l1 = 1; l1 <= m1; ++l1) {
          for (int l2 = 1; l2 <= m1; ++l2) {
            for (int l3 = 1; l3 <= std::min(l1, l2); ++l3) {
              RankTriple t{l1, l2, l3, m0, m1};
              if (m0 < l1 + l2 - l3) {
                CHECK_THROWS_AS(rank_triple_network(t, spec), InvalidTriple);
                continue;
              }
              auto net = rank_triple_network(t, spec);
              REQUIRE(net.m0 == m0);
              REQUIRE(net.m1 == m1);
              REQUIRE(is_basis_linear(net));
              auto r = measure(net);
              CHECK(r.l1 == l1);
              CHECK(r.l2 == l2);
              CHECK(r.l3 == l3);
              // Measured ranks land back inside the realizable region.
              CHECK_NOTHROW(validate({r.l1, r.l2, r.l3, m0, m1}));
              // Invariants of the corrupted direction space.
              const SymplecticContext ctx{spec, m0};
              auto [ms, mss] = compute_invariants(phase_space_errors(net), ctx, m1);
              CHECK(ms == l3);
              CHECK(mss == l1 + l2 - l3);
            }
          }
        }
      }
    }
  }
}

TEST_CASE("worst case profile") {
  auto f2 = make_field(2);
  CHECK_THROWS_AS(worst_case_network(2, 2, f2), InvalidTriple);

  const SymplecticContext ctx4{f2, 4};
  auto net = worst_case_network(4, 2, f2);
  auto [ms, mss] = compute_invariants(phase_space_errors(net), ctx4, 2);
  CHECK(ms == 1);
  CHECK(mss == 3);

  const SymplecticContext ctx2{f2, 2};
  auto single = worst_case_network(2, 1, f2);
  auto [ms1, mss1] = compute_invariants(phase_space_errors(single), ctx2, 1);
  CHECK(ms1 == 1);
  CHECK(mss1 == 1);

  const SymplecticContext ctx6{f2, 6};
  auto fig = worst_case_network(6, 2, f2);
  auto [msf, mssf] = compute_invariants(phase_space_errors(fig), ctx6, 2);
  CHECK(msf == 1);
  CHECK(mssf == 3);  // rate (6-3) log q
}

TEST_CASE("identity network") {
  auto f3 = make_field(3);
  auto net = identity_network(3, 2, f3);
  CHECK(net.m0 == 3);
  CHECK(net.m1 == 2);
  CHECK(is_basis_linear(net));
  for (const Layer& l : net.layers) {
    CHECK(*basis_linear_part(l, 3) == FqMatrix::identity(f3, 3));
  }
}

TEST_SUITE_END();
