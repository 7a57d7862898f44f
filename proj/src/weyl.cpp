#include "qnc/weyl.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace qnc {

namespace {

std::complex<double> root_of_unity(long long k, int order) {
  k = ((k % order) + order) % order;
  // Axis-aligned roots are returned exactly; polar() would leave sin(pi)
  // sized residue that exactness-sensitive callers notice.
  if (4 * k % order == 0) {
    switch (4 * k / order) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      case 3: return {0.0, -1.0};
    }
  }
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / order);
}

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

int mod_inverse(int a, int p) {
  for (int x = 1; x < p; ++x) {
    if ((a * x) % p == 1) return x;
  }
  throw InternalError("no modular inverse");
}

// Sum of tr(x_i y_i) mod p: the phase exponent of Z(y) at |x>.
int trace_dot(const FqVector& x, const FqVector& y) {
  int e = 0;
  for (std::size_t i = 0; i < x.size(); ++i) e += ff_trace(x[i] * y[i]);
  return e % x.spec()->p;
}

FqVector stack_label(const WeylLabel& lab) {
  const int n = lab.registers();
  FqVector st(lab.spec(), 2 * n);
  for (int i = 0; i < n; ++i) {
    st[i] = lab.s[i];
    st[n + i] = lab.t[i];
  }
  return st;
}

WeylLabel split_label(const FqVector& st) {
  const int n = static_cast<int>(st.size()) / 2;
  FqVector s(st.spec(), n), t(st.spec(), n);
  for (int i = 0; i < n; ++i) {
    s[i] = st[i];
    t[i] = st[n + i];
  }
  return WeylLabel(std::move(s), std::move(t));
}

// Diagonal of w^{inv2 * tr(x^T gamma x)}; odd characteristic only.
DenseOperator quadratic_phase(const FqMatrix& gamma, const FieldRef& spec, int n) {
  const int p = spec->p;
  const int inv2 = mod_inverse(2, p);
  const std::size_t dim = ipow(spec->q(), n);
  DenseOperator d = DenseOperator::Zero(dim, dim);
  for (std::size_t idx = 0; idx < dim; ++idx) {
    FqVector x = decode_state_index(spec, n, idx);
    FieldElement quad = FieldElement::zero(spec);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) quad = quad + x[i] * gamma.at(i, j) * x[j];
    }
    d(idx, idx) = root_of_unity(static_cast<long long>(inv2) * ff_trace(quad), p);
  }
  return d;
}

// Symplectic action of the Fourier transform applied to the registers in
// `mask`: (s_i, t_i) -> (-t_i, s_i) there, identity elsewhere.
FqMatrix partial_fourier_symplectic(unsigned mask, const SymplecticContext& ctx) {
  const int n = ctx.m0;
  FqMatrix m(ctx.spec, 2 * n, 2 * n);
  const FieldElement one = FieldElement::one(ctx.spec);
  for (int i = 0; i < n; ++i) {
    if (mask & (1u << i)) {
      m.at(i, n + i) = -one;
      m.at(n + i, i) = one;
    } else {
      m.at(i, i) = one;
      m.at(n + i, n + i) = one;
    }
  }
  return m;
}

// Weighted union-find over matrix cells; weights are exponents of a fixed
// root of unity, so all bookkeeping stays exact.  A component becomes dead
// when its constraints force every entry in it to zero.
struct PhaseDsu {
  std::vector<int> parent, wexp;
  std::vector<char> dead;
  int order;

  PhaseDsu(std::size_t n, int order_) : parent(n), wexp(n, 0), dead(n, 0), order(order_) {
    std::iota(parent.begin(), parent.end(), 0);
  }

  int mod(long long x) const { return static_cast<int>(((x % order) + order) % order); }

  std::pair<int, int> find(int i) {
    int root = i, acc = 0;
    while (parent[root] != root) {
      acc = (acc + wexp[root]) % order;
      root = parent[root];
    }
    // Path compression, rewriting weights relative to the root.
    int node = i, carry = acc;
    while (parent[node] != root) {
      int next = parent[node], w = wexp[node];
      parent[node] = root;
      wexp[node] = carry;
      carry = mod(carry - w);
      node = next;
    }
    return {root, acc};
  }

  // Impose val(a) = w^delta * val(b).
  void unite(int a, int b, long long delta) {
    auto [ra, ea] = find(a);
    auto [rb, eb] = find(b);
    if (ra == rb) {
      if (mod(ea - eb - delta) != 0) dead[ra] = 1;
      return;
    }
    parent[ra] = rb;
    wexp[ra] = mod(-ea + delta + eb);
    dead[rb] = static_cast<char>(dead[rb] | dead[ra]);
  }
};

struct GeneratorData {
  std::vector<std::size_t> add_s;   // col B -> index of B + s
  std::vector<std::size_t> sub_sp;  // row A -> index of A - s'
  std::vector<int> tr_t;            // B -> tr(B . t)
  std::vector<int> tr_tp;           // X -> tr(X . t')
};

std::vector<WeylLabel> generator_labels(const FieldRef& spec, int n) {
  std::vector<WeylLabel> gens;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < spec->degree; ++j) {
      FqVector s(spec, n), t(spec, n);
      s[i] = FieldElement::from_int(spec, ipow(spec->p, j));
      gens.emplace_back(s, t);
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < spec->degree; ++j) {
      FqVector s(spec, n), t(spec, n);
      t[i] = FieldElement::from_int(spec, ipow(spec->p, j));
      gens.emplace_back(s, t);
    }
  }
  return gens;
}

}  // namespace

bool is_unitary(const DenseOperator& u, double tol) {
  if (u.rows() != u.cols() || u.rows() == 0) return false;
  DenseOperator gram = u.adjoint() * u;
  gram -= DenseOperator::Identity(u.rows(), u.cols());
  return gram.cwiseAbs().maxCoeff() <= tol;
}

std::size_t encode_state_index(const FqVector& digits) {
  const std::size_t q = digits.spec()->q();
  std::size_t idx = 0;
  for (std::size_t i = 0; i < digits.size(); ++i) idx = idx * q + digits[i].to_int();
  return idx;
}

FqVector decode_state_index(const FieldRef& spec, int n, std::size_t index) {
  FqVector v(spec, n);
  const std::size_t q = spec->q();
  for (int i = n - 1; i >= 0; --i) {
    v[i] = FieldElement::from_int(spec, static_cast<long long>(index % q));
    index /= q;
  }
  if (index != 0) throw DimensionError("state index out of range for the register count");
  return v;
}

WeylLabel::WeylLabel(FqVector s_, FqVector t_) : s(std::move(s_)), t(std::move(t_)) {
  if (s.size() != t.size()) throw DimensionError("displacement halves differ in length");
  if (!(*s.spec() == *t.spec())) throw FieldMismatch("displacement halves over different fields");
}

DenseOperator weyl(const WeylLabel& label) {
  const FieldRef& spec = label.spec();
  const int n = label.registers();
  const std::size_t dim = ipow(spec->q(), n);
  DenseOperator w = DenseOperator::Zero(dim, dim);
  for (std::size_t col = 0; col < dim; ++col) {
    FqVector x = decode_state_index(spec, n, col);
    w(encode_state_index(x + label.s), col) = root_of_unity(trace_dot(x, label.t), spec->p);
  }
  return w;
}

StateVector fourier_state(const FqVector& y) {
  const FieldRef& spec = y.spec();
  const int n = static_cast<int>(y.size());
  const std::size_t dim = ipow(spec->q(), n);
  StateVector v(dim);
  const double norm = 1.0 / std::sqrt(static_cast<double>(dim));
  for (std::size_t idx = 0; idx < dim; ++idx) {
    FqVector x = decode_state_index(spec, n, idx);
    v(idx) = norm * root_of_unity(trace_dot(x, y), spec->p);
  }
  return v;
}

DenseOperator fourier_unitary(const FieldRef& spec, int n) {
  const std::size_t dim = ipow(spec->q(), n);
  DenseOperator f(dim, dim);
  for (std::size_t col = 0; col < dim; ++col) {
    f.col(col) = fourier_state(decode_state_index(spec, n, col));
  }
  return f;
}

DenseOperator basis_linear_unitary(const FqMatrix& g) {
  if (g.rows() != g.cols()) throw DimensionError("basis map must be square");
  const int n = static_cast<int>(g.rows());
  if (rank(g) != n) throw SingularMatrix("basis map is not invertible");
  const FieldRef& spec = g.spec();
  const std::size_t dim = ipow(spec->q(), n);
  DenseOperator u = DenseOperator::Zero(dim, dim);
  for (std::size_t col = 0; col < dim; ++col) {
    FqVector x = decode_state_index(spec, n, col);
    u(encode_state_index(g * x), col) = 1.0;
  }
  return u;
}

DenseOperator embed_on_registers(const DenseOperator& op, const std::vector<int>& positions,
                                 int n, int q) {
  const int k = static_cast<int>(positions.size());
  const std::size_t opdim = ipow(q, k);
  if (static_cast<std::size_t>(op.rows()) != opdim || op.rows() != op.cols()) {
    throw DimensionError("operator size does not match the register subset");
  }
  std::vector<char> seen(n, 0);
  for (int pos : positions) {
    if (pos < 0 || pos >= n || seen[pos]) throw DimensionError("bad register positions");
    seen[pos] = 1;
  }
  std::vector<int> rest;
  for (int i = 0; i < n; ++i) {
    if (!seen[i]) rest.push_back(i);
  }
  std::vector<std::size_t> place(n);
  for (int i = 0; i < n; ++i) place[i] = ipow(q, n - 1 - i);

  const std::size_t restdim = ipow(q, static_cast<int>(rest.size()));
  const std::size_t dim = ipow(q, n);
  DenseOperator out = DenseOperator::Zero(dim, dim);
  for (std::size_t r = 0; r < restdim; ++r) {
    std::size_t base = 0;
    std::size_t rr = r;
    for (int i = static_cast<int>(rest.size()) - 1; i >= 0; --i) {
      base += (rr % q) * place[rest[static_cast<std::size_t>(i)]];
      rr /= q;
    }
    for (std::size_t a = 0; a < opdim; ++a) {
      std::size_t row = base, aa = a;
      for (int i = k - 1; i >= 0; --i) {
        row += (aa % q) * place[positions[i]];
        aa /= q;
      }
      for (std::size_t b = 0; b < opdim; ++b) {
        if (op(a, b) == 0.0) continue;
        std::size_t colidx = base, bb = b;
        for (int i = k - 1; i >= 0; --i) {
          colidx += (bb % q) * place[positions[i]];
          bb /= q;
        }
        out(row, colidx) = op(a, b);
      }
    }
  }
  return out;
}

void normalize_global_phase(DenseOperator& u) {
  double best = -1.0;
  std::complex<double> val = 1.0;
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
      const double a = std::abs(u(i, j));
      if (a > best + 1e-12) {
        best = a;
        val = u(i, j);
      }
    }
  }
  if (best <= 1e-300) return;
  u *= std::conj(val) / std::abs(val);
}

namespace {

// Any two unitaries realizing the same symplectic action differ by a
// displacement twist U -> U W(v) times a phase, and the twist reshuffles the
// conjugation phases by a character.  Pin the representative by measuring the
// phases against Hermitian-ordered displacements phi(s,t)^{-1} X(s) Z(t),
// phi = w^{2^{-1} sum tr(s_i t_i)} for odd p and i^{sum tr(s_i t_i)} for p = 2,
// then choosing the twist that zeroes as many of them as possible (odd p
// always reaches the phase-free section; ties break lexicographically).
void canonicalize_section(DenseOperator& u, const FqMatrix& g, const SymplecticContext& ctx) {
  const FieldRef& spec = ctx.spec;
  const int n = ctx.m0;
  const int p = spec->p;
  const std::size_t dim = ipow(spec->q(), n);
  const int order = (p == 2) ? 4 : p;
  const int omega_scale = order / p;

  const auto gens = generator_labels(spec, n);
  std::vector<FqVector> gen_vecs;
  std::vector<int> centered(gens.size(), 0);
  for (std::size_t k = 0; k < gens.size(); ++k) {
    const WeylLabel& lab = gens[k];
    const WeylLabel img = split_label(g * stack_label(lab));
    const DenseOperator m = u * weyl(lab) * u.adjoint();
    const std::complex<double> c = (weyl(img).adjoint() * m).trace() / static_cast<double>(dim);
    const double angle = std::arg(c) * order / (2.0 * std::numbers::pi);
    const long long e = std::llround(angle);
    if (std::abs(angle - static_cast<double>(e)) > 1e-6 || std::abs(std::abs(c) - 1.0) > 1e-6) {
      throw SynthesisFailed("conjugation phase is off the root-of-unity lattice");
    }
    const int shift = (p == 2)
                          ? trace_dot(lab.s, lab.t) - trace_dot(img.s, img.t)
                          : mod_inverse(2, p) * (trace_dot(lab.s, lab.t) - trace_dot(img.s, img.t));
    centered[k] = static_cast<int>((((e + shift) % order) + order) % order);
    gen_vecs.push_back(stack_label(lab));
  }

  const std::size_t twists = dim * dim;  // q^{2n} displacement labels
  std::vector<int> best = centered, adj(gens.size(), 0);
  std::size_t best_idx = 0;
  int best_nonzero = 0;
  for (int e : centered) best_nonzero += (e != 0);
  for (std::size_t idx = 1; idx < twists; ++idx) {
    const FqVector w = decode_state_index(spec, 2 * n, idx);
    int nonzero = 0;
    for (std::size_t k = 0; k < gens.size(); ++k) {
      adj[k] = (centered[k] + omega_scale * fp_pairing(w, gen_vecs[k], ctx)) % order;
      nonzero += (adj[k] != 0);
    }
    if (nonzero < best_nonzero || (nonzero == best_nonzero && adj < best)) {
      best = adj;
      best_nonzero = nonzero;
      best_idx = idx;
    }
  }
  if (p != 2 && best_nonzero != 0) {
    throw InternalError("odd characteristic must reach the phase-free section");
  }
  if (best_idx != 0) u = u * weyl(split_label(decode_state_index(spec, 2 * n, best_idx)));
  normalize_global_phase(u);
}

}  // namespace

DenseOperator metaplectic_by_decomposition(const FqMatrix& g, const SymplecticContext& ctx) {
  if (!is_symplectic(g, ctx)) throw NotSymplectic("matrix does not preserve the form");
  if (ctx.spec->p == 2) {
    throw SynthesisFailed("quadratic-phase decomposition needs odd characteristic");
  }
  const int n = ctx.m0;
  const FieldRef& spec = ctx.spec;

  // Smallest register subset whose Fourier exposes an invertible top-left
  // block; the empty subset comes first so plain block cases stay plain.
  std::vector<unsigned> masks(1u << n);
  std::iota(masks.begin(), masks.end(), 0u);
  std::stable_sort(masks.begin(), masks.end(),
                   [](unsigned a, unsigned b) { return std::popcount(a) < std::popcount(b); });
  FqMatrix h(spec, 0, 0);
  unsigned chosen = 0;
  bool found = false;
  for (unsigned mask : masks) {
    FqMatrix cand = partial_fourier_symplectic(mask, ctx) * g;
    FqMatrix a(spec, n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a.at(i, j) = cand.at(i, j);
    if (rank(a) == n) {
      h = cand;
      chosen = mask;
      found = true;
      break;
    }
  }
  if (!found) throw SynthesisFailed("no register subset exposes an invertible block");

  FqMatrix a(spec, n, n), b(spec, n, n), c(spec, n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      a.at(i, j) = h.at(i, j);
      b.at(i, j) = h.at(i, n + j);
      c.at(i, j) = h.at(n + i, j);
    }
  }
  const FqMatrix a_inv = inverse(a);
  const FqMatrix gamma = c * a_inv;
  const FqMatrix beta = a_inv * b;
  if (gamma != gamma.transpose() || beta != beta.transpose()) {
    throw InternalError("symplectic block identities violated");
  }

  DenseOperator f_all = fourier_unitary(spec, n);
  DenseOperator u_h = quadratic_phase(gamma, spec, n) * basis_linear_unitary(a) *
                      (f_all * quadratic_phase(-beta, spec, n) * f_all.adjoint());

  DenseOperator u_fs = DenseOperator::Identity(u_h.rows(), u_h.cols());
  DenseOperator f_one = fourier_unitary(spec, 1);
  for (int i = 0; i < n; ++i) {
    if (chosen & (1u << i)) u_fs = embed_on_registers(f_one, {i}, n, spec->q()) * u_fs;
  }
  DenseOperator u = u_fs.adjoint() * u_h;
  canonicalize_section(u, g, ctx);
  return u;
}

DenseOperator metaplectic_by_intertwining(const FqMatrix& g, const SymplecticContext& ctx) {
  if (!is_symplectic(g, ctx)) throw NotSymplectic("matrix does not preserve the form");
  const int n = ctx.m0;
  const FieldRef& spec = ctx.spec;
  const int p = spec->p;
  const std::size_t dim = ipow(spec->q(), n);
  if (dim > 256) throw ResourceLimit("intertwining solve supports dimension <= 256");
  const int order = (p == 2) ? 4 : p;      // phases live among these roots
  const int omega_scale = order / p;       // embeds w = e^{2 pi i / p}

  const auto gens = generator_labels(spec, n);
  std::vector<GeneratorData> data;
  for (const auto& lab : gens) {
    WeylLabel img = split_label(g * stack_label(lab));
    GeneratorData gd;
    gd.add_s.resize(dim);
    gd.sub_sp.resize(dim);
    gd.tr_t.resize(dim);
    gd.tr_tp.resize(dim);
    for (std::size_t idx = 0; idx < dim; ++idx) {
      FqVector x = decode_state_index(spec, n, idx);
      gd.add_s[idx] = encode_state_index(x + lab.s);
      gd.sub_sp[idx] = encode_state_index(x - img.s);
      gd.tr_t[idx] = trace_dot(x, lab.t);
      gd.tr_tp[idx] = trace_dot(x, img.t);
    }
    data.push_back(std::move(gd));
  }

  // Constraints of U W = c W' U in entries:
  //   U[A, B+s] = c * w^{tr((A-s').t') - tr(B.t)} * U[A-s', B].
  auto run_prefix = [&](const std::vector<int>& phase_exp, std::size_t count) {
    PhaseDsu dsu(dim * dim, order);
    for (std::size_t k = 0; k < count; ++k) {
      const GeneratorData& gd = data[k];
      for (std::size_t arow = 0; arow < dim; ++arow) {
        const std::size_t lhs_row = arow * dim;
        const std::size_t rhs_row = gd.sub_sp[arow] * dim;
        const long long base = phase_exp[k] + static_cast<long long>(omega_scale) *
                                                  gd.tr_tp[gd.sub_sp[arow]];
        for (std::size_t bcol = 0; bcol < dim; ++bcol) {
          dsu.unite(static_cast<int>(lhs_row + gd.add_s[bcol]),
                    static_cast<int>(rhs_row + bcol),
                    base - static_cast<long long>(omega_scale) * gd.tr_t[bcol]);
        }
      }
    }
    return dsu;
  };
  auto alive = [&](PhaseDsu& dsu) {
    for (std::size_t cell = 0; cell < dim * dim; ++cell) {
      if (!dsu.dead[dsu.find(static_cast<int>(cell)).first]) return true;
    }
    return false;
  };

  std::vector<int> phase_exp(gens.size(), 0);
  DenseOperator result;
  bool solved = false;
  long long nodes = 0;
  auto dfs = [&](auto&& self, std::size_t k) -> bool {
    if (++nodes > 200000) throw SynthesisFailed("phase search budget exhausted");
    if (k == gens.size()) {
      PhaseDsu dsu = run_prefix(phase_exp, gens.size());
      int live_root = -1;
      for (std::size_t cell = 0; cell < dim * dim; ++cell) {
        auto [root, e] = dsu.find(static_cast<int>(cell));
        if (dsu.dead[root]) continue;
        if (live_root == -1) live_root = root;
        if (root != live_root) return false;  // intertwiner space too big
      }
      if (live_root == -1) return false;
      DenseOperator u = DenseOperator::Zero(dim, dim);
      for (std::size_t cell = 0; cell < dim * dim; ++cell) {
        auto [root, e] = dsu.find(static_cast<int>(cell));
        if (root == live_root) u(cell / dim, cell % dim) = root_of_unity(e, order);
      }
      const double scale = std::sqrt((u * u.adjoint())(0, 0).real());
      if (scale <= 0.0) return false;
      u /= scale;
      if (!is_unitary(u, 1e-9)) return false;
      normalize_global_phase(u);
      result = std::move(u);
      return true;
    }
    for (int e = 0; e < order; ++e) {
      phase_exp[k] = e;
      PhaseDsu dsu = run_prefix(phase_exp, k + 1);
      if (!alive(dsu)) continue;
      if (self(self, k + 1)) return true;
    }
    return false;
  };
  solved = dfs(dfs, 0);
  if (!solved) throw SynthesisFailed("no consistent conjugation phases found");
  canonicalize_section(result, g, ctx);
  return result;
}

namespace {

MetaplecticCertificate certify(const DenseOperator& u, const FqMatrix& g,
                               const SymplecticContext& ctx) {
  const FieldRef& spec = ctx.spec;
  const int n = ctx.m0;
  const std::size_t dim = ipow(spec->q(), n);
  MetaplecticCertificate cert;
  auto check = [&](const WeylLabel& lab) {
    DenseOperator m = u * weyl(lab) * u.adjoint();
    DenseOperator target = weyl(split_label(g * stack_label(lab)));
    std::complex<double> c = (target.adjoint() * m).trace() / static_cast<double>(dim);
    double dev = (m - c * target).cwiseAbs().maxCoeff();
    dev = std::max(dev, std::abs(std::abs(c) - 1.0));
    cert.max_deviation = std::max(cert.max_deviation, dev);
    return c;
  };
  for (const auto& lab : generator_labels(spec, n)) {
    cert.generator_phases.emplace_back(lab, check(lab));
  }
  if (dim <= 81) {
    cert.exhaustive = true;
    for (std::size_t si = 0; si < dim; ++si) {
      for (std::size_t ti = 0; ti < dim; ++ti) {
        check(WeylLabel(decode_state_index(spec, n, si), decode_state_index(spec, n, ti)));
      }
    }
  }
  return cert;
}

}  // namespace

MetaplecticResult metaplectic(const FqMatrix& g, const SymplecticContext& ctx) {
  if (!is_symplectic(g, ctx)) throw NotSymplectic("matrix does not preserve the form");
  DenseOperator u = (ctx.spec->p == 2) ? metaplectic_by_intertwining(g, ctx)
                                       : metaplectic_by_decomposition(g, ctx);
  MetaplecticCertificate cert = certify(u, g, ctx);
  MetaplecticResult res{std::move(u), std::move(cert)};
  if (res.certificate.max_deviation > 1e-9) {
    throw SynthesisFailed("synthesized unitary fails the conjugation relation");
  }
  return res;
}

}  // namespace qnc
