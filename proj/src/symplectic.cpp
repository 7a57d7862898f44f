#include "qnc/symplectic.hpp"

#include <string>

namespace qnc {

namespace {

void require_length(const FqVector& v, const SymplecticContext& ctx, const char* what) {
  if (static_cast<int>(v.size()) != 2 * ctx.m0) {
    throw DimensionError(std::string(what) + ": vector length must be 2*m0");
  }
}

FqVector apply_J(const FqVector& v, const SymplecticContext& ctx) {
  const int m0 = ctx.m0;
  FqVector r(v.spec(), 2 * m0);
  for (int i = 0; i < m0; ++i) {
    r[i] = -v[m0 + i];
    r[m0 + i] = v[i];
  }
  return r;
}

// One solution x of fq_form(x, targets[r]) = rhs[r] for all r, preferring a
// solution inside span(preferred) when one exists there.  Returns nullopt
// only when the unrestricted system is inconsistent.
std::optional<FqVector> solve_form_constraints(const std::vector<FqVector>& targets,
                                               const std::vector<FieldElement>& rhs,
                                               const std::vector<FqVector>& preferred,
                                               const SymplecticContext& ctx) {
  const FieldRef& spec = ctx.spec;
  const std::size_t n = 2 * static_cast<std::size_t>(ctx.m0);
  // fq_form(x, y) = x^T J y, so each constraint is the row (J y)^T.
  FqMatrix a(spec, targets.size(), n);
  FqVector b(spec, targets.size());
  for (std::size_t r = 0; r < targets.size(); ++r) {
    FqVector jy = apply_J(targets[r], ctx);
    for (std::size_t j = 0; j < n; ++j) a.at(r, j) = jy[j];
    b[r] = rhs[r];
  }
  if (!preferred.empty()) {
    FqMatrix s = FqMatrix::from_columns(preferred);
    if (auto z = solve(a * s, b)) {
      return s * *z;
    }
  }
  return solve(a, b);
}

}  // namespace

FqMatrix SymplecticContext::J() const {
  FqMatrix j(spec, 2 * m0, 2 * m0);
  const FieldElement one = FieldElement::one(spec);
  for (int i = 0; i < m0; ++i) {
    j.at(i, m0 + i) = -one;
    j.at(m0 + i, i) = one;
  }
  return j;
}

FieldElement fq_form(const FqVector& u, const FqVector& v, const SymplecticContext& ctx) {
  require_length(u, ctx, "fq_form");
  require_length(v, ctx, "fq_form");
  FieldElement acc = FieldElement::zero(ctx.spec);
  for (int i = 0; i < ctx.m0; ++i) {
    acc = acc + u[ctx.m0 + i] * v[i] - u[i] * v[ctx.m0 + i];
  }
  return acc;
}

int fp_pairing(const FqVector& u, const FqVector& v, const SymplecticContext& ctx) {
  return ff_trace(fq_form(u, v, ctx));
}

bool is_symplectic(const FqMatrix& g, const SymplecticContext& ctx) {
  const std::size_t n = 2 * static_cast<std::size_t>(ctx.m0);
  if (g.rows() != n || g.cols() != n) return false;
  const FqMatrix j = ctx.J();
  return g.transpose() * j * g == j;
}

std::pair<std::vector<FqVector>, std::vector<FqVector>> lc1_diagonalize(
    const std::vector<FqVector>& vectors, const SymplecticContext& ctx) {
  for (const FqVector& v : vectors) require_length(v, ctx, "lc1_diagonalize");
  std::vector<FqVector> current = reduce_to_basis(vectors);
  if (current.size() % 2 != 0) {
    throw DegenerateForm("a nondegenerate alternating form needs an even-dimensional space");
  }
  std::vector<FqVector> w, wp;
  while (!current.empty()) {
    const FqVector wi = current.front();
    // Partner: the first basis vector not orthogonal to wi, scaled so that
    // the form value is exactly 1.
    std::size_t pi = current.size();
    for (std::size_t i = 1; i < current.size(); ++i) {
      if (!fq_form(current[i], wi, ctx).is_zero()) {
        pi = i;
        break;
      }
    }
    if (pi == current.size()) {
      throw DegenerateForm("restricted form is degenerate on the given span");
    }
    FqVector wpi = fq_form(current[pi], wi, ctx).inverse() * current[pi];
    // Reduce the remaining vectors to the orthogonal complement of the pair.
    std::vector<FqVector> next;
    for (std::size_t i = 1; i < current.size(); ++i) {
      if (i == pi) continue;
      const FqVector& u = current[i];
      FqVector reduced = u + fq_form(u, wpi, ctx) * wi - fq_form(u, wi, ctx) * wpi;
      next.push_back(std::move(reduced));
    }
    next = reduce_to_basis(next);
    if (next.size() != current.size() - 2) {
      throw DegenerateForm("restricted form is degenerate on the given span");
    }
    w.push_back(wi);
    wp.push_back(std::move(wpi));
    current = std::move(next);
  }
  return {std::move(w), std::move(wp)};
}

std::pair<int, int> compute_invariants(const std::vector<FqVector>& V_basis,
                                       const SymplecticContext& ctx,
                                       std::optional<int> m1) {
  for (const FqVector& v : V_basis) require_length(v, ctx, "compute_invariants");
  const std::vector<FqVector> basis = reduce_to_basis(V_basis);
  if (basis.empty()) throw DegenerateForm("error space is zero");
  const FqMatrix p = projection_onto(basis);
  const FqMatrix m = p.transpose() * ctx.J() * p;
  const int r = rank(m);
  if (r % 2 != 0) throw InternalError("restricted alternating form has odd rank");
  const int m_star = r / 2;
  const int m_star_star = static_cast<int>(basis.size()) - m_star;
  if (m_star < 1) {
    throw DegenerateForm("error space carries no conjugate pair of directions");
  }
  if (m_star_star < m_star) throw InternalError("dim V - m* < m* cannot happen");
  if (m1) {
    if (static_cast<int>(basis.size()) > 2 * *m1) {
      throw DimensionError("error space dimension exceeds 2*m1");
    }
    if (m_star_star > 2 * *m1 - 1) {
      throw InternalError("m** exceeds 2*m1 - 1 despite m* >= 1");
    }
  }
  return {m_star, m_star_star};
}

WBasis build_w_basis(const std::vector<FqVector>& V_basis, const SymplecticContext& ctx) {
  const FieldRef& spec = ctx.spec;
  const int m0 = ctx.m0;
  for (const FqVector& v : V_basis) require_length(v, ctx, "build_w_basis");

  const std::vector<FqVector> vb = reduce_to_basis(V_basis);
  const auto [m_star, m_star_star] = compute_invariants(vb, ctx);
  if (m_star_star > m0) throw DimensionError("error space is wider than the register space");

  const FqMatrix p_v = projection_onto(vb);
  const FqMatrix restricted = p_v.transpose() * ctx.J() * p_v;

  // Radical of the form on V, and a complement of it inside V.  Any
  // complement works because the form is automatically nondegenerate there;
  // candidates are taken from the given basis in order, for determinism.
  const std::vector<FqVector> v2 = intersect_spans(kernel_basis(restricted), vb);
  if (static_cast<int>(v2.size()) != m_star_star - m_star) {
    throw InternalError("radical dimension mismatch");
  }
  const std::vector<FqVector> v1 = extend_within(v2, vb);
  if (static_cast<int>(v1.size()) != 2 * m_star) {
    throw InternalError("complement of the radical has the wrong dimension");
  }

  std::vector<FqVector> mid_w, mid_wp;
  if (!v1.empty()) std::tie(mid_w, mid_wp) = lc1_diagonalize(v1, ctx);

  // The corrupted span plus its conjugate directions; partners are looked
  // for inside this space first so that, whenever possible, the last index
  // block spans exactly the corrupted directions.
  std::vector<FqVector> v_plus_jv = vb;
  for (const FqVector& v : vb) v_plus_jv.push_back(apply_J(v, ctx));
  v_plus_jv = reduce_to_basis(v_plus_jv);

  // Partners for the radical block.  Each partner must pair 1 with its own
  // w, 0 with every other w of the block, 0 with previously chosen
  // partners, and 0 with both members of every nondegenerate pair.  The
  // last group of constraints is what a plain complement decomposition
  // does not deliver; folding it into the solve acts as a symplectic
  // Gram-Schmidt pass against the mid-block pairs.
  std::vector<FqVector> last_w = v2;
  std::vector<FqVector> last_wp;
  const FieldElement zero = FieldElement::zero(spec);
  const FieldElement one = FieldElement::one(spec);
  for (std::size_t l = 0; l < last_w.size(); ++l) {
    std::vector<FqVector> targets;
    std::vector<FieldElement> rhs;
    for (std::size_t j = 0; j < last_w.size(); ++j) {
      targets.push_back(last_w[j]);
      rhs.push_back(j == l ? one : zero);
    }
    for (const FqVector& prev : last_wp) {
      targets.push_back(prev);
      rhs.push_back(zero);
    }
    for (std::size_t a = 0; a < mid_w.size(); ++a) {
      targets.push_back(mid_w[a]);
      rhs.push_back(zero);
      targets.push_back(mid_wp[a]);
      rhs.push_back(zero);
    }
    auto x = solve_form_constraints(targets, rhs, v_plus_jv, ctx);
    if (!x) throw InternalError("no partner vector for a radical direction");
    last_wp.push_back(std::move(*x));
  }

  // Orthogonal complement of everything chosen so far; the form is
  // nondegenerate there and supplies the message pairs.
  std::vector<FqVector> v4 = mid_w;
  v4.insert(v4.end(), mid_wp.begin(), mid_wp.end());
  v4.insert(v4.end(), last_w.begin(), last_w.end());
  v4.insert(v4.end(), last_wp.begin(), last_wp.end());
  v4 = reduce_to_basis(v4);
  if (static_cast<int>(v4.size()) != 2 * m_star_star) {
    throw InternalError("chosen pairs are not independent");
  }

  std::vector<FqVector> msg_w, msg_wp;
  if (m0 > m_star_star) {
    const FqMatrix p_v4 = projection_onto(v4);
    const std::vector<FqVector> v5 = kernel_basis(p_v4.transpose() * ctx.J());
    if (static_cast<int>(v5.size()) != 2 * (m0 - m_star_star)) {
      throw InternalError("orthogonal complement has the wrong dimension");
    }
    std::tie(msg_w, msg_wp) = lc1_diagonalize(v5, ctx);
  }

  WBasis out;
  out.m_star = m_star;
  out.m_star_star = m_star_star;
  out.w = std::move(msg_w);
  out.w.insert(out.w.end(), mid_w.begin(), mid_w.end());
  out.w.insert(out.w.end(), last_w.begin(), last_w.end());
  out.w_prime = std::move(msg_wp);
  out.w_prime.insert(out.w_prime.end(), mid_wp.begin(), mid_wp.end());
  out.w_prime.insert(out.w_prime.end(), last_wp.begin(), last_wp.end());
  if (static_cast<int>(out.w.size()) != m0 || static_cast<int>(out.w_prime.size()) != m0) {
    throw InternalError("basis assembly produced the wrong count");
  }

  // Verify the complete form table before handing the basis out.
  for (int i = 0; i < m0; ++i) {
    for (int j = 0; j < m0; ++j) {
      const FieldElement expect = (i == j) ? one : zero;
      if (fq_form(out.w_prime[i], out.w[j], ctx) != expect ||
          !fq_form(out.w[i], out.w[j], ctx).is_zero() ||
          !fq_form(out.w_prime[i], out.w_prime[j], ctx).is_zero()) {
        throw InternalError("constructed basis fails the form table");
      }
    }
  }
  return out;
}

}  // namespace qnc
