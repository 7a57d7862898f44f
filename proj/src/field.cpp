#include "qnc/field.hpp"

#include <algorithm>
#include <string>

namespace qnc {

namespace {

bool is_prime(int n) {
  if (n < 2) return false;
  for (int d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

int mod_p(long long v, int p) {
  long long r = v % p;
  return static_cast<int>(r < 0 ? r + p : r);
}

// Polynomials over F_p, little-endian coefficient vectors.
std::vector<int> poly_trim(std::vector<int> a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
  return a;
}

std::vector<int> poly_mul(const std::vector<int>& a, const std::vector<int>& b, int p) {
  if (a.empty() || b.empty()) return {};
  std::vector<int> r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      r[i + j] = mod_p(r[i + j] + static_cast<long long>(a[i]) * b[j], p);
    }
  }
  return poly_trim(std::move(r));
}

// Remainder of a modulo the monic polynomial m.
std::vector<int> poly_mod(std::vector<int> a, const std::vector<int>& m, int p) {
  a = poly_trim(std::move(a));
  const int dm = static_cast<int>(m.size()) - 1;
  while (static_cast<int>(a.size()) - 1 >= dm) {
    const int shift = static_cast<int>(a.size()) - 1 - dm;
    const int lead = a.back();
    for (int i = 0; i <= dm; ++i) {
      a[shift + i] = mod_p(a[shift + i] - static_cast<long long>(lead) * m[i], p);
    }
    a = poly_trim(std::move(a));
  }
  return a;
}

// Exhaustive irreducibility test: no monic divisor of degree 1..deg/2.
// Candidate divisors are enumerated by their coefficient vectors, which is
// fine for the desk-scale parameters this library supports.
bool poly_irreducible(const std::vector<int>& m, int p) {
  const int deg = static_cast<int>(m.size()) - 1;
  if (deg < 1) return false;
  for (int d = 1; 2 * d <= deg; ++d) {
    // All monic polynomials of degree d: p^d coefficient choices.
    long long count = 1;
    for (int i = 0; i < d; ++i) count *= p;
    for (long long code = 0; code < count; ++code) {
      std::vector<int> div(d + 1, 0);
      long long c = code;
      for (int i = 0; i < d; ++i) {
        div[i] = static_cast<int>(c % p);
        c /= p;
      }
      div[d] = 1;
      if (poly_mod(m, div, p).empty()) return false;
    }
  }
  return true;
}

}  // namespace

FieldSpec::FieldSpec(int p_, int degree_, std::vector<int> modulus_)
    : p(p_), degree(degree_), modulus(std::move(modulus_)) {
  if (!is_prime(p)) throw ConfigError("field characteristic must be prime, got " + std::to_string(p));
  if (degree < 1) throw ConfigError("field extension degree must be >= 1");
  if (static_cast<int>(modulus.size()) != degree + 1) {
    throw ConfigError("modulus must have degree+1 coefficients");
  }
  for (int& c : modulus) c = mod_p(c, p);
  if (modulus.back() != 1) throw ConfigError("modulus must be monic");
  if (!poly_irreducible(modulus, p)) throw ConfigError("modulus polynomial is reducible");
}

int FieldSpec::q() const {
  int r = 1;
  for (int i = 0; i < degree; ++i) r *= p;
  return r;
}

FieldRef make_field(int p, int degree, std::vector<int> modulus) {
  return std::make_shared<const FieldSpec>(p, degree, std::move(modulus));
}

FieldRef make_field(int p, int degree) {
  // Built-in monic irreducible moduli (little-endian).  Degree-1 entries
  // are x - g with g a primitive root, so the quotient is plain F_p.
  auto table = [&]() -> std::vector<int> {
    if (degree == 1) {
      if (p == 2) return {1, 1};
      if (p == 3) return {1, 1};   // x + 1 = x - 2
      if (p == 5) return {3, 1};   // x - 2
    }
    if (p == 2 && degree == 2) return {1, 1, 1};        // x^2 + x + 1
    if (p == 2 && degree == 3) return {1, 1, 0, 1};     // x^3 + x + 1
    if (p == 3 && degree == 2) return {2, 2, 1};        // x^2 + 2x + 2
    if (p == 3 && degree == 3) return {1, 2, 0, 1};     // x^3 + 2x + 1
    if (p == 5 && degree == 2) return {2, 4, 1};        // x^2 + 4x + 2
    if (p == 5 && degree == 3) return {3, 3, 0, 1};     // x^3 + 3x + 3
    throw ConfigError("no built-in modulus for p=" + std::to_string(p) +
                      ", degree=" + std::to_string(degree) + "; pass one explicitly");
  };
  return make_field(p, degree, table());
}

FieldElement::FieldElement(FieldRef spec, std::vector<int> coeffs)
    : spec_(std::move(spec)), coeffs_(std::move(coeffs)) {
  if (!spec_) throw InternalError("field element constructed without a field");
  if (static_cast<int>(coeffs_.size()) != spec_->degree) {
    throw DimensionError("coefficient vector length does not match the field degree");
  }
  for (int& c : coeffs_) c = mod_p(c, spec_->p);
}

void FieldElement::require_valid() const {
  if (!spec_) throw InternalError("operation on a null field element");
}

void FieldElement::require_same_field(const FieldElement& o) const {
  require_valid();
  o.require_valid();
  if (spec_ != o.spec_ && *spec_ != *o.spec_) {
    throw FieldMismatch("operands belong to different fields");
  }
}

FieldElement FieldElement::zero(const FieldRef& spec) {
  return FieldElement(spec, std::vector<int>(spec->degree, 0));
}

FieldElement FieldElement::one(const FieldRef& spec) {
  std::vector<int> c(spec->degree, 0);
  c[0] = 1;
  return FieldElement(spec, std::move(c));
}

FieldElement FieldElement::from_int(const FieldRef& spec, long long code) {
  if (code < 0 || code >= spec->q()) {
    throw ConfigError("field element code " + std::to_string(code) + " out of range [0, " +
                      std::to_string(spec->q()) + ")");
  }
  std::vector<int> c(spec->degree, 0);
  for (int i = 0; i < spec->degree; ++i) {
    c[i] = static_cast<int>(code % spec->p);
    code /= spec->p;
  }
  return FieldElement(spec, std::move(c));
}

int FieldElement::to_int() const {
  require_valid();
  int code = 0;
  for (int i = spec_->degree - 1; i >= 0; --i) code = code * spec_->p + coeffs_[i];
  return code;
}

bool FieldElement::is_zero() const {
  require_valid();
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](int c) { return c == 0; });
}

bool FieldElement::is_one() const {
  require_valid();
  if (coeffs_[0] != 1) return false;
  return std::all_of(coeffs_.begin() + 1, coeffs_.end(), [](int c) { return c == 0; });
}

FieldElement FieldElement::operator+(const FieldElement& o) const {
  require_same_field(o);
  std::vector<int> c(coeffs_.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = mod_p(coeffs_[i] + o.coeffs_[i], spec_->p);
  return FieldElement(spec_, std::move(c));
}

FieldElement FieldElement::operator-(const FieldElement& o) const {
  require_same_field(o);
  std::vector<int> c(coeffs_.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = mod_p(coeffs_[i] - o.coeffs_[i], spec_->p);
  return FieldElement(spec_, std::move(c));
}

FieldElement FieldElement::operator-() const {
  require_valid();
  std::vector<int> c(coeffs_.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = mod_p(-coeffs_[i], spec_->p);
  return FieldElement(spec_, std::move(c));
}

FieldElement FieldElement::operator*(const FieldElement& o) const {
  require_same_field(o);
  std::vector<int> prod = poly_mul(coeffs_, o.coeffs_, spec_->p);
  std::vector<int> rem = poly_mod(std::move(prod), spec_->modulus, spec_->p);
  rem.resize(spec_->degree, 0);
  return FieldElement(spec_, std::move(rem));
}

FieldElement FieldElement::inverse() const {
  require_valid();
  if (is_zero()) throw DivisionByZero("inverse of the zero field element");
  // Exhaustive search is exact and instantaneous at desk scale (q <= 125).
  for (int code = 1; code < spec_->q(); ++code) {
    FieldElement cand = from_int(spec_, code);
    if ((*this * cand).is_one()) return cand;
  }
  throw InternalError("no multiplicative inverse found; field tables corrupt");
}

FieldElement FieldElement::pow(long long n) const {
  require_valid();
  if (n < 0) return inverse().pow(-n);
  FieldElement base = *this;
  FieldElement acc = one(spec_);
  while (n > 0) {
    if (n & 1) acc = acc * base;
    base = base * base;
    n >>= 1;
  }
  return acc;
}

bool FieldElement::operator==(const FieldElement& o) const {
  require_same_field(o);
  return coeffs_ == o.coeffs_;
}

FieldElement ff_arith(const FieldElement& a, const FieldElement& b, ArithKind kind) {
  switch (kind) {
    case ArithKind::add: return a + b;
    case ArithKind::sub: return a - b;
    case ArithKind::mul: return a * b;
    case ArithKind::inv: return a.inverse();
    case ArithKind::neg: return -a;
  }
  throw InternalError("unknown arithmetic kind");
}

FpMatrix mul_matrix_rep(const FieldElement& z) {
  const FieldRef& spec = z.spec();
  if (!spec) throw InternalError("operation on a null field element");
  const int d = spec->degree;
  FpMatrix m(d, std::vector<int>(d, 0));
  for (int j = 0; j < d; ++j) {
    std::vector<int> basis(d, 0);
    basis[j] = 1;
    FieldElement img = z * FieldElement(spec, std::move(basis));
    for (int i = 0; i < d; ++i) m[i][j] = img.coeffs()[i];
  }
  return m;
}

int ff_trace(const FieldElement& z) {
  FpMatrix m = mul_matrix_rep(z);
  long long t = 0;
  for (std::size_t i = 0; i < m.size(); ++i) t += m[i][i];
  return mod_p(t, z.spec()->p);
}

}  // namespace qnc
