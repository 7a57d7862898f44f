#pragma once

#include <memory>
#include <vector>

#include "qnc/errors.hpp"

namespace qnc {

// Small dense matrix over the prime field F_p; entries are ints in [0, p).
using FpMatrix = std::vector<std::vector<int>>;

// Description of the finite field F_q with q = p^degree, as the quotient
// F_p[x] / (modulus).  The modulus is stored little-endian (index = power
// of x), has length degree+1 and leading coefficient 1.  Irreducibility is
// checked at construction by exhaustive trial division, which is cheap at
// the supported desk-scale sizes.
struct FieldSpec {
  int p = 0;
  int degree = 0;
  std::vector<int> modulus;

  FieldSpec(int p, int degree, std::vector<int> modulus);

  int q() const;  // p^degree

  bool operator==(const FieldSpec& o) const {
    return p == o.p && degree == o.degree && modulus == o.modulus;
  }
  bool operator!=(const FieldSpec& o) const { return !(*this == o); }
};

using FieldRef = std::shared_ptr<const FieldSpec>;

// Field with an explicit modulus.
FieldRef make_field(int p, int degree, std::vector<int> modulus);

// Field with the built-in modulus; supported for p in {2, 3, 5} and
// degree <= 3.  GF(4) uses x^2 + x + 1, so the generator a satisfies
// a^2 = a + 1.
FieldRef make_field(int p, int degree = 1);

// One element of F_q in polynomial representation: a length-degree
// coefficient vector over F_p plus a handle to its field.  Elements of
// different fields never mix; any cross-field operation throws
// FieldMismatch.
class FieldElement {
 public:
  FieldElement() = default;  // null element; every operation on it throws
  FieldElement(FieldRef spec, std::vector<int> coeffs);

  static FieldElement zero(const FieldRef& spec);
  static FieldElement one(const FieldRef& spec);
  // Decodes the little-endian base-p packing sum_i c_i p^i used for
  // serialization; code must lie in [0, q).
  static FieldElement from_int(const FieldRef& spec, long long code);

  int to_int() const;
  const std::vector<int>& coeffs() const { return coeffs_; }
  const FieldRef& spec() const { return spec_; }
  bool is_zero() const;
  bool is_one() const;

  FieldElement operator+(const FieldElement& o) const;
  FieldElement operator-(const FieldElement& o) const;
  FieldElement operator*(const FieldElement& o) const;
  FieldElement operator-() const;
  FieldElement inverse() const;
  FieldElement pow(long long n) const;

  bool operator==(const FieldElement& o) const;
  bool operator!=(const FieldElement& o) const { return !(*this == o); }

 private:
  void require_valid() const;
  void require_same_field(const FieldElement& o) const;

  FieldRef spec_;
  std::vector<int> coeffs_;
};

enum class ArithKind { add, sub, mul, inv, neg };

// Uniform entry point for the five field operations; inv and neg ignore b.
FieldElement ff_arith(const FieldElement& a, const FieldElement& b, ArithKind kind);

// Matrix of the multiplication map x -> z*x on F_q viewed as F_p^degree
// (columns are images of the monomial basis 1, x, ..., x^{degree-1}).
FpMatrix mul_matrix_rep(const FieldElement& z);

// Trace map F_q -> F_p: the trace of mul_matrix_rep(z).
int ff_trace(const FieldElement& z);

}  // namespace qnc
