#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "qnc/field.hpp"

namespace qnc {

// Column vector over F_q.  All entries share one field.
class FqVector {
 public:
  FqVector() = default;
  FqVector(FieldRef spec, std::size_t n);  // zero vector
  explicit FqVector(std::vector<FieldElement> entries);

  static FqVector unit(const FieldRef& spec, std::size_t n, std::size_t i);

  std::size_t size() const { return entries_.size(); }
  const FieldElement& operator[](std::size_t i) const { return entries_[i]; }
  FieldElement& operator[](std::size_t i) { return entries_[i]; }
  const FieldRef& spec() const { return spec_; }
  bool is_zero() const;

  FqVector operator+(const FqVector& o) const;
  FqVector operator-(const FqVector& o) const;
  FqVector operator-() const;
  bool operator==(const FqVector& o) const;
  bool operator!=(const FqVector& o) const { return !(*this == o); }

 private:
  FieldRef spec_;
  std::vector<FieldElement> entries_;
};

FqVector operator*(const FieldElement& c, const FqVector& v);
FieldElement dot(const FqVector& u, const FqVector& v);

// Dense rectangular matrix over F_q, row-major.
class FqMatrix {
 public:
  FqMatrix() = default;
  FqMatrix(FieldRef spec, std::size_t rows, std::size_t cols);  // zeros

  static FqMatrix identity(const FieldRef& spec, std::size_t n);
  static FqMatrix from_columns(const std::vector<FqVector>& cols);
  static FqMatrix from_rows(const std::vector<FqVector>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const FieldElement& at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  FieldElement& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const FieldRef& spec() const { return spec_; }

  FqMatrix transpose() const;
  FqVector column(std::size_t j) const;
  FqVector row(std::size_t i) const;

  FqMatrix operator*(const FqMatrix& o) const;
  FqVector operator*(const FqVector& v) const;
  FqMatrix operator+(const FqMatrix& o) const;
  FqMatrix operator-(const FqMatrix& o) const;
  FqMatrix operator-() const;
  bool operator==(const FqMatrix& o) const;
  bool operator!=(const FqMatrix& o) const { return !(*this == o); }

 private:
  FieldRef spec_;
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<FieldElement> data_;
};

// Exact Gaussian elimination with first-nonzero pivoting throughout;
// results are deterministic functions of the input.
int rank(const FqMatrix& m);

// Basis of the right null space {x : Mx = 0}; empty iff full column rank.
// Each basis vector has 1 at its free coordinate (standard parametric form).
std::vector<FqVector> kernel_basis(const FqMatrix& m);

FqMatrix inverse(const FqMatrix& m);  // throws SingularMatrix

// One solution of Ax = b, or nullopt when inconsistent.  Free coordinates
// are set to zero, so the result is deterministic.
std::optional<FqVector> solve(const FqMatrix& a, const FqVector& b);

// Idempotent P with Im P = span.  The complement of the span is either the
// validated hint or the deterministic greedy extension by standard basis
// vectors in index order.
FqMatrix projection_onto(const std::vector<FqVector>& span,
                         const std::optional<std::vector<FqVector>>& complement_hint = std::nullopt);

// Subspace helpers shared by the symplectic machinery.  All are exact and
// deterministic in the order of their inputs.
std::vector<FqVector> reduce_to_basis(const std::vector<FqVector>& vectors);
bool in_span(const std::vector<FqVector>& basis, const FqVector& v);
// Standard basis vectors (in index order) extending `indep` to a basis of
// the ambient space; returns only the added vectors.
std::vector<FqVector> complete_basis(const std::vector<FqVector>& indep, std::size_t ambient_dim);
// Vectors from `candidates` (in order) that extend span(base) to
// span(base + candidates); the added vectors span a complement of
// span(base) inside span(base + candidates).
std::vector<FqVector> extend_within(const std::vector<FqVector>& base,
                                    const std::vector<FqVector>& candidates);
std::vector<FqVector> intersect_spans(const std::vector<FqVector>& a,
                                      const std::vector<FqVector>& b);

}  // namespace qnc
