#include "qnc/linalg.hpp"

#include <algorithm>
#include <string>

namespace qnc {

namespace {

FieldRef common_spec(const std::vector<FieldElement>& entries) {
  if (entries.empty()) throw DimensionError("empty entry list has no field");
  const FieldRef& s = entries.front().spec();
  for (const FieldElement& e : entries) {
    if (e.spec() != s && *e.spec() != *s) throw FieldMismatch("mixed fields in one container");
  }
  return s;
}

// Row echelon reduction in place; returns pivot column indices.  Pivots are
// the first nonzero entry of each row (no scaling ambiguity over a field);
// rows are normalized so every pivot is 1 and pivot columns are cleared
// above and below (reduced row echelon form).
std::vector<std::size_t> rref_in_place(FqMatrix& m) {
  std::vector<std::size_t> pivots;
  const std::size_t rows = m.rows(), cols = m.cols();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t pr = rows;
    for (std::size_t i = r; i < rows; ++i) {
      if (!m.at(i, c).is_zero()) {
        pr = i;
        break;
      }
    }
    if (pr == rows) continue;
    if (pr != r) {
      for (std::size_t j = 0; j < cols; ++j) std::swap(m.at(pr, j), m.at(r, j));
    }
    const FieldElement inv = m.at(r, c).inverse();
    for (std::size_t j = 0; j < cols; ++j) m.at(r, j) = inv * m.at(r, j);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || m.at(i, c).is_zero()) continue;
      const FieldElement f = m.at(i, c);
      for (std::size_t j = 0; j < cols; ++j) m.at(i, j) = m.at(i, j) - f * m.at(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace

FqVector::FqVector(FieldRef spec, std::size_t n) : spec_(std::move(spec)) {
  if (!spec_) throw InternalError("vector constructed without a field");
  entries_.assign(n, FieldElement::zero(spec_));
}

FqVector::FqVector(std::vector<FieldElement> entries)
    : spec_(common_spec(entries)), entries_(std::move(entries)) {}

FqVector FqVector::unit(const FieldRef& spec, std::size_t n, std::size_t i) {
  FqVector v(spec, n);
  if (i >= n) throw DimensionError("unit vector index out of range");
  v[i] = FieldElement::one(spec);
  return v;
}

bool FqVector::is_zero() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const FieldElement& e) { return e.is_zero(); });
}

FqVector FqVector::operator+(const FqVector& o) const {
  if (size() != o.size()) throw DimensionError("vector size mismatch in addition");
  FqVector r(spec_, size());
  for (std::size_t i = 0; i < size(); ++i) r[i] = entries_[i] + o[i];
  return r;
}

FqVector FqVector::operator-(const FqVector& o) const {
  if (size() != o.size()) throw DimensionError("vector size mismatch in subtraction");
  FqVector r(spec_, size());
  for (std::size_t i = 0; i < size(); ++i) r[i] = entries_[i] - o[i];
  return r;
}

FqVector FqVector::operator-() const {
  FqVector r(spec_, size());
  for (std::size_t i = 0; i < size(); ++i) r[i] = -entries_[i];
  return r;
}

bool FqVector::operator==(const FqVector& o) const {
  if (size() != o.size()) return false;
  for (std::size_t i = 0; i < size(); ++i) {
    if (entries_[i] != o[i]) return false;
  }
  return true;
}

FqVector operator*(const FieldElement& c, const FqVector& v) {
  FqVector r(v.spec(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = c * v[i];
  return r;
}

FieldElement dot(const FqVector& u, const FqVector& v) {
  if (u.size() != v.size()) throw DimensionError("vector size mismatch in dot product");
  FieldElement acc = FieldElement::zero(u.spec());
  for (std::size_t i = 0; i < u.size(); ++i) acc = acc + u[i] * v[i];
  return acc;
}

FqMatrix::FqMatrix(FieldRef spec, std::size_t rows, std::size_t cols)
    : spec_(std::move(spec)), rows_(rows), cols_(cols) {
  if (!spec_) throw InternalError("matrix constructed without a field");
  data_.assign(rows * cols, FieldElement::zero(spec_));
}

FqMatrix FqMatrix::identity(const FieldRef& spec, std::size_t n) {
  FqMatrix m(spec, n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = FieldElement::one(spec);
  return m;
}

FqMatrix FqMatrix::from_columns(const std::vector<FqVector>& cols) {
  if (cols.empty()) throw DimensionError("cannot build a matrix from zero columns");
  const std::size_t n = cols.front().size();
  FqMatrix m(cols.front().spec(), n, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j].size() != n) throw DimensionError("ragged column lengths");
    for (std::size_t i = 0; i < n; ++i) m.at(i, j) = cols[j][i];
  }
  return m;
}

FqMatrix FqMatrix::from_rows(const std::vector<FqVector>& rows) {
  return from_columns(rows).transpose();
}

FqMatrix FqMatrix::transpose() const {
  FqMatrix m(spec_, cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) m.at(j, i) = at(i, j);
  }
  return m;
}

FqVector FqMatrix::column(std::size_t j) const {
  FqVector v(spec_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = at(i, j);
  return v;
}

FqVector FqMatrix::row(std::size_t i) const {
  FqVector v(spec_, cols_);
  for (std::size_t j = 0; j < cols_; ++j) v[j] = at(i, j);
  return v;
}

FqMatrix FqMatrix::operator*(const FqMatrix& o) const {
  if (cols_ != o.rows_) throw DimensionError("matrix product shape mismatch");
  FqMatrix r(spec_, rows_, o.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = 0; k < cols_; ++k) {
      if (at(i, k).is_zero()) continue;
      for (std::size_t j = 0; j < o.cols_; ++j) {
        r.at(i, j) = r.at(i, j) + at(i, k) * o.at(k, j);
      }
    }
  }
  return r;
}

FqVector FqMatrix::operator*(const FqVector& v) const {
  if (cols_ != v.size()) throw DimensionError("matrix-vector shape mismatch");
  FqVector r(spec_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    FieldElement acc = FieldElement::zero(spec_);
    for (std::size_t j = 0; j < cols_; ++j) acc = acc + at(i, j) * v[j];
    r[i] = acc;
  }
  return r;
}

FqMatrix FqMatrix::operator+(const FqMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionError("matrix shape mismatch");
  FqMatrix r(spec_, rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] + o.data_[i];
  return r;
}

FqMatrix FqMatrix::operator-(const FqMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionError("matrix shape mismatch");
  FqMatrix r(spec_, rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] - o.data_[i];
  return r;
}

FqMatrix FqMatrix::operator-() const {
  FqMatrix r(spec_, rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = -data_[i];
  return r;
}

bool FqMatrix::operator==(const FqMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) return false;
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (data_[i] != o.data_[i]) return false;
  }
  return true;
}

int rank(const FqMatrix& m) {
  FqMatrix work = m;
  return static_cast<int>(rref_in_place(work).size());
}

std::vector<FqVector> kernel_basis(const FqMatrix& m) {
  FqMatrix work = m;
  const std::vector<std::size_t> pivots = rref_in_place(work);
  std::vector<bool> is_pivot(m.cols(), false);
  for (std::size_t c : pivots) is_pivot[c] = true;

  std::vector<FqVector> basis;
  for (std::size_t free_c = 0; free_c < m.cols(); ++free_c) {
    if (is_pivot[free_c]) continue;
    FqVector v(m.spec(), m.cols());
    v[free_c] = FieldElement::one(m.spec());
    for (std::size_t r = 0; r < pivots.size(); ++r) {
      v[pivots[r]] = -work.at(r, free_c);
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

FqMatrix inverse(const FqMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("inverse of a non-square matrix");
  const std::size_t n = m.rows();
  FqMatrix work(m.spec(), n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) work.at(i, j) = m.at(i, j);
    work.at(i, n + i) = FieldElement::one(m.spec());
  }
  const std::vector<std::size_t> pivots = rref_in_place(work);
  if (pivots.size() != n || pivots.back() != n - 1) {
    throw SingularMatrix("matrix is singular");
  }
  FqMatrix inv(m.spec(), n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) inv.at(i, j) = work.at(i, n + j);
  }
  return inv;
}

std::optional<FqVector> solve(const FqMatrix& a, const FqVector& b) {
  if (a.rows() != b.size()) throw DimensionError("solve shape mismatch");
  FqMatrix work(a.spec(), a.rows(), a.cols() + 1);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) work.at(i, j) = a.at(i, j);
    work.at(i, a.cols()) = b[i];
  }
  const std::vector<std::size_t> pivots = rref_in_place(work);
  if (!pivots.empty() && pivots.back() == a.cols()) return std::nullopt;  // 0 = 1 row
  FqVector x(a.spec(), a.cols());
  for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = work.at(r, a.cols());
  return x;
}

std::vector<FqVector> reduce_to_basis(const std::vector<FqVector>& vectors) {
  std::vector<FqVector> basis;
  for (const FqVector& v : vectors) {
    if (v.is_zero()) continue;
    if (basis.empty() || !in_span(basis, v)) basis.push_back(v);
  }
  return basis;
}

bool in_span(const std::vector<FqVector>& basis, const FqVector& v) {
  if (basis.empty()) return v.is_zero();
  return solve(FqMatrix::from_columns(basis), v).has_value();
}

std::vector<FqVector> complete_basis(const std::vector<FqVector>& indep, std::size_t ambient_dim) {
  FieldRef spec;
  if (!indep.empty()) {
    spec = indep.front().spec();
    if (indep.front().size() != ambient_dim) throw DimensionError("ambient dimension mismatch");
  } else {
    throw DimensionError("complete_basis needs at least one vector to infer the field");
  }
  std::vector<FqVector> all = indep;
  std::vector<FqVector> added;
  for (std::size_t i = 0; i < ambient_dim && all.size() < ambient_dim; ++i) {
    FqVector e = FqVector::unit(spec, ambient_dim, i);
    if (!in_span(all, e)) {
      all.push_back(e);
      added.push_back(std::move(e));
    }
  }
  if (all.size() != ambient_dim) throw DegenerateSpan("input vectors were dependent");
  return added;
}

std::vector<FqVector> extend_within(const std::vector<FqVector>& base,
                                    const std::vector<FqVector>& candidates) {
  std::vector<FqVector> all = base;
  std::vector<FqVector> added;
  for (const FqVector& c : candidates) {
    if (c.is_zero()) continue;
    if (all.empty() || !in_span(all, c)) {
      all.push_back(c);
      added.push_back(c);
    }
  }
  return added;
}

std::vector<FqVector> intersect_spans(const std::vector<FqVector>& a,
                                      const std::vector<FqVector>& b) {
  std::vector<FqVector> ab = reduce_to_basis(a);
  std::vector<FqVector> bb = reduce_to_basis(b);
  if (ab.empty() || bb.empty()) return {};
  const std::size_t n = ab.front().size();
  if (bb.front().size() != n) throw DimensionError("intersecting spans of different ambient spaces");
  // x in both spans iff A u = B w has a solution; kernel of [A | -B] gives
  // all such pairs (u, w).
  FqMatrix m(ab.front().spec(), n, ab.size() + bb.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < ab.size(); ++j) m.at(i, j) = ab[j][i];
    for (std::size_t j = 0; j < bb.size(); ++j) m.at(i, ab.size() + j) = -bb[j][i];
  }
  std::vector<FqVector> result;
  for (const FqVector& k : kernel_basis(m)) {
    FqVector x(ab.front().spec(), n);
    for (std::size_t j = 0; j < ab.size(); ++j) x = x + k[j] * ab[j];
    result.push_back(std::move(x));
  }
  return reduce_to_basis(result);
}

FqMatrix projection_onto(const std::vector<FqVector>& span,
                         const std::optional<std::vector<FqVector>>& complement_hint) {
  if (span.empty()) throw DegenerateSpan("projection onto the zero space is not supported");
  const std::size_t n = span.front().size();
  FqMatrix basis_m = FqMatrix::from_columns(span);
  if (rank(basis_m) != static_cast<int>(span.size())) {
    throw DegenerateSpan("span vectors are linearly dependent");
  }
  std::vector<FqVector> complement;
  if (complement_hint) {
    complement = *complement_hint;
    if (complement.size() + span.size() != n) {
      throw DimensionError("complement hint has the wrong dimension");
    }
  } else {
    complement = complete_basis(span, n);
  }
  std::vector<FqVector> full = span;
  full.insert(full.end(), complement.begin(), complement.end());
  FqMatrix t = FqMatrix::from_columns(full);
  FqMatrix t_inv = inverse(t);  // throws if the hint does not complete a basis
  // P = T diag(I_k, 0) T^{-1}: keep the span coordinates, drop the rest.
  FqMatrix d(span.front().spec(), n, n);
  for (std::size_t i = 0; i < span.size(); ++i) d.at(i, i) = FieldElement::one(span.front().spec());
  return t * d * t_inv;
}

}  // namespace qnc
