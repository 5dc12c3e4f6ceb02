#pragma once

#include <gmpxx.h>

#include <optional>
#include <vector>

#include "deltaclose/error.hpp"
#include "deltaclose/number_field.hpp"

namespace deltaclose {

template <class T>
using Matrix = std::vector<std::vector<T>>;

inline bool scalar_is_zero(const mpq_class& q) { return sgn(q) == 0; }
inline bool scalar_is_zero(const AlgebraicScalar& x) { return x.is_zero(); }
inline mpq_class scalar_like(const mpq_class&, long v) { return mpq_class(v); }
inline AlgebraicScalar scalar_like(const AlgebraicScalar& x, long v) { return AlgebraicScalar(x.field(), mpq_class(v)); }
inline mpq_class scalar_inverse(const mpq_class& q) { return 1 / q; }
inline AlgebraicScalar scalar_inverse(const AlgebraicScalar& x) { return x.inverse(); }

template <class T>
struct Rref {
  Matrix<T> rows;                   // nonzero rows, pivot entries 1
  std::vector<std::size_t> pivots;  // pivot column of each row
};

// Reduced row echelon form by Gauss-Jordan elimination over a field.
template <class T>
Rref<T> rref(Matrix<T> a) {
  Rref<T> out;
  if (a.empty()) return out;
  const std::size_t n = a[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < a.size(); ++c) {
    std::size_t p = r;
    while (p < a.size() && scalar_is_zero(a[p][c])) ++p;
    if (p == a.size()) continue;
    std::swap(a[p], a[r]);
    const T inv = scalar_inverse(a[r][c]);
    for (auto& x : a[r]) x = x * inv;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i == r || scalar_is_zero(a[i][c])) continue;
      const T f = a[i][c];
      for (std::size_t j = c; j < n; ++j)
        if (!scalar_is_zero(a[r][j])) a[i][j] = a[i][j] - f * a[r][j];
    }
    out.pivots.push_back(c);
    ++r;
  }
  a.resize(r);
  out.rows = std::move(a);
  return out;
}

// Basis of {x : A x = 0}; one vector per free column, that column set to 1.
template <class T>
Matrix<T> kernel(const Matrix<T>& a, std::size_t ncols, const T& zero) {
  Matrix<T> basis;
  Rref<T> r = rref(a);
  std::vector<bool> is_pivot(ncols, false);
  for (std::size_t p : r.pivots) is_pivot[p] = true;
  for (std::size_t f = 0; f < ncols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<T> v(ncols, zero);
    v[f] = scalar_like(zero, 1);
    for (std::size_t i = 0; i < r.rows.size(); ++i) v[r.pivots[i]] = -r.rows[i][f];
    basis.push_back(std::move(v));
  }
  return basis;
}

template <class T>
std::size_t rank(const Matrix<T>& a) {
  return rref(a).rows.size();
}

// Rational coordinates of a field vector: entry (i, j) of the result is the
// theta^j coordinate of v_i, flattened as i * degree + j.
std::vector<mpq_class> rational_coordinates(const FieldVector& v);

// Orthogonal projection of x onto span(basis) for the standard inner
// product; basis rows must be independent.
FieldVector orthogonal_projection(const std::vector<FieldVector>& basis, const FieldVector& x);
// Field basis of the orthogonal complement of span(vectors) in F^dim.
std::vector<FieldVector> orthogonal_complement(const FieldPtr& field, const std::vector<FieldVector>& vectors,
                                               std::size_t dim);
// Solves c * rows = x over the field; nullopt when x is outside the span.
std::optional<std::vector<AlgebraicScalar>> coordinates_in(const std::vector<FieldVector>& rows, const FieldVector& x);

using IntMatrix = Matrix<mpz_class>;

struct HermiteForm {
  IntMatrix h;  // U * A, upper echelon, positive pivots, reduced above pivots
  IntMatrix u;  // unimodular
  std::size_t rank = 0;
};

// Row Hermite normal form with the unimodular transform.
HermiteForm hermite_rows(const IntMatrix& a);

// Scales each rational row by the lcm of its denominators.
IntMatrix integer_rows(const Matrix<mpq_class>& a);

}  // namespace deltaclose
