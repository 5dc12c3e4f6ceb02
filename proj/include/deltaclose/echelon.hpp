#pragma once

#include <vector>

#include "deltaclose/exp_polynomial.hpp"

namespace deltaclose {

// Row echelon basis over the formal-exponential ring. Elimination is
// fraction free: a row is subtracted after scaling the target by the pivot,
// unless the pivot divides the target entry exactly. Rows are normalized to
// pivot 1 whenever the pivot divides the whole row.
class EchelonBasis {
 public:
  explicit EchelonBasis(FieldPtr field) : field_(std::move(field)) {}

  const FieldPtr& field() const { return field_; }
  const std::vector<SparseVector>& rows() const { return rows_; }
  std::size_t rank() const { return rows_.size(); }

  // Remainder of v after elimination against every row; empty iff v lies in
  // the span (over the fraction field) of the rows.
  SparseVector reduce(SparseVector v) const;
  bool contains(const SparseVector& v) const { return reduce(v).empty(); }
  // Adds v when independent; returns whether the rank grew.
  bool insert(const SparseVector& v);

 private:
  static void normalize(SparseVector& row);

  FieldPtr field_;
  std::vector<SparseVector> rows_;  // sorted by pivot atom
};

// v += c * w
void axpy(SparseVector& v, const ExpCoefficient& c, const SparseVector& w);

}  // namespace deltaclose
