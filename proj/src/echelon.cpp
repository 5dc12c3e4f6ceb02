#include "deltaclose/echelon.hpp"

#include <algorithm>

namespace deltaclose {

void axpy(SparseVector& v, const ExpCoefficient& c, const SparseVector& w) {
  if (c.is_zero()) return;
  for (const auto& [atom, x] : w) {
    ExpCoefficient term = c * x;
    auto it = v.find(atom);
    if (it == v.end()) {
      if (!term.is_zero()) v.emplace(atom, std::move(term));
      continue;
    }
    it->second += term;
    if (it->second.is_zero()) v.erase(it);
  }
}

namespace {

void scale_in_place(SparseVector& v, const ExpCoefficient& c) {
  for (auto& [atom, x] : v) x = x * c;
}

}  // namespace

void EchelonBasis::normalize(SparseVector& row) {
  if (row.empty()) return;
  const ExpCoefficient pivot = row.begin()->second;
  if (pivot.is_one()) return;
  if (pivot.is_unit()) {
    scale_in_place(row, pivot.unit_inverse());
    return;
  }
  SparseVector divided;
  for (const auto& [atom, x] : row) {
    auto q = x.exact_div(pivot);
    if (!q) return;
    divided.emplace(atom, std::move(*q));
  }
  row = std::move(divided);
}

SparseVector EchelonBasis::reduce(SparseVector v) const {
  for (const auto& row : rows_) {
    if (v.empty()) break;
    const auto& [pivot_atom, pivot] = *row.begin();
    auto it = v.find(pivot_atom);
    if (it == v.end()) continue;
    const ExpCoefficient c = it->second;
    if (pivot.is_one()) {
      axpy(v, -c, row);
    } else if (auto q = c.exact_div(pivot)) {
      axpy(v, -*q, row);
    } else {
      scale_in_place(v, pivot);
      axpy(v, -c, row);
    }
  }
  return v;
}

bool EchelonBasis::insert(const SparseVector& v) {
  SparseVector r = reduce(v);
  if (r.empty()) return false;
  normalize(r);
  AtomLess less;
  auto pos = std::lower_bound(rows_.begin(), rows_.end(), r, [&](const SparseVector& a, const SparseVector& b) {
    return less(a.begin()->first, b.begin()->first);
  });
  rows_.insert(pos, std::move(r));
  return true;
}

}  // namespace deltaclose
