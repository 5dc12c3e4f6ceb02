#pragma once

#include <vector>

#include "deltaclose/echelon.hpp"
#include "deltaclose/translation.hpp"

namespace deltaclose {

// Finite dimensional space of exponential polynomials on R^d, stored as an
// echelon basis over the atoms x^alpha e^{lambda . x}.
class FunctionSubspace {
 public:
  FunctionSubspace(FieldPtr field, std::size_t dim) : field_(field), dim_(dim), echelon_(std::move(field)) {}

  const FieldPtr& field() const { return field_; }
  std::size_t ambient_dim() const { return dim_; }
  std::size_t dimension() const { return echelon_.rank(); }
  const EchelonBasis& echelon() const { return echelon_; }
  std::vector<ExpPolynomial> basis() const;

  bool contains(const ExpPolynomial& f) const;
  bool contains(const FunctionSubspace& other) const;
  // Adds f; returns whether the dimension grew.
  bool insert(const ExpPolynomial& f);
  // Every basis vector mapped by op stays inside.
  bool invariant_under(const TranslationPolynomial& op) const;

  friend bool operator==(const FunctionSubspace& a, const FunctionSubspace& b) {
    return a.dimension() == b.dimension() && a.contains(b);
  }

 private:
  FieldPtr field_;
  std::size_t dim_;
  EchelonBasis echelon_;
};

FunctionSubspace space_span(const FieldPtr& field, std::size_t dim, const std::vector<ExpPolynomial>& generators);

// V + L(V) + ... + L^n(V). Requires L^n(V) inside V (NotInvariantError(0)).
FunctionSubspace space_one_step_hull(const FunctionSubspace& v, const TranslationPolynomial& op, unsigned n);

struct OperatorPower {
  TranslationPolynomial op;
  unsigned power;
};

// V_0 = V, V_i = (V_{i-1})_{L_i}^{[s_i]}. Every L_i^{s_i} must leave V
// invariant; the first offending index is reported.
FunctionSubspace space_diamond(const FunctionSubspace& v, const std::vector<OperatorPower>& ops);

struct SaturationResult {
  FunctionSubspace space;
  std::size_t iterations = 0;
  bool capped = false;
};

// Adds L_i(basis) until nothing new appears or `cap` rounds have run.
SaturationResult space_saturate_oracle(const FunctionSubspace& v, const std::vector<TranslationPolynomial>& ops,
                                       std::size_t cap);

}  // namespace deltaclose
