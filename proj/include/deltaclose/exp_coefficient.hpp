#pragma once

#include <complex>
#include <map>
#include <optional>

#include "deltaclose/number_field.hpp"

namespace deltaclose {

// Element of the group ring spanned by formal exponentials e^mu, mu in
// Q(theta)(i), with coefficients in Q(theta)(i). Distinct algebraic exponents
// give linearly independent exponentials (Lindemann-Weierstrass), so the
// canonical term map doubles as an exact zero test.
class ExpCoefficient {
 public:
  using TermMap = std::map<ComplexAlgebraic, ComplexAlgebraic, KeyLess>;

  explicit ExpCoefficient(FieldPtr field);
  explicit ExpCoefficient(const ComplexAlgebraic& constant);
  explicit ExpCoefficient(const AlgebraicScalar& constant) : ExpCoefficient(ComplexAlgebraic(constant)) {}

  static ExpCoefficient one(const FieldPtr& field);
  static ExpCoefficient rational(const FieldPtr& field, const mpq_class& q);
  // coeff * e^mu
  static ExpCoefficient exponential(const ComplexAlgebraic& mu, const ComplexAlgebraic& coeff);
  static ExpCoefficient exponential(const ComplexAlgebraic& mu);
  // Builds from arbitrary (possibly repeated or zero) terms and canonicalizes.
  static ExpCoefficient from_terms(const FieldPtr& field,
                                   const std::vector<std::pair<ComplexAlgebraic, ComplexAlgebraic>>& terms);

  const FieldPtr& field() const { return field_; }
  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_one() const;
  // Only the e^0 term (or zero).
  bool is_constant() const;
  ComplexAlgebraic constant_value() const;
  // A single term c e^mu is a unit of the group ring.
  bool is_unit() const { return terms_.size() == 1; }

  ExpCoefficient conj() const;
  ExpCoefficient operator-() const;
  ExpCoefficient& operator+=(const ExpCoefficient& o);
  ExpCoefficient& operator-=(const ExpCoefficient& o);
  ExpCoefficient& operator*=(const ComplexAlgebraic& c);
  ExpCoefficient& operator*=(const AlgebraicScalar& c);

  friend ExpCoefficient operator+(ExpCoefficient a, const ExpCoefficient& b) { return a += b; }
  friend ExpCoefficient operator-(ExpCoefficient a, const ExpCoefficient& b) { return a -= b; }
  friend ExpCoefficient operator*(const ExpCoefficient& a, const ExpCoefficient& b);
  friend ExpCoefficient operator*(ExpCoefficient a, const ComplexAlgebraic& c) { return a *= c; }
  friend ExpCoefficient operator*(ExpCoefficient a, const AlgebraicScalar& c) { return a *= c; }
  friend bool operator==(const ExpCoefficient& a, const ExpCoefficient& b);
  friend bool operator!=(const ExpCoefficient& a, const ExpCoefficient& b) { return !(a == b); }

  ExpCoefficient pow(unsigned n) const;
  // Inverse of a unit c e^mu.
  ExpCoefficient unit_inverse() const;

  // Quotient a / b when it exists in the group ring. Long division by the
  // leading exponent in the (additive) key order; the quotient support is
  // bounded below by low(a) - low(b), which detects non-divisibility.
  std::optional<ExpCoefficient> exact_div(const ExpCoefficient& b) const;

  static int compare(const ExpCoefficient& a, const ExpCoefficient& b);

 private:
  FieldPtr field_;
  TermMap terms_;
};

ExpCoefficient expcoef_mul(const ExpCoefficient& a, const ExpCoefficient& b);

}  // namespace deltaclose
