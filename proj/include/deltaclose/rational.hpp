#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace deltaclose {

// Parses "p/q", "p" or a finite decimal such as "-1.25" into a canonical
// rational. Throws Error(Malformed) on anything else.
mpq_class parse_rational(std::string_view text);

// Canonical "p/q" text ("p" when the denominator is one).
std::string format_rational(const mpq_class& q);

mpq_class binomial(unsigned n, unsigned k);
mpz_class factorial(unsigned n);

// Dense univariate polynomial over Q, coefficients stored constant term first.
// The zero polynomial has an empty coefficient list.
class QPoly {
 public:
  QPoly() = default;
  explicit QPoly(std::vector<mpq_class> coeffs);

  static QPoly monomial(const mpq_class& c, std::size_t power);

  const std::vector<mpq_class>& coeffs() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  // Degree of the zero polynomial is reported as -1.
  long degree() const { return static_cast<long>(c_.size()) - 1; }
  const mpq_class& leading() const { return c_.back(); }
  mpq_class coeff(std::size_t i) const { return i < c_.size() ? c_[i] : mpq_class(0); }

  mpq_class eval(const mpq_class& x) const;
  QPoly derivative() const;
  QPoly monic() const;

  friend QPoly operator+(const QPoly& a, const QPoly& b);
  friend QPoly operator-(const QPoly& a, const QPoly& b);
  friend QPoly operator*(const QPoly& a, const QPoly& b);
  friend bool operator==(const QPoly& a, const QPoly& b) { return a.c_ == b.c_; }

  // Euclidean division a = q*b + r with deg r < deg b. b must be nonzero.
  static void divmod(const QPoly& a, const QPoly& b, QPoly& q, QPoly& r);
  // Monic gcd (zero when both inputs are zero).
  static QPoly gcd(QPoly a, QPoly b);
  // Returns g = gcd(a, b) (monic) and s with s*a = g (mod b).
  static QPoly gcdex(const QPoly& a, const QPoly& b, QPoly& s);

  // Number of distinct real roots in the half-open interval (lo, hi],
  // computed from the Sturm sequence.
  std::size_t sturm_count(const mpq_class& lo, const mpq_class& hi) const;

 private:
  void trim();
  std::vector<mpq_class> c_;
};

}  // namespace deltaclose
