#pragma once

#include <gmpxx.h>

#include <complex>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "deltaclose/error.hpp"
#include "deltaclose/rational.hpp"

namespace deltaclose {

class NumberField;
using FieldPtr = std::shared_ptr<const NumberField>;

// A real number field Q(theta) given by the minimal polynomial of theta and a
// rational interval isolating the real root that theta denotes.
class NumberField {
 public:
  // minpoly is listed constant term first and must be monic. Throws
  // NotSquareFree, NoSignChange or Malformed.
  static FieldPtr make(std::vector<mpq_class> minpoly, mpq_class lo, mpq_class hi);
  // Q itself, encoded as theta = 0 with minimal polynomial x.
  static FieldPtr rationals();

  std::size_t degree() const { return degree_; }
  const QPoly& minimal_polynomial() const { return minpoly_; }
  std::pair<mpq_class, mpq_class> isolating_interval() const { return {lo0_, hi0_}; }

  // Rational interval containing theta of width at most 2^-bits. Refinements
  // are cached behind a mutex, so this is safe to call concurrently.
  std::pair<mpq_class, mpq_class> enclosure(unsigned bits) const;
  // Rational within 2^-64 of theta, and its double rounding.
  const mpq_class& theta_approx() const { return theta_approx_; }
  double theta_double() const { return theta_double_; }

  // theta^(degree + j) written in the power basis, for j = 0 .. degree-2.
  const std::vector<std::vector<mpq_class>>& reduction_table() const { return reduction_; }

  bool same_as(const NumberField& other) const;

 private:
  NumberField() = default;

  QPoly minpoly_;
  std::size_t degree_ = 0;
  mpq_class lo0_, hi0_;
  int sign_lo_ = 0;
  std::vector<std::vector<mpq_class>> reduction_;
  mpq_class theta_approx_;
  double theta_double_ = 0.0;

  mutable std::mutex mutex_;
  mutable mpq_class lo_, hi_;
};

void require_same_field(const FieldPtr& a, const FieldPtr& b);

// Element of Q(theta) in the power basis 1, theta, ..., theta^(n-1).
class AlgebraicScalar {
 public:
  explicit AlgebraicScalar(FieldPtr field);
  AlgebraicScalar(FieldPtr field, const mpq_class& value);
  // Coordinates longer than the degree are reduced modulo the minimal polynomial.
  AlgebraicScalar(FieldPtr field, std::vector<mpq_class> coords);

  static AlgebraicScalar theta(FieldPtr field);

  const FieldPtr& field() const { return field_; }
  const std::vector<mpq_class>& coords() const { return coords_; }

  bool is_zero() const;
  bool is_rational() const;
  // Requires is_rational().
  const mpq_class& rational_value() const { return coords_[0]; }

  // Exact sign by interval refinement of theta. A nonzero coordinate vector
  // that never separates from zero means the minimal polynomial was not
  // irreducible, reported as ZeroDivisor.
  int sign() const;
  mpz_class floor() const;
  double to_double() const;
  // Exact value of the coordinate polynomial at a rational point.
  mpq_class value_at(const mpq_class& theta) const;

  AlgebraicScalar inverse() const;
  AlgebraicScalar operator-() const;
  AlgebraicScalar& operator+=(const AlgebraicScalar& o);
  AlgebraicScalar& operator-=(const AlgebraicScalar& o);
  AlgebraicScalar& operator*=(const AlgebraicScalar& o);
  AlgebraicScalar& operator*=(const mpq_class& q);
  AlgebraicScalar& operator/=(const AlgebraicScalar& o) { return *this *= o.inverse(); }

  friend AlgebraicScalar operator+(AlgebraicScalar a, const AlgebraicScalar& b) { return a += b; }
  friend AlgebraicScalar operator-(AlgebraicScalar a, const AlgebraicScalar& b) { return a -= b; }
  friend AlgebraicScalar operator*(AlgebraicScalar a, const AlgebraicScalar& b) { return a *= b; }
  friend AlgebraicScalar operator*(AlgebraicScalar a, const mpq_class& q) { return a *= q; }
  friend AlgebraicScalar operator/(AlgebraicScalar a, const AlgebraicScalar& b) { return a /= b; }
  friend bool operator==(const AlgebraicScalar& a, const AlgebraicScalar& b);
  friend bool operator!=(const AlgebraicScalar& a, const AlgebraicScalar& b) { return !(a == b); }

  // Lexicographic order on coordinates. Compatible with addition, so it is a
  // group order; it is NOT the order of the real numbers (use sign()).
  static int key_compare(const AlgebraicScalar& a, const AlgebraicScalar& b);

 private:
  FieldPtr field_;
  std::vector<mpq_class> coords_;
};

// Element of Q(theta)(i).
class ComplexAlgebraic {
 public:
  explicit ComplexAlgebraic(const FieldPtr& field) : re_(field), im_(field) {}
  explicit ComplexAlgebraic(AlgebraicScalar re) : re_(std::move(re)), im_(re_.field()) {}
  ComplexAlgebraic(AlgebraicScalar re, AlgebraicScalar im);

  const FieldPtr& field() const { return re_.field(); }
  const AlgebraicScalar& re() const { return re_; }
  const AlgebraicScalar& im() const { return im_; }

  bool is_zero() const { return re_.is_zero() && im_.is_zero(); }
  bool is_real() const { return im_.is_zero(); }
  ComplexAlgebraic conj() const { return {re_, -im_}; }
  ComplexAlgebraic inverse() const;
  std::complex<double> to_complex() const { return {re_.to_double(), im_.to_double()}; }

  ComplexAlgebraic operator-() const { return {-re_, -im_}; }
  ComplexAlgebraic& operator+=(const ComplexAlgebraic& o);
  ComplexAlgebraic& operator-=(const ComplexAlgebraic& o);
  ComplexAlgebraic& operator*=(const ComplexAlgebraic& o);
  ComplexAlgebraic& operator*=(const AlgebraicScalar& s);
  ComplexAlgebraic& operator/=(const ComplexAlgebraic& o) { return *this *= o.inverse(); }

  friend ComplexAlgebraic operator+(ComplexAlgebraic a, const ComplexAlgebraic& b) { return a += b; }
  friend ComplexAlgebraic operator-(ComplexAlgebraic a, const ComplexAlgebraic& b) { return a -= b; }
  friend ComplexAlgebraic operator*(ComplexAlgebraic a, const ComplexAlgebraic& b) { return a *= b; }
  friend ComplexAlgebraic operator*(ComplexAlgebraic a, const AlgebraicScalar& s) { return a *= s; }
  friend ComplexAlgebraic operator/(ComplexAlgebraic a, const ComplexAlgebraic& b) { return a /= b; }
  friend bool operator==(const ComplexAlgebraic& a, const ComplexAlgebraic& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend bool operator!=(const ComplexAlgebraic& a, const ComplexAlgebraic& b) { return !(a == b); }

  static int key_compare(const ComplexAlgebraic& a, const ComplexAlgebraic& b);

 private:
  AlgebraicScalar re_, im_;
};

struct KeyLess {
  bool operator()(const AlgebraicScalar& a, const AlgebraicScalar& b) const {
    return AlgebraicScalar::key_compare(a, b) < 0;
  }
  bool operator()(const ComplexAlgebraic& a, const ComplexAlgebraic& b) const {
    return ComplexAlgebraic::key_compare(a, b) < 0;
  }
  template <class T>
  bool operator()(const std::vector<T>& a, const std::vector<T>& b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), *this);
  }
};

// Points and directions in R^d / C^d with field coordinates.
using FieldVector = std::vector<AlgebraicScalar>;
using ComplexVector = std::vector<ComplexAlgebraic>;

FieldVector zero_vector(const FieldPtr& field, std::size_t dim);
AlgebraicScalar dot(const FieldVector& a, const FieldVector& b);
ComplexAlgebraic dot(const ComplexVector& a, const FieldVector& b);
FieldVector operator+(const FieldVector& a, const FieldVector& b);
FieldVector operator-(const FieldVector& a, const FieldVector& b);
FieldVector scaled(const FieldVector& a, const AlgebraicScalar& s);
bool is_zero(const FieldVector& v);
std::vector<double> to_doubles(const FieldVector& v);

}  // namespace deltaclose
