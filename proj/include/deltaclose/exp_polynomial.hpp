#pragma once

#include <complex>
#include <map>
#include <span>
#include <vector>

#include "deltaclose/exp_coefficient.hpp"

namespace deltaclose {

using MultiIndex = std::vector<unsigned>;
unsigned total_degree(const MultiIndex& a);

// Polynomial part of an exponential monomial: alpha -> coefficient, with no
// zero coefficients stored.
using PolyPart = std::map<MultiIndex, ExpCoefficient>;

void poly_add_term(PolyPart& p, const MultiIndex& alpha, const ExpCoefficient& c);
void poly_add(PolyPart& p, const PolyPart& q);
PolyPart poly_scale(const PolyPart& p, const ExpCoefficient& c);
PolyPart poly_mul(const PolyPart& p, const PolyPart& q);
// p(x + y)
PolyPart poly_translate(const PolyPart& p, const FieldVector& y);
// d/dx_i p
PolyPart poly_derivative(const PolyPart& p, std::size_t i);
int poly_degree(const PolyPart& p);

// Finite sum of p_j(x) e^{lambda_j . x} on R^d with pairwise distinct complex
// frequencies lambda_j and coefficients in the formal-exponential ring.
class ExpPolynomial {
 public:
  using TermMap = std::map<ComplexVector, PolyPart, KeyLess>;

  ExpPolynomial(FieldPtr field, std::size_t dim);

  // coeff * x^alpha * e^{lambda . x}
  static ExpPolynomial monomial(const ComplexVector& lambda, const MultiIndex& alpha, const ExpCoefficient& coeff);
  static ExpPolynomial constant(const FieldPtr& field, std::size_t dim, const ExpCoefficient& c);
  static ComplexVector zero_frequency(const FieldPtr& field, std::size_t dim);

  const FieldPtr& field() const { return field_; }
  std::size_t dim() const { return dim_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::vector<ComplexVector> frequencies() const;
  // Maximum total degree at lambda; -1 when lambda is absent.
  int degree_at(const ComplexVector& lambda) const;
  const PolyPart* part_at(const ComplexVector& lambda) const;

  void add_term(const ComplexVector& lambda, const MultiIndex& alpha, const ExpCoefficient& c);
  void add_part(const ComplexVector& lambda, const PolyPart& p);

  ExpPolynomial operator-() const;
  ExpPolynomial& operator+=(const ExpPolynomial& o);
  ExpPolynomial& operator-=(const ExpPolynomial& o);
  ExpPolynomial& operator*=(const ExpCoefficient& c);
  friend ExpPolynomial operator+(ExpPolynomial a, const ExpPolynomial& b) { return a += b; }
  friend ExpPolynomial operator-(ExpPolynomial a, const ExpPolynomial& b) { return a -= b; }
  friend ExpPolynomial operator*(ExpPolynomial a, const ExpCoefficient& c) { return a *= c; }
  friend bool operator==(const ExpPolynomial& a, const ExpPolynomial& b);
  friend bool operator!=(const ExpPolynomial& a, const ExpPolynomial& b) { return !(a == b); }

  ExpPolynomial conj() const;
  // Equal to its own complex conjugate, hence real valued on R^d.
  bool is_real() const { return conj() == *this; }
  // Only frequency zero, every coefficient a constant.
  bool is_plain_polynomial() const;

 private:
  FieldPtr field_;
  std::size_t dim_;
  TermMap terms_;
};

// (tau_y f)(x) = f(x + y)
ExpPolynomial ep_translate(const ExpPolynomial& f, const FieldVector& y);
// Sum_k binom(m,k) (-1)^(m-k) tau_{k h} f
ExpPolynomial ep_forward_difference(const ExpPolynomial& f, const FieldVector& h, unsigned m);
// Basis of the smallest translation invariant space containing f.
std::vector<ExpPolynomial> ep_translation_hull(const ExpPolynomial& f);
// x -> f(A x) where A has f.dim() rows of length new_dim.
ExpPolynomial ep_compose_linear(const ExpPolynomial& f, const std::vector<FieldVector>& rows, std::size_t new_dim);
// Component of f with frequency lambda, as its own exponential polynomial.
ExpPolynomial ep_component(const ExpPolynomial& f, const ComplexVector& lambda);

// Double precision image of an exponential polynomial, for repeated
// evaluation on grids. Coefficients are rounded from 80-bit evaluations.
class NumericExpPoly {
 public:
  NumericExpPoly() = default;
  explicit NumericExpPoly(const ExpPolynomial& f);

  std::size_t dim() const { return dim_; }
  std::complex<double> operator()(std::span<const double> x) const;
  // Value together with a first order rounding error bound.
  std::complex<double> eval(std::span<const double> x, double& error_bound) const;

 private:
  struct Term {
    std::vector<std::complex<double>> lambda;
    std::vector<std::pair<MultiIndex, std::complex<double>>> poly;
    double coeff_error = 0.0;
  };
  std::size_t dim_ = 0;
  unsigned max_degree_ = 0;
  std::vector<Term> terms_;
};

struct EvalResult {
  std::complex<double> value;
  double error_bound;
};

EvalResult ep_eval(const ExpPolynomial& f, std::span<const double> x);
// Exact value at a field point: sum c x^alpha e^{lambda . x}.
ExpCoefficient ep_eval_exact(const ExpPolynomial& f, const FieldVector& x);

// Atoms x^alpha e^{lambda . x} index the coordinates of exponential
// polynomials; ordered by frequency, then higher total degree first.
struct Atom {
  ComplexVector lambda;
  MultiIndex alpha;
};

struct AtomLess {
  bool operator()(const Atom& a, const Atom& b) const;
};

using SparseVector = std::map<Atom, ExpCoefficient, AtomLess>;

SparseVector to_sparse(const ExpPolynomial& f);
ExpPolynomial from_sparse(const FieldPtr& field, std::size_t dim, const SparseVector& v);

}  // namespace deltaclose
