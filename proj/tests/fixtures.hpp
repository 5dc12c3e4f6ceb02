#pragma once

#include <random>

#include "deltaclose/exp_polynomial.hpp"

namespace fixtures {

using namespace deltaclose;

inline FieldPtr sqrt2() {
  static FieldPtr f = NumberField::make({mpq_class(-2), mpq_class(0), mpq_class(1)}, mpq_class(1), mpq_class(2));
  return f;
}

inline FieldPtr rationals() { return NumberField::rationals(); }

inline AlgebraicScalar q(const FieldPtr& f, long num, long den = 1) {
  return AlgebraicScalar(f, mpq_class(num, den));
}

// a + b theta
inline AlgebraicScalar ab(const FieldPtr& f, long a, long b) {
  return AlgebraicScalar(f, std::vector<mpq_class>{mpq_class(a), mpq_class(b)});
}

inline FieldVector vec(const FieldPtr& f, std::initializer_list<long> xs) {
  FieldVector v;
  for (long x : xs) v.push_back(q(f, x));
  return v;
}

inline AlgebraicScalar random_scalar(const FieldPtr& f, std::mt19937_64& rng, long height = 5) {
  std::uniform_int_distribution<long> num(-height, height), den(1, 3);
  std::vector<mpq_class> c;
  for (std::size_t i = 0; i < f->degree(); ++i) {
    mpq_class x(num(rng), den(rng));
    x.canonicalize();
    c.push_back(x);
  }
  return AlgebraicScalar(f, c);
}

inline ComplexVector real_frequency(const FieldVector& v) {
  ComplexVector out;
  for (const auto& x : v) out.emplace_back(x);
  return out;
}

inline FieldVector random_vector(const FieldPtr& f, std::size_t dim, std::mt19937_64& rng, long height = 3) {
  FieldVector v;
  for (std::size_t i = 0; i < dim; ++i) v.push_back(random_scalar(f, rng, height));
  return v;
}

// Sum of up to `freqs` terms p_j(x) e^{lambda_j . x} with small algebraic data.
// Frequencies are real unless `complex` is set.
inline ExpPolynomial random_exppoly(const FieldPtr& f, std::size_t dim, std::mt19937_64& rng, int freqs = 3,
                                    unsigned max_deg = 2, bool complex = true) {
  ExpPolynomial out(f, dim);
  const int n = 1 + static_cast<int>(rng() % static_cast<unsigned>(freqs));
  for (int j = 0; j < n; ++j) {
    ComplexVector lambda;
    const bool zero = (rng() % 3 == 0);
    for (std::size_t i = 0; i < dim; ++i) {
      if (zero) {
        lambda.emplace_back(f);
      } else {
        AlgebraicScalar im = complex && rng() % 2 ? random_scalar(f, rng, 2) : AlgebraicScalar(f);
        lambda.emplace_back(random_scalar(f, rng, 2) * mpq_class(1, 2), im);
      }
    }
    const int monos = 1 + static_cast<int>(rng() % 3);
    for (int k = 0; k < monos; ++k) {
      MultiIndex alpha(dim, 0);
      unsigned budget = static_cast<unsigned>(rng() % (max_deg + 1));
      for (unsigned b = 0; b < budget; ++b) ++alpha[rng() % dim];
      ComplexAlgebraic c(random_scalar(f, rng), random_scalar(f, rng));
      if (!c.is_zero()) out.add_term(lambda, alpha, ExpCoefficient(c));
    }
  }
  return out;
}

}  // namespace fixtures
