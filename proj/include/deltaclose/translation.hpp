#pragma once

#include <complex>
#include <map>
#include <optional>
#include <vector>

#include "deltaclose/exp_polynomial.hpp"

namespace deltaclose {

// Element of the group ring of (R^d, +) with ExpCoefficient weights:
// sum_y c_y tau_y. Negative powers of tau_h are shifts by -h.
class TranslationPolynomial {
 public:
  using TermMap = std::map<FieldVector, ExpCoefficient, KeyLess>;

  TranslationPolynomial(FieldPtr field, std::size_t dim);

  static TranslationPolynomial identity(const FieldPtr& field, std::size_t dim);
  // coeff * tau_y
  static TranslationPolynomial shift(const FieldVector& y, const ExpCoefficient& coeff);
  static TranslationPolynomial shift(const FieldVector& y);

  const FieldPtr& field() const { return field_; }
  std::size_t dim() const { return dim_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const FieldVector& y, const ExpCoefficient& c);

  TranslationPolynomial operator-() const;
  TranslationPolynomial& operator+=(const TranslationPolynomial& o);
  TranslationPolynomial& operator-=(const TranslationPolynomial& o);
  TranslationPolynomial& operator*=(const ExpCoefficient& c);
  friend TranslationPolynomial operator+(TranslationPolynomial a, const TranslationPolynomial& b) { return a += b; }
  friend TranslationPolynomial operator-(TranslationPolynomial a, const TranslationPolynomial& b) { return a -= b; }
  friend TranslationPolynomial operator*(TranslationPolynomial a, const ExpCoefficient& c) { return a *= c; }
  // Composition (convolution of shifts).
  friend TranslationPolynomial operator*(const TranslationPolynomial& a, const TranslationPolynomial& b);
  friend bool operator==(const TranslationPolynomial& a, const TranslationPolynomial& b);
  friend bool operator!=(const TranslationPolynomial& a, const TranslationPolynomial& b) { return !(a == b); }

  TranslationPolynomial pow(unsigned n) const;
  // sum_y c_y tau_y f
  ExpPolynomial apply(const ExpPolynomial& f) const;

 private:
  FieldPtr field_;
  std::size_t dim_;
  TermMap terms_;
};

TranslationPolynomial op_delta(const FieldVector& h, unsigned m);
TranslationPolynomial op_compose(const TranslationPolynomial& a, const TranslationPolynomial& b);
inline ExpPolynomial op_apply(const TranslationPolynomial& op, const ExpPolynomial& f) { return op.apply(f); }

// Q with (tau_{p h} - 1)^n = Q (tau_h - 1)^n. For p > 0 this is
// (1 + tau_h + ... + tau_h^{p-1})^n; negative p uses
// tau_{-h} - 1 = -tau_{-h} (tau_h - 1).
TranslationPolynomial op_divisibility_factor(const FieldVector& h, long p, unsigned n);

struct TelescopeSummand {
  std::vector<unsigned> alpha;  // sums to N
  TranslationPolynomial op;
};

struct TelescopeExpansion {
  std::vector<TelescopeSummand> summands;
  TranslationPolynomial target;  // (tau_{sum m_k h_k} - 1)^N
  bool identity_holds = false;   // exact: sum of summands == target
  bool pigeonhole_holds = false; // every summand has some alpha_k >= ceil(N/t)
};

// Multinomial expansion of (tau_{m_1 h_1 + ... + m_t h_t} - 1)^N through the
// telescoping sum  sum_i (prod_{j>i} tau_{h_j}^{m_j}) (tau_{h_i}^{m_i} - 1).
TelescopeExpansion op_telescope_expand(const std::vector<FieldVector>& h, const std::vector<long>& m, unsigned N);

// Regular sample grid: point(i) = origin + i * spacing, index i in [0, n).
struct Grid {
  std::vector<double> origin;
  std::vector<double> spacing;
  std::vector<std::size_t> count;

  std::size_t dim() const { return origin.size(); }
  std::size_t size() const;
  std::vector<double> point(std::size_t flat) const;
  std::vector<std::size_t> index(std::size_t flat) const;
  std::size_t flat(const std::vector<std::size_t>& idx) const;
};

// Applies op to samples on a grid. Shifts must be integer multiples of the
// spacing (ShiftNotOnGrid otherwise); points whose shifted neighbours leave
// the window are reported absent.
std::vector<std::optional<std::complex<double>>> op_apply_grid(const TranslationPolynomial& op, const Grid& grid,
                                                               const std::vector<std::complex<double>>& samples);

}  // namespace deltaclose
