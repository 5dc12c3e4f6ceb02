#pragma once

#include <mpfr.h>

#include <complex>

#include "deltaclose/exp_coefficient.hpp"

namespace deltaclose {

// Minimal RAII holder for an MPFR value; precision is fixed per object, so
// evaluation at different precisions is thread safe.
class BigFloat {
 public:
  explicit BigFloat(unsigned bits) { mpfr_init2(v_, bits); mpfr_set_ui(v_, 0, MPFR_RNDN); }
  BigFloat(const BigFloat& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
  BigFloat& operator=(const BigFloat& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  ~BigFloat() { mpfr_clear(v_); }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  unsigned precision() const { return static_cast<unsigned>(mpfr_get_prec(v_)); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

 private:
  mpfr_t v_;
};

// theta to `bits` bits, from a rational enclosure of width 2^-(bits+32).
BigFloat theta_bigfloat(const NumberField& field, unsigned bits);
BigFloat to_bigfloat(const AlgebraicScalar& x, unsigned bits);

struct ComplexBig {
  BigFloat re, im;
};

// Sum of coeff * exp(mu) evaluated with `precision` bits (>= 53) and rounded.
std::complex<double> expcoef_eval(const ExpCoefficient& a, unsigned precision = 53);
ComplexBig expcoef_eval_big(const ExpCoefficient& a, unsigned precision);

}  // namespace deltaclose
