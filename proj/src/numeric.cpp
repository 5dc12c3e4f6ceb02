#include "deltaclose/numeric.hpp"

#include "deltaclose/error.hpp"

namespace deltaclose {

BigFloat theta_bigfloat(const NumberField& field, unsigned bits) {
  auto [lo, hi] = field.enclosure(bits + 32);
  mpq_class mid = (lo + hi) / 2;
  BigFloat r(bits);
  mpfr_set_q(r.get(), mid.get_mpq_t(), MPFR_RNDN);
  return r;
}

BigFloat to_bigfloat(const AlgebraicScalar& x, unsigned bits) {
  BigFloat r(bits);
  if (x.is_rational()) {
    mpfr_set_q(r.get(), x.rational_value().get_mpq_t(), MPFR_RNDN);
    return r;
  }
  // Exact rational value at a fine rational approximation of theta; the
  // approximation error is far below 2^-bits for moderate coordinates.
  auto [lo, hi] = x.field()->enclosure(bits + 64);
  mpq_class v = x.value_at((lo + hi) / 2);
  mpfr_set_q(r.get(), v.get_mpq_t(), MPFR_RNDN);
  return r;
}

ComplexBig expcoef_eval_big(const ExpCoefficient& a, unsigned precision) {
  if (precision < 53) throw Error(ErrorKind::Malformed, "precision must be at least 53 bits");
  const unsigned work = precision + 24;
  ComplexBig acc{BigFloat(work), BigFloat(work)};
  BigFloat mag(work), c(work), s(work), t(work);
  for (const auto& [mu, coeff] : a.terms()) {
    BigFloat mre = to_bigfloat(mu.re(), work), mim = to_bigfloat(mu.im(), work);
    BigFloat cre = to_bigfloat(coeff.re(), work), cim = to_bigfloat(coeff.im(), work);
    mpfr_exp(mag.get(), mre.get(), MPFR_RNDN);
    mpfr_sin_cos(s.get(), c.get(), mim.get(), MPFR_RNDN);
    mpfr_mul(c.get(), c.get(), mag.get(), MPFR_RNDN);
    mpfr_mul(s.get(), s.get(), mag.get(), MPFR_RNDN);
    // (cre + i cim)(c + i s)
    mpfr_mul(t.get(), cre.get(), c.get(), MPFR_RNDN);
    mpfr_add(acc.re.get(), acc.re.get(), t.get(), MPFR_RNDN);
    mpfr_mul(t.get(), cim.get(), s.get(), MPFR_RNDN);
    mpfr_sub(acc.re.get(), acc.re.get(), t.get(), MPFR_RNDN);
    mpfr_mul(t.get(), cre.get(), s.get(), MPFR_RNDN);
    mpfr_add(acc.im.get(), acc.im.get(), t.get(), MPFR_RNDN);
    mpfr_mul(t.get(), cim.get(), c.get(), MPFR_RNDN);
    mpfr_add(acc.im.get(), acc.im.get(), t.get(), MPFR_RNDN);
  }
  return acc;
}

std::complex<double> expcoef_eval(const ExpCoefficient& a, unsigned precision) {
  if (a.is_zero()) {
    if (precision < 53) throw Error(ErrorKind::Malformed, "precision must be at least 53 bits");
    return {0.0, 0.0};
  }
  ComplexBig v = expcoef_eval_big(a, precision);
  return {v.re.to_double(), v.im.to_double()};
}

}  // namespace deltaclose
