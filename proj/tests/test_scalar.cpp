#include <cmath>
#include <random>

#include "deltaclose/error.hpp"
#include "deltaclose/numeric.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace deltaclose;
using namespace fixtures;

namespace {

FieldPtr cbrt2() {
  static FieldPtr f = NumberField::make({mpq_class(-2), mpq_class(0), mpq_class(0), mpq_class(1)}, mpq_class(1),
                                        mpq_class(2));
  return f;
}

// Independent 256-bit value of a coordinate vector given theta from MPFR.
double oracle_sign(const AlgebraicScalar& x, bool cube) {
  mpfr_t theta, acc, pw, term;
  mpfr_inits2(256, theta, acc, pw, term, (mpfr_ptr)0);
  mpfr_set_ui(theta, 2, MPFR_RNDN);
  if (cube) mpfr_cbrt(theta, theta, MPFR_RNDN);
  else mpfr_sqrt(theta, theta, MPFR_RNDN);
  mpfr_set_ui(acc, 0, MPFR_RNDN);
  mpfr_set_ui(pw, 1, MPFR_RNDN);
  for (const auto& c : x.coords()) {
    mpfr_mul_q(term, pw, c.get_mpq_t(), MPFR_RNDN);
    mpfr_add(acc, acc, term, MPFR_RNDN);
    mpfr_mul(pw, pw, theta, MPFR_RNDN);
  }
  int s = mpfr_sgn(acc);
  mpfr_clears(theta, acc, pw, term, (mpfr_ptr)0);
  return s;
}

}  // namespace

TEST_CASE("field construction") {
  FieldPtr qf = NumberField::rationals();
  CHECK(qf->degree() == 1);
  CHECK(AlgebraicScalar::theta(qf).is_zero());

  FieldPtr f = sqrt2();
  CHECK(f->degree() == 2);
  CHECK(std::abs(f->theta_double() - 1.41421356237309505) < 1e-15);
  auto [lo, hi] = f->enclosure(40);
  CHECK(lo * lo < 2);
  CHECK(hi * hi > 2);
  CHECK(hi - lo <= mpq_class(1, mpz_class(1) << 40));

  try {
    NumberField::make({mpq_class(1), mpq_class(0), mpq_class(1)}, mpq_class(0), mpq_class(2));
    FAIL("expected NoSignChange");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoSignChange);
  }
  try {
    // (x - 1)^2 (x + 3)
    NumberField::make({mpq_class(3), mpq_class(-5), mpq_class(1), mpq_class(1)}, mpq_class(-4), mpq_class(0));
    FAIL("expected NotSquareFree");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotSquareFree);
  }
}

TEST_CASE("scalar sign examples") {
  FieldPtr f = sqrt2();
  CHECK(AlgebraicScalar(f).sign() == 0);
  CHECK(ab(f, 1, -1).sign() == -1);
  CHECK(ab(f, -3, 3).sign() == 1);
  // 99/70 is a convergent of sqrt 2 from above
  AlgebraicScalar close = AlgebraicScalar(f, mpq_class(99, 70)) - AlgebraicScalar::theta(f);
  CHECK(close.sign() == 1);
  CHECK(close.floor() == 0);
  CHECK(ab(f, 0, -1).floor() == -2);
}

TEST_CASE("field axioms on random triples") {
  std::mt19937_64 rng(7);
  for (FieldPtr f : {sqrt2(), cbrt2()}) {
    for (int i = 0; i < 1000; ++i) {
      AlgebraicScalar a = random_scalar(f, rng), b = random_scalar(f, rng), c = random_scalar(f, rng);
      REQUIRE((a + b) + c == a + (b + c));
      REQUIRE((a * b) * c == a * (b * c));
      REQUIRE(a * (b + c) == a * b + a * c);
      REQUIRE(a * b == b * a);
      if (!a.is_zero()) REQUIRE(a * a.inverse() == AlgebraicScalar(f, mpq_class(1)));
    }
  }
}

TEST_CASE("sign agrees with a 256-bit evaluation") {
  std::mt19937_64 rng(11);
  int checked = 0;
  for (FieldPtr f : {sqrt2(), cbrt2()}) {
    const bool cube = f->degree() == 3;
    for (int i = 0; i < 500; ++i) {
      AlgebraicScalar x = random_scalar(f, rng, 50);
      if (x.is_zero()) continue;
      REQUIRE(x.sign() == oracle_sign(x, cube));
      ++checked;
    }
  }
  CHECK(checked >= 990);
}

TEST_CASE("complex algebraic arithmetic") {
  std::mt19937_64 rng(3);
  FieldPtr f = sqrt2();
  for (int i = 0; i < 200; ++i) {
    ComplexAlgebraic a(random_scalar(f, rng), random_scalar(f, rng));
    ComplexAlgebraic b(random_scalar(f, rng), random_scalar(f, rng));
    ComplexAlgebraic c(random_scalar(f, rng), random_scalar(f, rng));
    REQUIRE(a * (b + c) == a * b + a * c);
    REQUIRE((a * b) * c == a * (b * c));
    if (!a.is_zero()) REQUIRE(a * a.inverse() == ComplexAlgebraic(AlgebraicScalar(f, mpq_class(1))));
  }
}

TEST_CASE("formal exponential products") {
  FieldPtr f = sqrt2();
  ComplexAlgebraic mu(ab(f, 1, 2), q(f, 1, 3));
  ExpCoefficient e = ExpCoefficient::exponential(mu);
  ExpCoefficient einv = ExpCoefficient::exponential(-mu);
  CHECK(expcoef_mul(e, einv).is_one());

  ExpCoefficient one = ExpCoefficient::one(f);
  CHECK((e - one) * (e + one) == e.pow(2) - one);
  CHECK(e.pow(2) == ExpCoefficient::exponential(mu + mu));

  auto quotient = (e.pow(3) - one).exact_div(e - one);
  REQUIRE(quotient.has_value());
  CHECK(*quotient == e.pow(2) + e + one);
  CHECK(!(e + one).exact_div(e - one).has_value());

  try {
    expcoef_mul(one, ExpCoefficient::one(NumberField::rationals()));
    FAIL("expected FieldMismatch");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::FieldMismatch);
  }
}

TEST_CASE("formal exponential evaluation") {
  FieldPtr f = sqrt2();
  CHECK(expcoef_eval(ExpCoefficient(f)) == std::complex<double>(0.0));
  CHECK(expcoef_eval(ExpCoefficient::one(f)) == std::complex<double>(1.0));
  ExpCoefficient a = ExpCoefficient::exponential(ComplexAlgebraic(AlgebraicScalar::theta(f))) - ExpCoefficient::one(f);
  CHECK(std::abs(expcoef_eval(a, 128) - (std::exp(std::sqrt(2.0)) - 1.0)) < 1e-14);
  CHECK(std::abs(expcoef_eval(a).real() - 3.113250) < 1e-6);
}

TEST_CASE("formal exponentials form a ring and evaluation is a homomorphism") {
  std::mt19937_64 rng(5);
  FieldPtr f = sqrt2();
  auto random_coef = [&] {
    std::vector<std::pair<ComplexAlgebraic, ComplexAlgebraic>> terms;
    int n = 1 + static_cast<int>(rng() % 3);
    for (int k = 0; k < n; ++k)
      terms.emplace_back(ComplexAlgebraic(random_scalar(f, rng, 2), random_scalar(f, rng, 2)),
                         ComplexAlgebraic(random_scalar(f, rng), random_scalar(f, rng)));
    return ExpCoefficient::from_terms(f, terms);
  };
  for (int i = 0; i < 12; ++i) {
    ExpCoefficient a = random_coef(), b = random_coef(), c = random_coef();
    REQUIRE(a * (b + c) == a * b + a * c);
    REQUIRE((a * b) * c == a * (b * c));
    REQUIRE(a * b == b * a);
    const std::complex<double> lhs = expcoef_eval(a * b, 128);
    const std::complex<double> rhs = expcoef_eval(a, 128) * expcoef_eval(b, 128);
    REQUIRE(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
    ExpCoefficient again = ExpCoefficient::from_terms(
        f, std::vector<std::pair<ComplexAlgebraic, ComplexAlgebraic>>(a.terms().begin(), a.terms().end()));
    REQUIRE(again == a);
  }
}

TEST_CASE("rational parsing") {
  CHECK(parse_rational("6/4") == mpq_class(3, 2));
  CHECK(parse_rational("-1.25") == mpq_class(-5, 4));
  CHECK(format_rational(mpq_class(-6, 4)) == "-3/2");
  CHECK(format_rational(mpq_class(7)) == "7");
  CHECK_THROWS_AS(parse_rational("1/0"), Error);
  CHECK_THROWS_AS(parse_rational("abc"), Error);
}
