#include <cmath>
#include <random>

#include "deltaclose/construct.hpp"
#include "deltaclose/error.hpp"
#include "deltaclose/numeric.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace deltaclose;
using namespace fixtures;

namespace {

// Distance from x to the lattice hZ, computed independently of the library.
double lattice_distance(double x, double h) {
  double r = std::fmod(x, h);
  if (r < 0) r += h;
  return std::min(r, h - r);
}

// Partial sums of the triangle wave, straight from the definition.
double partial_sum_oracle(double x, double h) {
  const double k = std::floor(x / h);
  const double y = x - k * h;
  double acc = 0.0;
  if (k > 0)
    for (long j = 0; j < static_cast<long>(k); ++j) acc += lattice_distance(y + j * h, h);
  else
    for (long j = 1; j <= static_cast<long>(-k); ++j) acc -= lattice_distance(y - j * h, h);
  return acc;
}

double re(std::complex<double> z) { return z.real(); }

double delta_numeric(const EvaluableFunction& f, double x, double h, unsigned m) {
  double acc = 0.0;
  for (unsigned k = 0; k <= m; ++k) {
    const double w = binomial(m, k).get_d() * (((m - k) % 2) ? -1.0 : 1.0);
    acc += w * re(f({x + k * h}));
  }
  return acc;
}

}  // namespace

TEST_CASE("triangle wave") {
  FieldPtr f = sqrt2();
  for (const AlgebraicScalar& h : {q(f, 1), AlgebraicScalar::theta(f)}) {
    EvaluableFunction phi = make_triangle_wave(h);
    const double hd = h.to_double();
    CHECK(re(phi({0.0})) == 0.0);
    CHECK(phi.exact({AlgebraicScalar(f)}).is_zero());
    CHECK(std::abs(re(phi({hd / 2})) - hd / 2) < 1e-15);
    CHECK(std::abs(re(phi({-hd / 4})) - hd / 4) < 1e-15);
    CHECK(phi.exact({h * mpq_class(1, 2)}) == ExpCoefficient(h * mpq_class(1, 2)));
    CHECK(phi.exact({h * mpq_class(-1, 4)}) == ExpCoefficient(h * mpq_class(1, 4)));
    CHECK(phi.exact({h * mpq_class(7)}).is_zero());
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-30, 30);
    for (int i = 0; i < 1000; ++i) {
      const double x = u(rng);
      REQUIRE(std::abs(re(phi({x + hd})) - re(phi({x}))) < 1e-12);
      REQUIRE(std::abs(re(phi({x})) - re(phi({-x}))) < 1e-12);
      REQUIRE(std::abs(re(phi({x})) - lattice_distance(x, hd)) < 1e-12);
    }
  }
  try {
    make_triangle_wave(q(f, -1));
    FAIL("expected NonpositivePeriod");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonpositivePeriod);
  }
}

TEST_CASE("antidifference") {
  FieldPtr f = sqrt2();
  const AlgebraicScalar h = AlgebraicScalar::theta(f);
  const double hd = h.to_double();
  EvaluableFunction zero = make_antidifference(EvaluableFunction::exp_poly(ExpPolynomial(f, 1)), h);
  CHECK(re(zero({3.7})) == 0.0);

  EvaluableFunction phi = make_triangle_wave(h);
  EvaluableFunction g = make_antidifference(phi, h);
  CHECK(std::abs(re(g({hd / 2 + 3 * hd})) - 1.5 * hd) < 1e-12);
  CHECK(g.exact({h * mpq_class(7, 2)}) == ExpCoefficient(h * mpq_class(3, 2)));

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-20 * hd, 20 * hd);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng);
    REQUIRE(std::abs(re(g({x})) - partial_sum_oracle(x, hd)) < 1e-10);
  }
  for (int i = 0; i < 10000; ++i) {
    const double x = u(rng);
    REQUIRE(std::abs(re(g({x + hd})) - re(g({x})) - re(phi({x}))) <= 1e-10);
  }
  // seams at lattice points
  for (long k = -10; k <= 10; ++k) {
    const double x = k * hd;
    CHECK(std::abs(re(g({x}))) < 1e-12);
    CHECK(std::abs(re(g({x + 1e-9})) - re(g({x - 1e-9}))) < 1e-7);
  }

  ComplexVector zf = ExpPolynomial::zero_frequency(f, 1);
  EvaluableFunction one = EvaluableFunction::exp_poly(ExpPolynomial::constant(f, 1, ExpCoefficient::one(f)));
  try {
    make_antidifference(one, h);
    FAIL("expected LatticeValuesNonzero");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::LatticeValuesNonzero);
  }
}

TEST_CASE("triangle wave antiderivatives f_m") {
  FieldPtr f = sqrt2();
  std::mt19937_64 rng(3);
  for (const AlgebraicScalar& h : {q(f, 1), AlgebraicScalar::theta(f)}) {
    const double hd = h.to_double();
    EvaluableFunction phi = make_triangle_wave(h);
    CHECK(make_fm(1, h).kind() == NodeKind::Triangle);
    std::uniform_real_distribution<double> u(-20 * hd, 20 * hd);
    for (unsigned m = 1; m <= 4; ++m) {
      EvaluableFunction fm = make_fm(m, h);
      double worst_kill = 0.0, worst_phi = 0.0, worst_multiple = 0.0;
      for (int i = 0; i < 10000; ++i) {
        const double x = u(rng);
        worst_kill = std::max(worst_kill, std::abs(delta_numeric(fm, x, hd, m)));
        worst_phi = std::max(worst_phi, std::abs(delta_numeric(fm, x, hd, m - 1) - re(phi({x}))));
        if (i % 10 == 0)
          for (int p : {2, 3}) worst_multiple = std::max(worst_multiple, std::abs(delta_numeric(fm, x, p * hd, m)));
      }
      CHECK(worst_kill <= 1e-9);
      CHECK(worst_phi <= 1e-9);
      CHECK(worst_multiple <= 1e-9);
      // exact and double paths agree at rational multiples of h
      for (int k = -9; k <= 9; ++k) {
        const mpq_class t(k, 4);
        const ExpCoefficient v = fm.exact({h * t});
        REQUIRE(std::abs(expcoef_eval(v) - fm({t.get_d() * hd})) < 1e-10);
      }
    }
  }
}

TEST_CASE("corner witness") {
  FieldPtr f = sqrt2();
  ExpPolynomial sq = ExpPolynomial::monomial(ExpPolynomial::zero_frequency(f, 1), {2}, ExpCoefficient::one(f));
  CHECK(!corner_witness(EvaluableFunction::exp_poly(sq), {{-2.0}, {2.0}}).found);

  CornerWitness c = corner_witness(make_triangle_wave(q(f, 1)), {{-0.25}, {0.25}});
  REQUIRE(c.found);
  CHECK(std::abs(c.point[0]) < 1e-3);
  CHECK(std::abs(c.gap - 2.0) < 0.01);

  for (unsigned m = 2; m <= 4; ++m) {
    CornerWitness cm = corner_witness(make_fm(m, q(f, 1)), {{-3.0}, {3.0}});
    REQUIRE(cm.found);
    CHECK(cm.gap >= 0.5);
  }
}

TEST_CASE("hyperplane construction") {
  FieldPtr f = sqrt2();
  GroupClosure c = group_closure({vec(f, {1, 0}), {AlgebraicScalar::theta(f), q(f, 0)}, vec(f, {0, 1})});
  HyperplaneFrame fr = frame_build(c);
  ExpPolynomial one = ExpPolynomial::constant(f, 2, ExpCoefficient::one(f));
  Prop7Function p = make_prop7_phi(fr, one, 1);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int i = 0; i < 200; ++i) {
    const double x = u(rng), y = u(rng);
    REQUIRE(std::abs(re(p.phi({x, y})) - 1.0 - lattice_distance(y, 1.0)) < 1e-12);
    REQUIRE(std::abs(p.phi({x, y + 1.0}) - p.phi({x, y})) < 1e-12);
  }
  CHECK(p.h.dimension() == 1);

  Prop7Certificate cert = prop7_certify(p, {{-1.0, -1.0}, {1.0, 1.0}}, 21);
  CHECK(cert.hull_invariant);
  CHECK(cert.shifts_reduce);
  CHECK(cert.membership_ok);
  CHECK(cert.corner.found);

  ExpPolynomial bad(f, 3);
  CHECK_THROWS_AS(make_prop7_phi(fr, bad, 1), Error);
}

TEST_CASE("hyperplane construction with a nontrivial exponential polynomial") {
  FieldPtr f = sqrt2();
  const AlgebraicScalar t = AlgebraicScalar::theta(f);
  GroupClosure c = group_closure({vec(f, {1, 0}), {t, q(f, 0)}, vec(f, {1, 1}), {t, q(f, 2)}});
  HyperplaneFrame fr = frame_build(c);
  ExpPolynomial e(f, 2);
  e.add_term({ComplexAlgebraic(q(f, 1, 2)), ComplexAlgebraic(q(f, -1, 3))}, {1, 0}, ExpCoefficient::one(f));
  e.add_term(ExpPolynomial::zero_frequency(f, 2), {0, 2}, ExpCoefficient::rational(f, 3));
  for (unsigned m = 1; m <= 3; ++m) {
    Prop7Function p = make_prop7_phi(fr, e, m);
    Prop7Certificate cert = prop7_certify(p, {{-1.0, -1.0}, {1.0, 1.0}}, 21);
    CHECK(cert.holds());
    CHECK(cert.membership_residual <= 1e-8);
  }
}
