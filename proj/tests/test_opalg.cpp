#include <random>

#include "deltaclose/error.hpp"
#include "deltaclose/translation.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace deltaclose;
using namespace fixtures;

namespace {

TranslationPolynomial tau(const FieldVector& y) { return TranslationPolynomial::shift(y); }

TranslationPolynomial random_op(const FieldPtr& f, std::size_t d, std::mt19937_64& rng) {
  TranslationPolynomial op(f, d);
  const int n = 1 + static_cast<int>(rng() % 3);
  for (int k = 0; k < n; ++k) {
    ExpCoefficient c = ExpCoefficient::rational(f, static_cast<long>(rng() % 7) - 3);
    if (rng() % 2) c = c + ExpCoefficient::exponential(ComplexAlgebraic(random_scalar(f, rng, 1)));
    op.add_term(random_vector(f, d, rng, 2), c);
  }
  return op;
}

}  // namespace

TEST_CASE("difference operators") {
  FieldPtr f = sqrt2();
  FieldVector h = vec(f, {1});
  CHECK(op_delta(h, 0) == TranslationPolynomial::identity(f, 1));
  TranslationPolynomial want = tau(vec(f, {2})) - tau(h) * ExpCoefficient::rational(f, 2) + tau(vec(f, {0}));
  CHECK(op_delta(h, 2) == want);

  std::mt19937_64 rng(1);
  for (int i = 0; i < 30; ++i) {
    const std::size_t d = 1 + i % 2;
    ExpPolynomial g = random_exppoly(f, d, rng);
    FieldVector step = random_vector(f, d, rng, 2);
    const unsigned m = static_cast<unsigned>(i % 4);
    ExpPolynomial expected = m == 0 ? g : ep_forward_difference(g, step, m);
    REQUIRE(op_apply(op_delta(step, m), g) == expected);
  }
}

TEST_CASE("composition") {
  FieldPtr f = sqrt2();
  FieldVector h{ab(f, 1, 1)};
  TranslationPolynomial one = TranslationPolynomial::identity(f, 1);
  TranslationPolynomial a = tau(h) - one;
  CHECK(op_compose(a, one) == a);
  CHECK(op_compose(tau(h) - one, tau(h) + one) == tau(scaled(h, q(f, 2))) - one);
  TranslationPolynomial power = op_delta(h, 1);
  for (unsigned m = 2; m <= 4; ++m) {
    power = op_compose(power, op_delta(h, 1));
    CHECK(power == op_delta(h, m));
  }
  CHECK_THROWS_AS(op_compose(one, TranslationPolynomial::identity(f, 2)), Error);
}

TEST_CASE("translation operators form a commutative ring") {
  std::mt19937_64 rng(9);
  FieldPtr f = sqrt2();
  for (int i = 0; i < 500; ++i) {
    const std::size_t d = 1 + i % 2;
    TranslationPolynomial a = random_op(f, d, rng), b = random_op(f, d, rng), c = random_op(f, d, rng);
    REQUIRE(a * b == b * a);
    REQUIRE((a * b) * c == a * (b * c));
    REQUIRE(a * (b + c) == a * b + a * c);
    REQUIRE(a + (-a) == TranslationPolynomial(f, d));
  }
}

TEST_CASE("divisibility factor") {
  FieldPtr f = sqrt2();
  FieldVector h{ab(f, 0, 1)};
  TranslationPolynomial one = TranslationPolynomial::identity(f, 1);
  CHECK(op_divisibility_factor(h, 1, 3) == one);
  CHECK(op_divisibility_factor(h, 2, 1) == tau(h) + one);
  CHECK(op_divisibility_factor(h, -1, 1) == -tau(scaled(h, q(f, -1))));

  for (std::size_t d : {1u, 2u}) {
    FieldVector step = d == 1 ? h : FieldVector{ab(f, 1, 1), q(f, -1, 2)};
    for (long p = -3; p <= 3; ++p) {
      if (p == 0) continue;
      for (unsigned n = 1; n <= 3; ++n) {
        TranslationPolynomial lhs = (tau(scaled(step, q(f, p))) - TranslationPolynomial::identity(f, d)).pow(n);
        TranslationPolynomial rhs =
            op_divisibility_factor(step, p, n) * (tau(step) - TranslationPolynomial::identity(f, d)).pow(n);
        REQUIRE(lhs == rhs);
      }
    }
  }
  CHECK_THROWS_AS(op_divisibility_factor(h, 0, 1), Error);
}

TEST_CASE("annihilation passes to integer multiples of the step") {
  std::mt19937_64 rng(12);
  FieldPtr f = sqrt2();
  for (int i = 0; i < 20; ++i) {
    const unsigned m = 1 + static_cast<unsigned>(i % 3);
    // degree below m in one variable: Delta_h^m kills it
    ExpPolynomial g(f, 1);
    for (unsigned k = 0; k < m; ++k)
      g.add_term(ExpPolynomial::zero_frequency(f, 1), {k}, ExpCoefficient(random_scalar(f, rng)));
    FieldVector h = random_vector(f, 1, rng, 2);
    if (is_zero(h)) continue;
    REQUIRE(ep_forward_difference(g, h, m).is_zero());
    for (long p : {-3L, -2L, 2L, 3L}) {
      TranslationPolynomial factor = op_divisibility_factor(h, p, m);
      ExpPolynomial via_factor = factor.apply(ep_forward_difference(g, h, m));
      REQUIRE(via_factor.is_zero());
      REQUIRE(ep_forward_difference(g, scaled(h, q(f, p)), m).is_zero());
    }
  }
}

TEST_CASE("telescoping multinomial expansion") {
  FieldPtr f = sqrt2();
  {
    TelescopeExpansion e = op_telescope_expand({vec(f, {1}), {AlgebraicScalar::theta(f)}}, {1, 1}, 1);
    CHECK(e.summands.size() == 2);
    CHECK(e.identity_holds);
    CHECK(e.pigeonhole_holds);
  }
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    const std::size_t d = 1 + i % 2;
    const std::size_t t = 1 + rng() % 3;
    std::vector<FieldVector> h;
    std::vector<long> m;
    for (std::size_t k = 0; k < t; ++k) {
      h.push_back(random_vector(f, d, rng, 2));
      m.push_back(static_cast<long>(rng() % 7) - 3);
    }
    const unsigned N = 1 + static_cast<unsigned>(rng() % 4);
    TelescopeExpansion e = op_telescope_expand(h, m, N);
    TranslationPolynomial sum(f, d);
    for (const auto& s : e.summands) {
      unsigned total = 0;
      for (unsigned a : s.alpha) total += a;
      REQUIRE(total == N);
      sum += s.op;
    }
    FieldVector target = zero_vector(f, d);
    for (std::size_t k = 0; k < t; ++k) target = target + scaled(h[k], q(f, m[k]));
    REQUIRE(sum == (tau(target) - TranslationPolynomial::identity(f, d)).pow(N));
    REQUIRE(e.identity_holds);
    REQUIRE(e.pigeonhole_holds);
  }
}

TEST_CASE("grid application") {
  FieldPtr f = NumberField::rationals();
  Grid grid{{0.0}, {0.5}, {9}};
  std::vector<std::complex<double>> samples;
  for (std::size_t i = 0; i < grid.size(); ++i) samples.emplace_back(grid.point(i)[0] * grid.point(i)[0]);
  auto out = op_apply_grid(op_delta(vec(f, {1}), 2), grid, samples);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i + 4 < grid.size()) {
      REQUIRE(out[i].has_value());
      CHECK(std::abs(*out[i] - 2.0) < 1e-12);
    } else {
      CHECK(!out[i].has_value());
    }
  }
  try {
    op_apply_grid(op_delta({q(f, 1, 3)}, 1), grid, samples);
    FAIL("expected ShiftNotOnGrid");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ShiftNotOnGrid);
  }
}
