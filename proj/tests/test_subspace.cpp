#include <algorithm>
#include <random>

#include "deltaclose/error.hpp"
#include "deltaclose/subspace.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace deltaclose;
using namespace fixtures;

namespace {

ExpPolynomial mono(const FieldPtr& f, const ComplexVector& lambda, MultiIndex alpha, long c = 1) {
  return ExpPolynomial::monomial(lambda, std::move(alpha), ExpCoefficient::rational(f, c));
}

ExpPolynomial xk(const FieldPtr& f, unsigned k) { return mono(f, ExpPolynomial::zero_frequency(f, 1), {k}); }

}  // namespace

TEST_CASE("spans") {
  FieldPtr f = sqrt2();
  ComplexVector zero = ExpPolynomial::zero_frequency(f, 1);
  CHECK(space_span(f, 1, {ExpPolynomial(f, 1)}).dimension() == 0);
  CHECK(space_span(f, 1, {xk(f, 1), mono(f, zero, {1}, 2)}).dimension() == 1);
  ComplexVector lam{ComplexAlgebraic(ab(f, 1, 1), q(f, 1))};
  ExpPolynomial a = mono(f, lam, {0}), b = mono(f, lam, {1});
  FunctionSubspace s = space_span(f, 1, {a, b, a + b});
  CHECK(s.dimension() == 2);
  CHECK(s.contains(a + b * ExpCoefficient::exponential(lam[0])));
  CHECK(!s.contains(xk(f, 0)));
}

TEST_CASE("one step hull") {
  FieldPtr f = sqrt2();
  FieldVector one = vec(f, {1});
  FunctionSubspace lin = space_span(f, 1, {xk(f, 1), xk(f, 0)});
  CHECK(space_one_step_hull(lin, op_delta(one, 1), 1) == lin);

  FunctionSubspace sq = space_span(f, 1, {xk(f, 2)});
  FunctionSubspace hull = space_one_step_hull(sq, op_delta(one, 1), 3);
  CHECK(hull.dimension() == 3);
  CHECK(hull == space_span(f, 1, {xk(f, 0), xk(f, 1), xk(f, 2)}));

  try {
    space_one_step_hull(sq, op_delta(one, 1), 1);
    FAIL("expected PreconditionNotInvariant");
  } catch (const NotInvariantError& e) {
    CHECK(e.kind() == ErrorKind::PreconditionNotInvariant);
  }
}

TEST_CASE("diamond closure examples") {
  FieldPtr f = sqrt2();
  TranslationPolynomial d1 = op_delta(vec(f, {1}), 1);
  TranslationPolynomial dt = op_delta({AlgebraicScalar::theta(f)}, 1);
  FunctionSubspace sq = space_span(f, 1, {xk(f, 2)});
  FunctionSubspace a = space_diamond(sq, {{d1, 3}, {dt, 3}});
  FunctionSubspace b = space_diamond(sq, {{dt, 3}, {d1, 3}});
  CHECK(a.dimension() == 3);
  CHECK(a == b);
  FunctionSubspace full = space_span(f, 1, {xk(f, 0), xk(f, 1), xk(f, 2)});
  CHECK(space_diamond(full, {{d1, 1}, {dt, 1}}) == full);

  try {
    space_diamond(sq, {{d1, 3}, {dt, 1}});
    FAIL("expected PreconditionNotInvariant");
  } catch (const NotInvariantError& e) {
    CHECK(e.index() == 1);
  }
}

TEST_CASE("saturation oracle") {
  FieldPtr f = sqrt2();
  TranslationPolynomial d1 = op_delta(vec(f, {1}), 1);
  FunctionSubspace full = space_span(f, 1, {xk(f, 0), xk(f, 1)});
  SaturationResult r0 = space_saturate_oracle(full, {d1}, 5);
  CHECK(r0.iterations == 0);
  CHECK(!r0.capped);
  SaturationResult r = space_saturate_oracle(space_span(f, 1, {xk(f, 2)}), {d1}, 5);
  CHECK(r.iterations == 2);
  CHECK(r.space.dimension() == 3);
  ComplexVector one{ComplexAlgebraic(q(f, 1))};
  FunctionSubspace ex = space_span(f, 1, {mono(f, one, {0})});
  SaturationResult re = space_saturate_oracle(ex, {d1}, 5);
  CHECK(re.space == ex);
  CHECK(re.iterations == 0);
  SaturationResult capped = space_saturate_oracle(space_span(f, 1, {xk(f, 4)}), {d1}, 1);
  CHECK(capped.capped);
}

namespace {

struct Instance {
  FunctionSubspace v;
  std::vector<OperatorPower> ops;
};

// Either polynomial spaces with plain differences, or one frequency lambda
// with the shifted operators tau_h - e^{lambda.h}, which lower the degree.
Instance random_instance(const FieldPtr& f, std::mt19937_64& rng) {
  const std::size_t d = 1 + rng() % 2;
  ComplexVector lambda = ExpPolynomial::zero_frequency(f, d);
  const bool shifted = rng() % 2;
  if (shifted)
    for (auto& l : lambda) l = ComplexAlgebraic(random_scalar(f, rng, 1), random_scalar(f, rng, 1));
  FunctionSubspace v(f, d);
  unsigned max_deg = 0;
  const int gens = 1 + static_cast<int>(rng() % 2);
  for (int g = 0; g < gens; ++g) {
    ExpPolynomial p(f, d);
    for (int k = 0; k < 3; ++k) {
      MultiIndex alpha(d, 0);
      const unsigned deg = static_cast<unsigned>(rng() % 4);
      for (unsigned b = 0; b < deg; ++b) ++alpha[rng() % d];
      max_deg = std::max(max_deg, deg);
      p.add_term(lambda, alpha, ExpCoefficient(random_scalar(f, rng)));
    }
    v.insert(p);
  }
  Instance inst{v, {}};
  const int nops = 1 + static_cast<int>(rng() % 3);
  for (int k = 0; k < nops; ++k) {
    FieldVector h = random_vector(f, d, rng, 2);
    TranslationPolynomial op = TranslationPolynomial::shift(h);
    op -= TranslationPolynomial::identity(f, d) * ExpCoefficient::exponential(dot(lambda, h));
    inst.ops.push_back({op, max_deg + 1 + static_cast<unsigned>(rng() % 2)});
  }
  return inst;
}

}  // namespace

TEST_CASE("diamond closure agrees with saturation") {
  std::mt19937_64 rng(31);
  FieldPtr f = sqrt2();
  for (int i = 0; i < 50; ++i) {
    Instance inst = random_instance(f, rng);
    FunctionSubspace z = space_diamond(inst.v, inst.ops);
    std::vector<TranslationPolynomial> plain;
    std::size_t bound = inst.v.dimension();
    for (const auto& o : inst.ops) {
      plain.push_back(o.op);
      bound *= o.power + 1;
    }
    SaturationResult sat = space_saturate_oracle(inst.v, plain, 50);
    REQUIRE(!sat.capped);
    REQUIRE(z == sat.space);
    REQUIRE(z.contains(inst.v));
    for (const auto& op : plain) REQUIRE(z.invariant_under(op));
    REQUIRE(z.dimension() <= bound);
    std::vector<OperatorPower> reversed(inst.ops.rbegin(), inst.ops.rend());
    REQUIRE(space_diamond(inst.v, reversed) == z);
  }
}

TEST_CASE("closure of a function together with the hull of its differences") {
  std::mt19937_64 rng(17);
  FieldPtr f = sqrt2();
  const std::vector<FieldVector> steps{vec(f, {1}), {AlgebraicScalar::theta(f)}};
  for (int i = 0; i < 5; ++i) {
    ExpPolynomial g = random_exppoly(f, 1, rng, 2, 2);
    std::vector<unsigned> m{1u + static_cast<unsigned>(i % 2), 2u};
    FunctionSubspace h(f, 1);
    for (std::size_t k = 0; k < steps.size(); ++k)
      for (const auto& b : ep_translation_hull(ep_forward_difference(g, steps[k], m[k]))) h.insert(b);
    FunctionSubspace v = h;
    v.insert(g);
    std::vector<OperatorPower> ops;
    for (std::size_t k = 0; k < steps.size(); ++k) {
      REQUIRE(h.contains(ep_forward_difference(g, steps[k], m[k])));
      REQUIRE(h.invariant_under(op_delta(steps[k], m[k])));
      ops.push_back({op_delta(steps[k], 1), m[k]});
    }
    FunctionSubspace z = space_diamond(v, ops);
    for (const auto& s : steps) REQUIRE(z.invariant_under(op_delta(s, 1)));
  }
}
