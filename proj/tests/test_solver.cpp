#include <algorithm>
#include <random>

#include "deltaclose/error.hpp"
#include "deltaclose/linalg.hpp"
#include "deltaclose/solver.hpp"
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

AlgebraicScalar theta(const FieldPtr& f) { return AlgebraicScalar::theta(f); }

ExpPolynomial monomial(const FieldPtr& f, const ComplexVector& lambda, MultiIndex alpha, long c = 1) {
  return ExpPolynomial::monomial(lambda, alpha, ExpCoefficient::rational(f, mpq_class(c)));
}

ComplexVector zero_freq(const FieldPtr& f, std::size_t d) { return ExpPolynomial::zero_frequency(f, d); }

DifferenceSystem system_from(const ExpPolynomial& f, const std::vector<FieldVector>& steps,
                             const std::vector<unsigned>& orders) {
  DifferenceSystem s{f.field(), f.dim(), steps, orders, {}};
  for (std::size_t k = 0; k < steps.size(); ++k) s.rhs.push_back(ep_forward_difference(f, steps[k], orders[k]));
  return s;
}

bool in_kernel_span(const SolutionBundle& b, const ExpPolynomial& diff) {
  return space_span(diff.field(), diff.dim(), b.kernel_basis).contains(diff);
}

// Kernel by brute force: operator images of every monomial of degree <= cap
// through the translation-polynomial route, then a null space over the field.
FunctionSubspace brute_kernel(const FieldPtr& f, const std::vector<FieldVector>& steps,
                              const std::vector<unsigned>& orders, unsigned cap) {
  const std::size_t d = steps[0].size();
  std::vector<MultiIndex> monos;
  MultiIndex a(d, 0);
  while (true) {
    if (total_degree(a) <= cap) monos.push_back(a);
    std::size_t i = 0;
    while (i < d && a[i] == cap) a[i++] = 0;
    if (i == d) break;
    ++a[i];
  }
  std::map<std::pair<std::size_t, MultiIndex>, std::size_t> rows;
  Matrix<AlgebraicScalar> m;
  for (std::size_t j = 0; j < monos.size(); ++j) {
    for (std::size_t k = 0; k < steps.size(); ++k) {
      const auto img = op_delta(steps[k], orders[k]).apply(monomial(f, zero_freq(f, d), monos[j]));
      for (const auto& [atom, c] : to_sparse(img)) {
        auto key = std::make_pair(k, atom.alpha);
        auto it = rows.find(key);
        if (it == rows.end()) {
          it = rows.emplace(key, m.size()).first;
          m.emplace_back(monos.size(), AlgebraicScalar(f));
        }
        m[it->second][j] = c.constant_value().re();
      }
    }
  }
  FunctionSubspace out(f, d);
  for (const auto& v : kernel(m, monos.size(), AlgebraicScalar(f))) {
    ExpPolynomial p(f, d);
    for (std::size_t j = 0; j < monos.size(); ++j)
      if (!v[j].is_zero()) p.add_term(zero_freq(f, d), monos[j], ExpCoefficient(v[j]));
    out.insert(p);
  }
  return out;
}

}  // namespace

TEST_CASE("ansatz degree bounds") {
  const FieldPtr f = sqrt2();
  const FieldVector one = vec(f, {1}), th{theta(f)};

  SUBCASE("zero right-hand sides") {
    DifferenceSystem s{f, 1, {one, th}, {2, 3}, {ExpPolynomial(f, 1), ExpPolynomial(f, 1)}};
    const auto a = solver_ansatz(s);
    REQUIRE(a.size() == 1);
    CHECK(a[0].degree_bound == 3);
  }
  SUBCASE("cube under second differences") {
    const auto x3 = monomial(f, zero_freq(f, 1), {3});
    DifferenceSystem s{f, 1, {one, th}, {2, 2}, {ep_forward_difference(x3, one, 2), ep_forward_difference(x3, th, 2)}};
    CHECK(s.rhs[0].degree_at(zero_freq(f, 1)) == 1);
    CHECK(solver_ansatz(s)[0].degree_bound == 3);
  }
  SUBCASE("frequency invisible to a step") {
    // f = x2 e^{i x1}; lambda . (0, 1) = 0 raises the bound by that order.
    ComplexVector lambda{ComplexAlgebraic(AlgebraicScalar(f), q(f, 1)), ComplexAlgebraic(f)};
    const auto fx = monomial(f, lambda, {0, 1});
    const std::vector<FieldVector> steps{vec(f, {1, 0}), {theta(f), q(f, 0)}, vec(f, {0, 1}), {q(f, 0), theta(f)}};
    const auto s = system_from(fx, steps, {1, 1, 1, 1});
    const auto a = solver_ansatz(s);
    REQUIRE(a.size() == 2);
    const auto& e = a[0].lambda == lambda ? a[0] : a[1];
    CHECK(e.degree_bound == 1);
    const auto b = solver_solve(s);
    CHECK(b.denominator.is_one());
    CHECK(b.particular.part_at(lambda) != nullptr);
    CHECK(in_kernel_span(b, b.particular - fx));
  }
  SUBCASE("non-dense steps are refused") {
    DifferenceSystem s{f, 1, {one, vec(f, {2})}, {1, 1},
                       {ExpPolynomial::constant(f, 1, ExpCoefficient::one(f)), ExpPolynomial(f, 1)}};
    CHECK_THROWS_AS(solver_ansatz(s), Error);
    try {
      solver_solve(s);
      FAIL("expected NotDense");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NotDense);
    }
  }
}

TEST_CASE("kernel examples") {
  const FieldPtr f = sqrt2();
  const FieldVector one = vec(f, {1}), th{theta(f)};
  const auto z = zero_freq(f, 1);

  auto k1 = solver_kernel({one, th}, {2, 2}, 3);
  CHECK(k1.size() == 2);
  CHECK(space_span(f, 1, k1) == space_span(f, 1, {monomial(f, z, {0}), monomial(f, z, {1})}));

  auto k2 = solver_kernel({one, th}, {1, 1});
  REQUIRE(k2.size() == 1);
  CHECK(k2[0] == monomial(f, z, {0}));
  CHECK(kernel_degree_bound({one, th}, {1, 1}) == 1);

  const std::vector<FieldVector> steps{vec(f, {1, 0}), vec(f, {0, 1}), {theta(f), theta(f)}};
  auto k3 = solver_kernel(steps, {2, 2, 2});
  const auto z2 = zero_freq(f, 2);
  const auto span3 = space_span(f, 2, k3);
  CHECK(span3.contains(monomial(f, z2, {0, 0})));
  CHECK(span3.contains(monomial(f, z2, {1, 0})));
  CHECK(span3.contains(monomial(f, z2, {0, 1})));
  for (const auto& p : k3)
    for (std::size_t k = 0; k < steps.size(); ++k) CHECK(ep_forward_difference(p, steps[k], 2).is_zero());
  // Oracle at a cap well above the kernel degree.
  CHECK(span3 == brute_kernel(f, steps, {2, 2, 2}, 5));
  // Not dense ((1,-1) pairs integrally with every step) but spanning, so the
  // kernel is still finite; x1 x2 dies under the diagonal step.
  CHECK_FALSE(span3.contains(monomial(f, z2, {1, 1})));
}

TEST_CASE("kernel agrees with brute-force elimination") {
  std::mt19937_64 rng(41);
  const FieldPtr f = sqrt2();
  for (int trial = 0; trial < 12; ++trial) {
    std::vector<FieldVector> steps;
    std::vector<unsigned> orders;
    const bool two = trial % 2 == 1;
    if (two) {
      steps = {vec(f, {1, 0}), vec(f, {0, 1}), {theta(f), q(f, 0)}, {q(f, 0), theta(f)}};
      if (trial % 4 == 3) steps.push_back({theta(f), q(f, 1)});
    } else {
      steps = {vec(f, {1}), {theta(f)}};
      if (trial % 4 == 2) steps.push_back({random_scalar(f, rng)});
    }
    for (std::size_t k = 0; k < steps.size(); ++k) orders.push_back(1 + static_cast<unsigned>(rng() % 3));
    const auto kb = solver_kernel(steps, orders);
    for (const auto& p : kb)
      for (std::size_t k = 0; k < steps.size(); ++k)
        REQUIRE(ep_forward_difference(p, steps[k], orders[k]).is_zero());
    const unsigned cap = static_cast<unsigned>(kernel_degree_bound(steps, orders)) + 1;
    CHECK(space_span(f, steps[0].size(), kb) == brute_kernel(f, steps, orders, cap));
  }
}

TEST_CASE("solve examples") {
  const FieldPtr f = sqrt2();
  const FieldVector one = vec(f, {1}), th{theta(f)};
  const auto z = zero_freq(f, 1);

  SUBCASE("homogeneous first differences") {
    DifferenceSystem s{f, 1, {one, th}, {1, 1}, {ExpPolynomial(f, 1), ExpPolynomial(f, 1)}};
    const auto b = solver_solve(s);
    CHECK(b.particular.is_zero());
    REQUIRE(b.kernel_basis.size() == 1);
    CHECK(b.kernel_basis[0] == monomial(f, z, {0}));
  }
  SUBCASE("round trip x^2 + e^{theta x}") {
    ExpPolynomial fx = monomial(f, z, {2});
    fx += ExpPolynomial::monomial({ComplexAlgebraic(theta(f))}, {0}, ExpCoefficient::one(f));
    const auto b = solver_solve(system_from(fx, {one, th}, {2, 2}));
    CHECK(b.denominator.is_one());
    CHECK(space_span(f, 1, b.kernel_basis) == space_span(f, 1, {monomial(f, z, {0}), monomial(f, z, {1})}));
    CHECK(in_kernel_span(b, b.particular - fx));
    // particular and f differ by an affine function at most
    const ComplexVector th_freq{ComplexAlgebraic(theta(f))};
    REQUIRE(b.particular.part_at(th_freq) != nullptr);
    CHECK(*b.particular.part_at(th_freq) == *fx.part_at(th_freq));
  }
  SUBCASE("incompatible polynomial data") {
    // Delta_1 f = 1 forces slope 1, then Delta_theta f = theta, not 0.
    DifferenceSystem s{f, 1, {one, th}, {1, 1}, {monomial(f, z, {0}), ExpPolynomial(f, 1)}};
    try {
      solver_solve(s);
      FAIL("expected Inconsistent");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Inconsistent);
    }
  }
  SUBCASE("incompatible exponential data") {
    // Delta_1 f = Delta_theta f = e^x has no solution: it would need
    // (e - 1) = (e^theta - 1).
    const auto ex = ExpPolynomial::monomial({ComplexAlgebraic(q(f, 1))}, {0}, ExpCoefficient::one(f));
    DifferenceSystem s{f, 1, {one, th}, {1, 1}, {ex, ex}};
    try {
      solver_solve(s);
      FAIL("expected Inconsistent");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Inconsistent);
    }
  }
  SUBCASE("malformed systems") {
    DifferenceSystem s{f, 1, {one, th}, {1, 0}, {ExpPolynomial(f, 1), ExpPolynomial(f, 1)}};
    CHECK_THROWS_AS(solver_solve(s), Error);
    s.orders = {1, 1};
    s.rhs.pop_back();
    CHECK_THROWS_AS(solver_solve(s), Error);
  }
}

TEST_CASE("round trip on random exponential polynomials") {
  std::mt19937_64 rng(2024);
  int checked = 0;
  for (int trial = 0; trial < 24; ++trial) {
    const std::size_t d = 1 + static_cast<std::size_t>(trial % 2);
    FieldPtr f;
    std::vector<FieldVector> steps;
    if (d == 1) {
      f = sqrt2();
      steps = {vec(f, {1}), {theta(f)}};
      if (trial % 4 == 2) steps.push_back({random_scalar(f, rng, 2)});
    } else if (trial % 4 == 1) {
      f = cbrt2();
      steps = {vec(f, {1, 0}), vec(f, {0, 1}), {theta(f), theta(f) * theta(f)}};
    } else {
      f = sqrt2();
      steps = {vec(f, {1, 0}), vec(f, {0, 1}), {theta(f), q(f, 0)}, {q(f, 0), theta(f)}};
    }
    std::vector<unsigned> orders;
    for (std::size_t k = 0; k < steps.size(); ++k) orders.push_back(1 + static_cast<unsigned>(rng() % 3));
    const ExpPolynomial fx = random_exppoly(f, d, rng, 4, 3);
    const auto s = system_from(fx, steps, orders);
    const auto b = solver_solve(s);
    REQUIRE(b.denominator.is_one());
    for (std::size_t k = 0; k < steps.size(); ++k)
      REQUIRE(ep_forward_difference(b.particular, steps[k], orders[k]) == s.rhs[k]);
    CHECK(in_kernel_span(b, b.particular - fx));
    ++checked;
  }
  CHECK(checked == 24);
}

TEST_CASE("permuting equations changes nothing modulo the kernel") {
  std::mt19937_64 rng(77);
  const FieldPtr f = sqrt2();
  const std::vector<FieldVector> steps{vec(f, {1, 0}), vec(f, {0, 1}), {theta(f), q(f, 0)}, {q(f, 0), theta(f)}};
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<unsigned> orders;
    for (std::size_t k = 0; k < steps.size(); ++k) orders.push_back(1 + static_cast<unsigned>(rng() % 2));
    const auto s = system_from(random_exppoly(f, 2, rng, 3, 2), steps, orders);
    std::vector<std::size_t> perm{0, 1, 2, 3};
    std::shuffle(perm.begin(), perm.end(), rng);
    DifferenceSystem p{f, 2, {}, {}, {}};
    for (std::size_t i : perm) {
      p.steps.push_back(s.steps[i]);
      p.orders.push_back(s.orders[i]);
      p.rhs.push_back(s.rhs[i]);
    }
    const auto a = solver_solve(s), b = solver_solve(p);
    const auto ka = space_span(f, 2, a.kernel_basis), kb = space_span(f, 2, b.kernel_basis);
    CHECK(ka == kb);
    CHECK(ka.contains(a.particular - b.particular));
  }
}

TEST_CASE("telescoped difference of a combined step stays in the closed space") {
  // Delta_{h_i}^{n_i} f in Ht for all i and Ht translation invariant imply
  // Delta_h^N f in Ht for h = sum m_k h_k and N = sum n_i.
  std::mt19937_64 rng(5);
  const FieldPtr f = sqrt2();
  for (int trial = 0; trial < 4; ++trial) {
    const std::vector<FieldVector> h{vec(f, {1}), {theta(f)}};
    const std::vector<unsigned> n{1 + static_cast<unsigned>(rng() % 2), 1 + static_cast<unsigned>(rng() % 2)};
    const ExpPolynomial e = random_exppoly(f, 1, rng, 2, 1);
    ExpPolynomial fx = e;
    const unsigned nmax = std::max(n[0], n[1]);
    fx += monomial(f, zero_freq(f, 1), {nmax - 1}, 3);  // killed by both
    auto gens = ep_translation_hull(e);
    gens.push_back(monomial(f, zero_freq(f, 1), {0}));
    const FunctionSubspace ht = space_span(f, 1, gens);
    for (std::size_t i = 0; i < 2; ++i) REQUIRE(ht.contains(ep_forward_difference(fx, h[i], n[i])));

    const std::vector<long> m{static_cast<long>(rng() % 3) - 1, 1 + static_cast<long>(rng() % 2)};
    const auto exp = op_telescope_expand(h, m, n[0] + n[1]);
    REQUIRE(exp.identity_holds);
    for (const auto& term : exp.summands) {
      CHECK((term.alpha[0] >= n[0] || term.alpha[1] >= n[1]));
      CHECK(ht.contains(term.op.apply(fx)));
    }
    FieldVector hh = scaled(h[0], q(f, m[0])) + scaled(h[1], q(f, m[1]));
    CHECK(ht.contains(ep_forward_difference(fx, hh, n[0] + n[1])));
  }
}

namespace {

GroupClosure line_closure(const FieldPtr& f) {
  // V = the x1 axis, Lambda = Z (0, 1)
  return group_closure({vec(f, {1, 0}), {theta(f), q(f, 0)}, vec(f, {0, 1})});
}

}  // namespace

TEST_CASE("coset slices of an exponential polynomial are its translates") {
  const FieldPtr f = sqrt2();
  const GroupClosure c = line_closure(f);
  REQUIRE_FALSE(c.dense);
  ExpPolynomial e(f, 2);
  e.add_term({ComplexAlgebraic(q(f, 1, 2), q(f, 1)), ComplexAlgebraic(q(f, -1, 3))}, {0, 1}, ExpCoefficient::one(f));
  e.add_term(zero_freq(f, 2), {2, 0}, ExpCoefficient::rational(f, 3));
  const FunctionSubspace h = space_span(f, 2, ep_translation_hull(e));
  const std::vector<FieldVector> lambdas{vec(f, {0, 0}), vec(f, {0, 1}), vec(f, {0, -2})};
  const auto report = coset_fit(EvaluableFunction::exp_poly(e), c, c.generators, {1, 1, 1}, h, lambdas);
  REQUIRE(report.slices.size() == 3);
  CHECK(report.v_basis.size() == 1);
  CHECK(report.hstar.size() == 2);
  for (const auto& s : report.slices) {
    CHECK(s.heldout_residual <= 1e-10);
    const auto lam = to_doubles(s.lambda);
    for (double t : {-0.9, -0.31, 0.2, 0.77}) {
      const std::vector<double> x{t + lam[0], lam[1]};
      CHECK(std::abs(s(std::vector<double>{t}) - ep_eval(e, x).value) <= 1e-9);
    }
  }
}

TEST_CASE("coset slices of the hyperplane construction") {
  const FieldPtr f = sqrt2();
  const AlgebraicScalar t = theta(f);
  const GroupClosure c = group_closure({vec(f, {1, 0}), {t, q(f, 0)}, vec(f, {1, 1}), {t, q(f, 2)}});
  REQUIRE(c.lambda_basis.size() == 1);
  const HyperplaneFrame fr = frame_build(c);
  ExpPolynomial e(f, 2);
  e.add_term({ComplexAlgebraic(q(f, 1, 2)), ComplexAlgebraic(q(f, -1, 3))}, {1, 0}, ExpCoefficient::one(f));
  e.add_term(zero_freq(f, 2), {0, 2}, ExpCoefficient::rational(f, 3));
  for (unsigned m = 1; m <= 2; ++m) {
    const Prop7Function p = make_prop7_phi(fr, e, m);
    const FieldVector step = scaled(fr.w, fr.r);
    const auto report =
        coset_fit(p.phi, c, c.generators, std::vector<unsigned>(4, m), p.h, {zero_vector(f, 2), step});
    const double offset = std::real(make_fm(m, q(f, 1))({1.0}));
    CHECK(std::abs(offset) <= 1e-12);
    const auto& s0 = report.slices[0];
    const auto& s1 = report.slices[1];
    CHECK(s0.heldout_residual <= 1e-8);
    CHECK(s1.heldout_residual <= 1e-8);
    for (double x : {-0.8, -0.1, 0.45, 0.93}) {
      const std::vector<double> tv{x};
      const auto along = frame_project(fr, std::vector<double>{x, 0.0}).along;
      CHECK(std::abs(s0(tv) - ep_eval(e, along).value) <= 1e-8);
      CHECK(std::abs(s1(tv) - s0(tv) - offset) <= 1e-8);
    }
  }
}

TEST_CASE("coset fit preconditions") {
  const FieldPtr f = sqrt2();
  const GroupClosure c = line_closure(f);
  const auto x1sq = monomial(f, zero_freq(f, 2), {2, 0});
  const auto fx = EvaluableFunction::exp_poly(x1sq);
  try {
    coset_fit(fx, c, c.generators, {1, 1, 1}, space_span(f, 2, {x1sq}), {vec(f, {0, 1})});
    FAIL("expected PreconditionNotInvariant");
  } catch (const NotInvariantError& e) {
    CHECK(e.index() == 0);
  }
  const FunctionSubspace h = space_span(f, 2, ep_translation_hull(x1sq));
  try {
    coset_fit(fx, c, c.generators, {1, 1, 1}, h, {vec(f, {1, 1})});
    FAIL("expected Malformed");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Malformed);
  }
  const GroupClosure dense = group_closure({vec(f, {1, 0}), {theta(f), q(f, 0)}, vec(f, {0, 1}), {q(f, 0), theta(f)}});
  try {
    coset_fit(fx, dense, dense.generators, {1, 1, 1, 1}, h, {vec(f, {0, 0})});
    FAIL("expected DenseGroup");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DenseGroup);
  }
}
