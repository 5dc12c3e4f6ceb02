#include "deltaclose/solver.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>

#include "deltaclose/fit.hpp"
#include "deltaclose/linalg.hpp"
#include "deltaclose/rational.hpp"

namespace deltaclose {

namespace {

void check_steps(const std::vector<FieldVector>& steps, const std::vector<unsigned>& orders) {
  if (steps.empty()) throw Error(ErrorKind::EmptyGeneratorList, "no steps");
  if (steps.size() != orders.size()) throw Error(ErrorKind::DimensionMismatch, "steps and orders differ in length");
  const std::size_t d = steps[0].size();
  if (d == 0) throw Error(ErrorKind::DimensionMismatch, "zero dimensional steps");
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (steps[k].size() != d) throw Error(ErrorKind::DimensionMismatch, "steps of different dimensions");
    for (const auto& x : steps[k]) require_same_field(steps[0][0].field(), x.field());
    if (orders[k] == 0) throw Error(ErrorKind::Malformed, "difference orders must be positive");
  }
}

void require_dense(const std::vector<FieldVector>& steps) {
  if (!group_closure(steps).dense) throw Error(ErrorKind::NotDense, "the steps do not generate a dense subgroup");
}

// The polynomial kernel is finite exactly when the steps span R^d.
void require_spanning(const std::vector<FieldVector>& steps) {
  Matrix<AlgebraicScalar> a(steps.begin(), steps.end());
  if (rank(a) < steps[0].size()) throw Error(ErrorKind::NotDense, "the steps do not span the space");
}

void check_system(const DifferenceSystem& sys) {
  check_steps(sys.steps, sys.orders);
  if (sys.rhs.size() != sys.steps.size())
    throw Error(ErrorKind::DimensionMismatch, "one right-hand side per step is required");
  if (sys.steps[0].size() != sys.dim) throw Error(ErrorKind::DimensionMismatch, "steps do not match the dimension");
  for (const auto& g : sys.rhs) {
    if (g.dim() != sys.dim) throw Error(ErrorKind::DimensionMismatch, "right-hand side of wrong dimension");
    require_same_field(sys.field, g.field());
  }
  require_same_field(sys.field, sys.steps[0][0].field());
}

// Multi-indices with |alpha| <= deg (or == deg), ordered by (|alpha|, alpha).
std::vector<MultiIndex> monomials(std::size_t dim, int deg, bool homogeneous = false) {
  std::vector<MultiIndex> out;
  if (deg < 0) return out;
  MultiIndex a(dim, 0);
  // odometer over [0, deg]^dim, filtered
  while (true) {
    const int t = static_cast<int>(total_degree(a));
    if (homogeneous ? t == deg : t <= deg) out.push_back(a);
    std::size_t i = 0;
    while (i < dim && a[i] == static_cast<unsigned>(deg)) a[i++] = 0;
    if (i == dim) break;
    ++a[i];
  }
  std::sort(out.begin(), out.end(), [](const MultiIndex& x, const MultiIndex& y) {
    const unsigned tx = total_degree(x), ty = total_degree(y);
    return tx != ty ? tx < ty : x < y;
  });
  return out;
}

// Delta_h^m x^beta as a plain polynomial with field coefficients.
std::map<MultiIndex, AlgebraicScalar> delta_monomial(const FieldPtr& field, const FieldVector& h, unsigned m,
                                                     const MultiIndex& beta) {
  const std::size_t d = h.size();
  const auto zero = ExpPolynomial::zero_frequency(field, d);
  const auto img = ep_forward_difference(ExpPolynomial::monomial(zero, beta, ExpCoefficient::one(field)), h, m);
  std::map<MultiIndex, AlgebraicScalar> out;
  if (const PolyPart* p = img.part_at(zero)) {
    for (const auto& [gamma, c] : *p) {
      if (!c.is_constant() || !c.constant_value().is_real())
        throw Error(ErrorKind::Internal, "difference of a monomial left the field");
      out.emplace(gamma, c.constant_value().re());
    }
  }
  return out;
}

ExpPolynomial plain_polynomial(const FieldPtr& field, std::size_t dim, const std::vector<MultiIndex>& cols,
                               const std::vector<AlgebraicScalar>& coeffs) {
  ExpPolynomial p(field, dim);
  const auto zero = ExpPolynomial::zero_frequency(field, dim);
  for (std::size_t j = 0; j < cols.size(); ++j)
    if (!coeffs[j].is_zero()) p.add_term(zero, cols[j], ExpCoefficient(coeffs[j]));
  return p;
}

// Rows (k, gamma) -> coefficient rows over the unknown monomials.
struct PolySystem {
  std::vector<MultiIndex> cols;
  Matrix<AlgebraicScalar> a;
  std::vector<std::pair<std::size_t, MultiIndex>> row_keys;
};

PolySystem polynomial_system(const FieldPtr& field, const std::vector<FieldVector>& steps,
                             const std::vector<unsigned>& orders, int cap) {
  PolySystem s;
  const std::size_t d = steps[0].size();
  s.cols = monomials(d, cap);
  const AlgebraicScalar zero(field);
  for (std::size_t k = 0; k < steps.size(); ++k) {
    std::map<MultiIndex, std::size_t> row_of;
    for (std::size_t j = 0; j < s.cols.size(); ++j) {
      for (const auto& [gamma, c] : delta_monomial(field, steps[k], orders[k], s.cols[j])) {
        auto it = row_of.find(gamma);
        if (it == row_of.end()) {
          it = row_of.emplace(gamma, s.a.size()).first;
          s.a.emplace_back(s.cols.size(), zero);
          s.row_keys.emplace_back(k, gamma);
        }
        s.a[it->second][j] = c;
      }
    }
  }
  return s;
}

AnsatzEntry ansatz_entry(const DifferenceSystem& sys, const ComplexVector& lambda) {
  bool is_zero_freq = std::all_of(lambda.begin(), lambda.end(), [](const auto& c) { return c.is_zero(); });
  int bound = 0;
  for (std::size_t k = 0; k < sys.steps.size(); ++k) {
    const int deg = sys.rhs[k].degree_at(lambda);
    if (is_zero_freq)
      bound = std::max(bound, std::max(deg, 0) + static_cast<int>(sys.orders[k]));
    else if (!dot(lambda, sys.steps[k]).is_zero())
      bound = std::max(bound, deg);
    else
      bound = std::max(bound, deg + static_cast<int>(sys.orders[k]));
  }
  return {lambda, bound};
}

std::vector<AnsatzEntry> ansatz_unchecked(const DifferenceSystem& sys) {
  std::map<ComplexVector, bool, KeyLess> freqs;
  freqs.emplace(ExpPolynomial::zero_frequency(sys.field, sys.dim), true);
  for (const auto& g : sys.rhs)
    for (const auto& l : g.frequencies()) freqs.emplace(l, true);
  std::vector<AnsatzEntry> out;
  for (const auto& [l, unused] : freqs) out.push_back(ansatz_entry(sys, l));
  return out;
}

PolyPart poly_delta(const PolyPart& p, const FieldVector& h) {
  PolyPart out = poly_translate(p, h);
  for (const auto& [a, c] : p) poly_add_term(out, a, -c);
  return out;
}

// (u tau_h - 1)^m p = g with u = e^{lambda.h} != 1. Writing the operator as
// (u - 1)(1 + u/(u-1) Delta_h) with Delta_h nilpotent on polynomials,
// (u-1)^{m+J} p = sum_j binom(-m, j) u^j (u-1)^{J-j} Delta_h^j g.
struct FrequencySolution {
  PolyPart numerator;
  ExpCoefficient denominator;
};

FrequencySolution solve_frequency(const FieldPtr& field, const PolyPart& g, const FieldVector& h, unsigned m,
                                  const ComplexAlgebraic& lambda_h) {
  const ExpCoefficient u = ExpCoefficient::exponential(lambda_h);
  const ExpCoefficient um1 = u - ExpCoefficient::one(field);
  std::vector<PolyPart> deltas{g};
  while (true) {
    PolyPart next = poly_delta(deltas.back(), h);
    if (next.empty()) break;
    deltas.push_back(std::move(next));
  }
  const unsigned big_j = static_cast<unsigned>(deltas.size() - 1);
  PolyPart q;
  for (unsigned j = 0; j <= big_j; ++j) {
    mpq_class b = binomial(m + j - 1, j);
    if (j % 2 == 1) b = -b;
    const ExpCoefficient w = ExpCoefficient::rational(field, b) * u.pow(j) * um1.pow(big_j - j);
    poly_add(q, poly_scale(deltas[j], w));
  }
  const ExpCoefficient den = um1.pow(m + big_j);
  PolyPart p;
  for (const auto& [a, c] : q) {
    auto quot = c.exact_div(den);
    if (!quot) return {q, den};
    poly_add_term(p, a, *quot);
  }
  return {p, ExpCoefficient::one(field)};
}

}  // namespace

std::vector<AnsatzEntry> solver_ansatz(const DifferenceSystem& sys) {
  check_system(sys);
  require_dense(sys.steps);
  return ansatz_unchecked(sys);
}

int kernel_degree_bound(const std::vector<FieldVector>& steps, const std::vector<unsigned>& orders) {
  check_steps(steps, orders);
  require_spanning(steps);
  const FieldPtr& field = steps[0][0].field();
  const std::size_t d = steps[0].size();
  unsigned limit = 1;
  for (unsigned m : orders) limit += m;
  const AlgebraicScalar zero(field);
  for (unsigned deg = 0; deg <= limit; ++deg) {
    const auto cols = monomials(d, static_cast<int>(deg), true);
    Matrix<AlgebraicScalar> a;
    for (std::size_t k = 0; k < steps.size(); ++k) {
      if (orders[k] > deg) continue;
      std::map<MultiIndex, std::size_t> row_of;
      for (std::size_t j = 0; j < cols.size(); ++j) {
        for (const auto& [gamma, c] : delta_monomial(field, steps[k], orders[k], cols[j])) {
          if (total_degree(gamma) != deg - orders[k]) continue;  // top part (h . grad)^m
          auto it = row_of.find(gamma);
          if (it == row_of.end()) {
            it = row_of.emplace(gamma, a.size()).first;
            a.emplace_back(cols.size(), zero);
          }
          a[it->second][j] = c;
        }
      }
    }
    if (rank(a) == cols.size()) return static_cast<int>(deg);
  }
  throw Error(ErrorKind::NotDense, "the polynomial kernel is not finite dimensional");
}

std::vector<ExpPolynomial> solver_kernel(const std::vector<FieldVector>& steps, const std::vector<unsigned>& orders,
                                         std::optional<int> cap) {
  check_steps(steps, orders);
  require_spanning(steps);
  const int d_cap = cap ? *cap : kernel_degree_bound(steps, orders) - 1;
  const FieldPtr& field = steps[0][0].field();
  const std::size_t d = steps[0].size();
  if (d_cap < 0) return {};
  PolySystem s = polynomial_system(field, steps, orders, d_cap);
  std::vector<ExpPolynomial> out;
  for (const auto& v : kernel(s.a, s.cols.size(), AlgebraicScalar(field)))
    out.push_back(plain_polynomial(field, d, s.cols, v));
  return out;
}

SolutionBundle solver_solve(const DifferenceSystem& sys) {
  check_system(sys);
  require_dense(sys.steps);
  const FieldPtr& field = sys.field;
  const std::size_t d = sys.dim;
  const std::size_t t = sys.steps.size();

  SolutionBundle out{ExpPolynomial(field, d), ExpCoefficient::one(field), {}, ansatz_unchecked(sys), 0};
  const ComplexVector zero = ExpPolynomial::zero_frequency(field, d);

  // Frequency zero: Gauss-Jordan over the field with formal exponential
  // right-hand sides; free unknowns are set to zero.
  int cap = kernel_degree_bound(sys.steps, sys.orders) - 1;
  for (const auto& e : out.ansatz)
    if (e.lambda == zero) cap = std::max(cap, e.degree_bound);
  out.kernel_degree_cap = cap;
  PolySystem s = polynomial_system(field, sys.steps, sys.orders, cap);

  struct Row {
    std::vector<AlgebraicScalar> a;
    ExpCoefficient rhs;
  };
  std::vector<Row> rows;
  std::vector<std::map<MultiIndex, std::size_t>> row_of(t);
  for (std::size_t i = 0; i < s.a.size(); ++i) {
    row_of[s.row_keys[i].first][s.row_keys[i].second] = i;
    rows.push_back({s.a[i], ExpCoefficient(field)});
  }
  for (std::size_t k = 0; k < t; ++k) {
    const PolyPart* g0 = sys.rhs[k].part_at(zero);
    if (!g0) continue;
    for (const auto& [gamma, c] : *g0) {
      auto it = row_of[k].find(gamma);
      if (it == row_of[k].end())
        throw Error(ErrorKind::Inconsistent, "equation " + std::to_string(k) + " has a polynomial term of too high degree");
      rows[it->second].rhs = c;
    }
  }
  const std::size_t n = s.cols.size();
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < rows.size(); ++c) {
    std::size_t p = r;
    while (p < rows.size() && rows[p].a[c].is_zero()) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[p], rows[r]);
    const AlgebraicScalar inv = rows[r].a[c].inverse();
    for (auto& x : rows[r].a) x *= inv;
    rows[r].rhs *= inv;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i].a[c].is_zero()) continue;
      const AlgebraicScalar f = rows[i].a[c];
      for (std::size_t j = c; j < n; ++j)
        if (!rows[r].a[j].is_zero()) rows[i].a[j] -= f * rows[r].a[j];
      rows[i].rhs -= rows[r].rhs * f;
    }
    pivots.push_back(c);
    ++r;
  }
  for (std::size_t i = r; i < rows.size(); ++i)
    if (!rows[i].rhs.is_zero())
      throw Error(ErrorKind::Inconsistent, "the polynomial part admits no simultaneous solution");
  ExpPolynomial poly0(field, d);
  for (std::size_t i = 0; i < r; ++i)
    if (!rows[i].rhs.is_zero()) poly0.add_term(zero, s.cols[pivots[i]], rows[i].rhs);
  for (const auto& v : kernel(s.a, n, AlgebraicScalar(field)))
    out.kernel_basis.push_back(plain_polynomial(field, d, s.cols, v));

  // Nonzero frequencies: e^{lambda.h} - 1 is nonzero for some step (density),
  // so one equation fixes the component; the rest are checked afterwards.
  std::vector<std::pair<ComplexVector, FrequencySolution>> parts;
  for (const auto& e : out.ansatz) {
    if (e.lambda == zero) continue;
    std::size_t ks = t;
    for (std::size_t k = 0; k < t && ks == t; ++k)
      if (!dot(e.lambda, sys.steps[k]).is_zero()) ks = k;
    if (ks == t) throw Error(ErrorKind::Internal, "frequency orthogonal to a dense set of steps");
    const PolyPart* g = sys.rhs[ks].part_at(e.lambda);
    if (!g) continue;
    parts.emplace_back(e.lambda, solve_frequency(field, *g, sys.steps[ks], sys.orders[ks],
                                                  dot(e.lambda, sys.steps[ks])));
  }
  for (const auto& [l, fs] : parts)
    if (!fs.denominator.is_one()) out.denominator = out.denominator * fs.denominator;
  out.particular = poly0 * out.denominator;
  for (const auto& [l, fs] : parts) {
    ExpCoefficient scale = ExpCoefficient::one(field);
    for (const auto& [l2, fs2] : parts)
      if (!(l2 == l) && !fs2.denominator.is_one()) scale = scale * fs2.denominator;
    out.particular.add_part(l, poly_scale(fs.numerator, scale));
  }

  for (std::size_t k = 0; k < t; ++k)
    if (ep_forward_difference(out.particular, sys.steps[k], sys.orders[k]) != sys.rhs[k] * out.denominator)
      throw Error(ErrorKind::Inconsistent, "equation " + std::to_string(k) + " is not satisfied by the solution of the others");
  for (const auto& p : out.kernel_basis)
    for (std::size_t k = 0; k < t; ++k)
      if (!ep_forward_difference(p, sys.steps[k], sys.orders[k]).is_zero())
        throw Error(ErrorKind::Internal, "kernel element not annihilated");
  return out;
}

std::complex<double> CosetSlice::operator()(std::span<const double> t) const {
  std::complex<double> v = 0.0;
  for (std::size_t j = 0; j < candidates.size(); ++j)
    if (coeffs[j] != 0.0) v += coeffs[j] * ep_eval(candidates[j], t).value;
  return v;
}

namespace {

struct SampleGrid {
  std::vector<std::vector<double>> fit, heldout;
};

std::vector<std::vector<double>> tensor_grid(std::size_t k, std::size_t n, double lo, double step) {
  std::vector<std::vector<double>> out;
  if (k == 0) return {{}};
  std::vector<std::size_t> idx(k, 0);
  while (true) {
    std::vector<double> p(k);
    for (std::size_t i = 0; i < k; ++i) p[i] = lo + step * static_cast<double>(idx[i]);
    out.push_back(std::move(p));
    std::size_t i = 0;
    while (i < k && idx[i] == n - 1) idx[i++] = 0;
    if (i == k) break;
    ++idx[i];
  }
  return out;
}

CosetSlice fit_slice(const EvaluableFunction& f, const std::vector<std::vector<double>>& v_basis,
                     const std::vector<ExpPolynomial>& candidates, const std::vector<NumericExpPoly>& numeric,
                     const FieldVector& lambda, const SampleGrid& grid) {
  const std::size_t d = f.dim();
  const std::vector<double> lam = to_doubles(lambda);
  const std::size_t k = v_basis.size();
  auto ambient = [&](const std::vector<double>& t) {
    std::vector<double> x(lam);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < d; ++j) x[j] += t[i] * v_basis[i][j];
    return x;
  };
  auto candidate_row = [&](const std::vector<double>& t, Eigen::MatrixXcd& a, Eigen::Index row) {
    const std::vector<double> tt = k == 0 ? std::vector<double>{0.0} : t;
    for (std::size_t j = 0; j < numeric.size(); ++j) a(row, static_cast<Eigen::Index>(j)) = numeric[j](tt);
  };

  const auto rows = static_cast<Eigen::Index>(grid.fit.size());
  const auto cols = static_cast<Eigen::Index>(candidates.size());
  Eigen::MatrixXcd a(rows, cols);
  Eigen::VectorXcd b(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    candidate_row(grid.fit[static_cast<std::size_t>(i)], a, i);
    b(i) = f(ambient(grid.fit[static_cast<std::size_t>(i)]));
  }
  const LeastSquares ls = least_squares(a, b);
  if (ls.condition > 1e12)
    throw Error(ErrorKind::IllConditionedFit, "condition estimate " + std::to_string(ls.condition) + " above 1e12");

  CosetSlice s;
  s.lambda = lambda;
  s.candidates = candidates;
  s.coeffs.assign(ls.coeffs.data(), ls.coeffs.data() + ls.coeffs.size());
  s.fit_residual = ls.max_residual;
  s.rank = ls.rank;
  s.condition = ls.condition;
  Eigen::MatrixXcd h(static_cast<Eigen::Index>(grid.heldout.size()), cols);
  for (std::size_t i = 0; i < grid.heldout.size(); ++i) {
    candidate_row(grid.heldout[i], h, static_cast<Eigen::Index>(i));
    const std::complex<double> fitted = (h.row(static_cast<Eigen::Index>(i)) * ls.coeffs)(0);
    s.heldout_residual = std::max(s.heldout_residual, std::abs(fitted - f(ambient(grid.heldout[i]))));
  }
  return s;
}

// Gram-Schmidt over the field.
std::vector<FieldVector> orthogonalize(const std::vector<FieldVector>& vs) {
  std::vector<FieldVector> out;
  for (const auto& v : vs) {
    FieldVector u = v;
    for (const auto& o : out) u = u - scaled(o, dot(u, o) / dot(o, o));
    if (!is_zero(u)) out.push_back(std::move(u));
  }
  return out;
}

}  // namespace

CosetFitReport coset_fit(const EvaluableFunction& f, const GroupClosure& closure, const std::vector<FieldVector>& steps,
                         const std::vector<unsigned>& orders, const FunctionSubspace& h,
                         const std::vector<FieldVector>& lambdas, const CosetGrid& grid) {
  if (closure.dense) throw Error(ErrorKind::DenseGroup, "the step group is dense; use the solver instead");
  check_steps(steps, orders);
  const std::size_t d = closure.dim;
  if (f.dim() != d || h.ambient_dim() != d || steps[0].size() != d)
    throw Error(ErrorKind::DimensionMismatch, "function, space and steps must share the dimension of the closure");
  if (lambdas.empty()) throw Error(ErrorKind::EmptyInput, "no lattice points given");
  const FieldPtr& field = closure.field;
  for (const auto& l : lambdas) {
    if (l.size() != d) throw Error(ErrorKind::DimensionMismatch, "lattice point of wrong dimension");
    if (is_zero(l)) continue;
    auto c = closure.lambda_basis.empty() ? std::nullopt : coordinates_in(closure.lambda_basis, l);
    bool integral = c.has_value();
    if (c)
      for (const auto& x : *c) integral = integral && x.is_rational() && x.rational_value().get_den() == 1;
    if (!integral) throw Error(ErrorKind::Malformed, "lambda is not in the lattice spanned by the closure");
  }

  std::vector<OperatorPower> ops;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (!h.invariant_under(op_delta(steps[k], orders[k])))
      throw NotInvariantError(k, "H is not invariant under the difference operator of step " + std::to_string(k));
    ops.push_back({op_delta(steps[k], 1), orders[k]});
  }
  CosetFitReport report;
  const FunctionSubspace closed = space_diamond(h, ops);
  report.closed_space = closed.basis();
  report.v_basis = closure.v_basis;
  for (const auto& b : orthogonalize(orthogonal_complement(field, closure.v_basis, d))) {
    report.hstar.push_back(b);
    report.hstar.push_back(scaled(b, AlgebraicScalar::theta(field)));
  }

  // Candidates in V coordinates t (x = sum t_i v_i): the closed space
  // restricted to V plus every polynomial up to its polynomial degree + N.
  const std::size_t k = closure.v_basis.size();
  std::vector<ExpPolynomial> candidates;
  if (k == 0) {
    candidates.push_back(ExpPolynomial::constant(field, 1, ExpCoefficient::one(field)));
  } else {
    std::vector<FieldVector> a(d, FieldVector(k, AlgebraicScalar(field)));
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < k; ++j) a[i][j] = closure.v_basis[j][i];
    const ComplexVector zero = ExpPolynomial::zero_frequency(field, k);
    int deg0 = 0;
    for (const auto& b : report.closed_space) {
      ExpPolynomial c = ep_compose_linear(b, a, k);
      if (c.is_zero()) continue;
      deg0 = std::max(deg0, c.degree_at(zero));
      candidates.push_back(std::move(c));
    }
    int n_total = 0;
    for (unsigned n : orders) n_total += static_cast<int>(n);
    for (const auto& alpha : monomials(k, deg0 + n_total))
      candidates.push_back(ExpPolynomial::monomial(zero, alpha, ExpCoefficient::one(field)));
  }
  std::vector<NumericExpPoly> numeric;
  for (const auto& c : candidates) numeric.emplace_back(c);

  std::size_t n = std::max<std::size_t>(grid.points, 2);
  if (k > 0)
    while (std::pow(static_cast<double>(n), static_cast<double>(k)) < 2.0 * static_cast<double>(candidates.size()))
      n += 2;
  const double step = 2.0 * grid.half_width / static_cast<double>(n - 1);
  SampleGrid samples{tensor_grid(k, n, -grid.half_width, step),
                     tensor_grid(k, n - 1, -grid.half_width + step / 2.0, step)};

  std::vector<std::vector<double>> v_basis;
  for (const auto& v : closure.v_basis) v_basis.push_back(to_doubles(v));
  std::vector<std::future<CosetSlice>> jobs;
  for (const auto& l : lambdas)
    jobs.push_back(std::async(std::launch::async, fit_slice, std::cref(f), std::cref(v_basis), std::cref(candidates),
                              std::cref(numeric), std::cref(l), std::cref(samples)));
  for (auto& j : jobs) report.slices.push_back(j.get());
  return report;
}

}  // namespace deltaclose
