#include "deltaclose/exp_polynomial.hpp"

#include <cmath>
#include <limits>

#include "deltaclose/echelon.hpp"
#include "deltaclose/error.hpp"
#include "deltaclose/numeric.hpp"

namespace deltaclose {

unsigned total_degree(const MultiIndex& a) {
  unsigned s = 0;
  for (unsigned x : a) s += x;
  return s;
}

void poly_add_term(PolyPart& p, const MultiIndex& alpha, const ExpCoefficient& c) {
  if (c.is_zero()) return;
  auto it = p.find(alpha);
  if (it == p.end()) {
    p.emplace(alpha, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) p.erase(it);
}

void poly_add(PolyPart& p, const PolyPart& q) {
  for (const auto& [a, c] : q) poly_add_term(p, a, c);
}

PolyPart poly_scale(const PolyPart& p, const ExpCoefficient& c) {
  PolyPart r;
  if (c.is_zero()) return r;
  for (const auto& [a, x] : p) {
    ExpCoefficient y = x * c;
    if (!y.is_zero()) r.emplace(a, std::move(y));
  }
  return r;
}

PolyPart poly_mul(const PolyPart& p, const PolyPart& q) {
  PolyPart r;
  for (const auto& [a, x] : p)
    for (const auto& [b, y] : q) {
      MultiIndex ab(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) ab[i] = a[i] + b[i];
      poly_add_term(r, ab, x * y);
    }
  return r;
}

int poly_degree(const PolyPart& p) {
  int d = -1;
  for (const auto& [a, c] : p) d = std::max(d, static_cast<int>(total_degree(a)));
  return d;
}

PolyPart poly_translate(const PolyPart& p, const FieldVector& y) {
  if (p.empty()) return {};
  const std::size_t dim = y.size();
  const FieldPtr& field = y.at(0).field();
  unsigned maxdeg = 0;
  for (const auto& [a, c] : p)
    for (unsigned e : a) maxdeg = std::max(maxdeg, e);
  // powers[i][k] = y_i^k
  std::vector<std::vector<AlgebraicScalar>> powers(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    powers[i].push_back(AlgebraicScalar(field, mpq_class(1)));
    for (unsigned k = 1; k <= maxdeg; ++k) powers[i].push_back(powers[i].back() * y[i]);
  }
  PolyPart r;
  for (const auto& [alpha, c] : p) {
    if (alpha.size() != dim) throw Error(ErrorKind::DimensionMismatch, "shift dimension differs from polynomial");
    // iterate beta <= alpha
    MultiIndex beta(dim, 0);
    while (true) {
      AlgebraicScalar w(field, mpq_class(1));
      for (std::size_t i = 0; i < dim; ++i) {
        w *= binomial(alpha[i], beta[i]);
        w *= powers[i][alpha[i] - beta[i]];
      }
      if (!w.is_zero()) poly_add_term(r, beta, c * w);
      std::size_t i = 0;
      while (i < dim && beta[i] == alpha[i]) beta[i++] = 0;
      if (i == dim) break;
      ++beta[i];
    }
  }
  return r;
}

PolyPart poly_derivative(const PolyPart& p, std::size_t i) {
  PolyPart r;
  for (const auto& [a, c] : p) {
    if (a.at(i) == 0) continue;
    MultiIndex b = a;
    --b[i];
    poly_add_term(r, b, c * AlgebraicScalar(c.field(), mpq_class(a[i])));
  }
  return r;
}

ExpPolynomial::ExpPolynomial(FieldPtr field, std::size_t dim) : field_(std::move(field)), dim_(dim) {
  if (!field_) throw Error(ErrorKind::Internal, "null field");
  if (dim_ == 0) throw Error(ErrorKind::DimensionMismatch, "exponential polynomials need dimension >= 1");
}

ComplexVector ExpPolynomial::zero_frequency(const FieldPtr& field, std::size_t dim) {
  return ComplexVector(dim, ComplexAlgebraic(field));
}

ExpPolynomial ExpPolynomial::monomial(const ComplexVector& lambda, const MultiIndex& alpha,
                                      const ExpCoefficient& coeff) {
  if (lambda.size() != alpha.size()) throw Error(ErrorKind::DimensionMismatch, "frequency and multi-index differ");
  ExpPolynomial f(coeff.field(), lambda.size());
  f.add_term(lambda, alpha, coeff);
  return f;
}

ExpPolynomial ExpPolynomial::constant(const FieldPtr& field, std::size_t dim, const ExpCoefficient& c) {
  ExpPolynomial f(field, dim);
  f.add_term(zero_frequency(field, dim), MultiIndex(dim, 0), c);
  return f;
}

std::vector<ComplexVector> ExpPolynomial::frequencies() const {
  std::vector<ComplexVector> r;
  for (const auto& [l, p] : terms_) r.push_back(l);
  return r;
}

int ExpPolynomial::degree_at(const ComplexVector& lambda) const {
  auto it = terms_.find(lambda);
  return it == terms_.end() ? -1 : poly_degree(it->second);
}

const PolyPart* ExpPolynomial::part_at(const ComplexVector& lambda) const {
  auto it = terms_.find(lambda);
  return it == terms_.end() ? nullptr : &it->second;
}

void ExpPolynomial::add_term(const ComplexVector& lambda, const MultiIndex& alpha, const ExpCoefficient& c) {
  if (lambda.size() != dim_ || alpha.size() != dim_)
    throw Error(ErrorKind::DimensionMismatch, "term dimension differs from exponential polynomial");
  if (c.is_zero()) return;
  require_same_field(field_, c.field());
  auto it = terms_.find(lambda);
  if (it == terms_.end()) {
    PolyPart p;
    p.emplace(alpha, c);
    terms_.emplace(lambda, std::move(p));
    return;
  }
  poly_add_term(it->second, alpha, c);
  if (it->second.empty()) terms_.erase(it);
}

void ExpPolynomial::add_part(const ComplexVector& lambda, const PolyPart& p) {
  for (const auto& [a, c] : p) add_term(lambda, a, c);
}

ExpPolynomial ExpPolynomial::operator-() const {
  ExpPolynomial r(*this);
  for (auto& [l, p] : r.terms_)
    for (auto& [a, c] : p) c = -c;
  return r;
}

ExpPolynomial& ExpPolynomial::operator+=(const ExpPolynomial& o) {
  if (o.dim_ != dim_) throw Error(ErrorKind::DimensionMismatch, "sum of exponential polynomials of different dimension");
  for (const auto& [l, p] : o.terms_) add_part(l, p);
  return *this;
}

ExpPolynomial& ExpPolynomial::operator-=(const ExpPolynomial& o) { return *this += -o; }

ExpPolynomial& ExpPolynomial::operator*=(const ExpCoefficient& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [l, p] : terms_) p = poly_scale(p, c);
  return *this;
}

bool operator==(const ExpPolynomial& a, const ExpPolynomial& b) {
  if (a.dim_ != b.dim_) return false;
  if (a.terms_.size() != b.terms_.size()) return false;
  auto ib = b.terms_.begin();
  for (auto ia = a.terms_.begin(); ia != a.terms_.end(); ++ia, ++ib) {
    if (KeyLess{}(ia->first, ib->first) || KeyLess{}(ib->first, ia->first)) return false;
    if (ia->second.size() != ib->second.size()) return false;
    auto jb = ib->second.begin();
    for (auto ja = ia->second.begin(); ja != ia->second.end(); ++ja, ++jb)
      if (ja->first != jb->first || ja->second != jb->second) return false;
  }
  return true;
}

ExpPolynomial ExpPolynomial::conj() const {
  ExpPolynomial r(field_, dim_);
  for (const auto& [l, p] : terms_) {
    ComplexVector lc;
    for (const auto& x : l) lc.push_back(x.conj());
    for (const auto& [a, c] : p) r.add_term(lc, a, c.conj());
  }
  return r;
}

bool ExpPolynomial::is_plain_polynomial() const {
  for (const auto& [l, p] : terms_) {
    for (const auto& x : l)
      if (!x.is_zero()) return false;
    for (const auto& [a, c] : p)
      if (!c.is_constant()) return false;
  }
  return true;
}

ExpPolynomial ep_translate(const ExpPolynomial& f, const FieldVector& y) {
  if (y.size() != f.dim()) throw Error(ErrorKind::DimensionMismatch, "shift dimension differs from function");
  for (const auto& v : y) require_same_field(f.field(), v.field());
  ExpPolynomial r(f.field(), f.dim());
  for (const auto& [lambda, p] : f.terms()) {
    ComplexAlgebraic ly = dot(lambda, y);
    PolyPart shifted = poly_translate(p, y);
    if (!ly.is_zero()) shifted = poly_scale(shifted, ExpCoefficient::exponential(ly));
    r.add_part(lambda, shifted);
  }
  return r;
}

ExpPolynomial ep_forward_difference(const ExpPolynomial& f, const FieldVector& h, unsigned m) {
  if (h.size() != f.dim()) throw Error(ErrorKind::DimensionMismatch, "step dimension differs from function");
  ExpPolynomial r(f.field(), f.dim());
  for (unsigned k = 0; k <= m; ++k) {
    mpq_class w = binomial(m, k);
    if ((m - k) % 2 == 1) w = -w;
    ExpPolynomial shifted = ep_translate(f, scaled(h, AlgebraicScalar(f.field(), mpq_class(k))));
    r += shifted * ExpCoefficient::rational(f.field(), w);
  }
  return r;
}

std::vector<ExpPolynomial> ep_translation_hull(const ExpPolynomial& f) {
  std::vector<ExpPolynomial> basis;
  EchelonBasis echelon(f.field());
  for (const auto& [lambda, p] : f.terms()) {
    // All partial derivatives of p, breadth first.
    std::vector<PolyPart> frontier{p};
    while (!frontier.empty()) {
      std::vector<PolyPart> next;
      for (const auto& q : frontier) {
        ExpPolynomial g(f.field(), f.dim());
        g.add_part(lambda, q);
        if (!echelon.insert(to_sparse(g))) continue;
        basis.push_back(g);
        for (std::size_t i = 0; i < f.dim(); ++i) {
          PolyPart dq = poly_derivative(q, i);
          if (!dq.empty()) next.push_back(std::move(dq));
        }
      }
      frontier = std::move(next);
    }
  }
  return basis;
}

ExpPolynomial ep_compose_linear(const ExpPolynomial& f, const std::vector<FieldVector>& rows, std::size_t new_dim) {
  if (rows.size() != f.dim()) throw Error(ErrorKind::DimensionMismatch, "linear map rows differ from function dimension");
  const FieldPtr& field = f.field();
  // Linear forms y_i = sum_j A_ij x_j as polynomial parts.
  std::vector<PolyPart> forms(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != new_dim) throw Error(ErrorKind::DimensionMismatch, "linear map row has wrong length");
    for (std::size_t j = 0; j < new_dim; ++j) {
      MultiIndex e(new_dim, 0);
      e[j] = 1;
      poly_add_term(forms[i], e, ExpCoefficient(rows[i][j]));
    }
  }
  ExpPolynomial r(field, new_dim);
  std::vector<std::vector<PolyPart>> powers(rows.size());
  auto power = [&](std::size_t i, unsigned k) -> const PolyPart& {
    auto& cache = powers[i];
    if (cache.empty()) {
      PolyPart one;
      one.emplace(MultiIndex(new_dim, 0), ExpCoefficient::one(field));
      cache.push_back(std::move(one));
    }
    while (cache.size() <= k) cache.push_back(poly_mul(cache.back(), forms[i]));
    return cache[k];
  };
  for (const auto& [lambda, p] : f.terms()) {
    ComplexVector mu(new_dim, ComplexAlgebraic(field));
    for (std::size_t j = 0; j < new_dim; ++j)
      for (std::size_t i = 0; i < rows.size(); ++i) mu[j] += lambda[i] * rows[i][j];
    for (const auto& [alpha, c] : p) {
      PolyPart term;
      term.emplace(MultiIndex(new_dim, 0), c);
      for (std::size_t i = 0; i < alpha.size(); ++i)
        if (alpha[i] > 0) term = poly_mul(term, power(i, alpha[i]));
      r.add_part(mu, term);
    }
  }
  return r;
}

ExpPolynomial ep_component(const ExpPolynomial& f, const ComplexVector& lambda) {
  ExpPolynomial r(f.field(), f.dim());
  if (const PolyPart* p = f.part_at(lambda)) r.add_part(lambda, *p);
  return r;
}

NumericExpPoly::NumericExpPoly(const ExpPolynomial& f) : dim_(f.dim()) {
  constexpr unsigned kBits = 80;
  for (const auto& [lambda, p] : f.terms()) {
    Term t;
    for (const auto& l : lambda) {
      ComplexBig v{to_bigfloat(l.re(), kBits), to_bigfloat(l.im(), kBits)};
      t.lambda.emplace_back(v.re.to_double(), v.im.to_double());
    }
    for (const auto& [alpha, c] : p) {
      std::complex<double> v = expcoef_eval(c, kBits);
      t.coeff_error += std::abs(v) * std::numeric_limits<double>::epsilon();
      t.poly.emplace_back(alpha, v);
      for (unsigned e : alpha) max_degree_ = std::max(max_degree_, e);
    }
    terms_.push_back(std::move(t));
  }
}

std::complex<double> NumericExpPoly::operator()(std::span<const double> x) const {
  double unused = 0.0;
  return eval(x, unused);
}

std::complex<double> NumericExpPoly::eval(std::span<const double> x, double& error_bound) const {
  if (x.size() != dim_) throw Error(ErrorKind::DimensionMismatch, "evaluation point has wrong dimension");
  std::vector<std::vector<double>> pw(dim_, std::vector<double>(max_degree_ + 1, 1.0));
  for (std::size_t i = 0; i < dim_; ++i)
    for (unsigned k = 1; k <= max_degree_; ++k) pw[i][k] = pw[i][k - 1] * x[i];
  std::complex<double> total = 0.0;
  double magnitude = 0.0;
  double coeff_err = 0.0;
  for (const auto& t : terms_) {
    std::complex<double> arg = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) arg += t.lambda[i] * x[i];
    const std::complex<double> e = std::exp(arg);
    std::complex<double> poly = 0.0;
    double pmag = 0.0;
    for (const auto& [alpha, c] : t.poly) {
      double mono = 1.0;
      for (std::size_t i = 0; i < dim_; ++i) mono *= pw[i][alpha[i]];
      poly += c * mono;
      pmag += std::abs(c) * std::abs(mono);
    }
    total += poly * e;
    magnitude += pmag * std::abs(e) * (1.0 + std::abs(arg));
    coeff_err += t.coeff_error * std::abs(e);
  }
  const double ops = static_cast<double>(4 * (max_degree_ + dim_) + 8);
  error_bound = ops * std::numeric_limits<double>::epsilon() * magnitude + coeff_err;
  return total;
}

EvalResult ep_eval(const ExpPolynomial& f, std::span<const double> x) {
  for (double v : x)
    if (!std::isfinite(v)) throw Error(ErrorKind::Malformed, "evaluation point must be finite");
  NumericExpPoly n(f);
  EvalResult r{};
  r.value = n.eval(x, r.error_bound);
  return r;
}

ExpCoefficient ep_eval_exact(const ExpPolynomial& f, const FieldVector& x) {
  if (x.size() != f.dim()) throw Error(ErrorKind::DimensionMismatch, "evaluation point has wrong dimension");
  for (const auto& v : x) require_same_field(f.field(), v.field());
  ExpCoefficient total(f.field());
  for (const auto& [lambda, p] : f.terms()) {
    ExpCoefficient poly(f.field());
    for (const auto& [alpha, c] : p) {
      AlgebraicScalar mono(f.field(), mpq_class(1));
      for (std::size_t i = 0; i < alpha.size(); ++i)
        for (unsigned k = 0; k < alpha[i]; ++k) mono *= x[i];
      poly += c * mono;
    }
    total += poly * ExpCoefficient::exponential(dot(lambda, x));
  }
  return total;
}

bool AtomLess::operator()(const Atom& a, const Atom& b) const {
  KeyLess k;
  if (k(a.lambda, b.lambda)) return true;
  if (k(b.lambda, a.lambda)) return false;
  unsigned da = total_degree(a.alpha), db = total_degree(b.alpha);
  if (da != db) return da > db;
  return a.alpha > b.alpha;
}

SparseVector to_sparse(const ExpPolynomial& f) {
  SparseVector v;
  for (const auto& [lambda, p] : f.terms())
    for (const auto& [alpha, c] : p) v.emplace(Atom{lambda, alpha}, c);
  return v;
}

ExpPolynomial from_sparse(const FieldPtr& field, std::size_t dim, const SparseVector& v) {
  ExpPolynomial f(field, dim);
  for (const auto& [atom, c] : v) f.add_term(atom.lambda, atom.alpha, c);
  return f;
}

}  // namespace deltaclose
