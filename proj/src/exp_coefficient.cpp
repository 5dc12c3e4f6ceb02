#include "deltaclose/exp_coefficient.hpp"

#include "deltaclose/error.hpp"

namespace deltaclose {

namespace {

void add_term(ExpCoefficient::TermMap& m, const ComplexAlgebraic& mu, const ComplexAlgebraic& c) {
  if (c.is_zero()) return;
  auto it = m.find(mu);
  if (it == m.end()) {
    m.emplace(mu, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) m.erase(it);
}

constexpr std::size_t kDivisionStepCap = 200000;

}  // namespace

ExpCoefficient::ExpCoefficient(FieldPtr field) : field_(std::move(field)) {}

ExpCoefficient::ExpCoefficient(const ComplexAlgebraic& constant) : field_(constant.field()) {
  if (!constant.is_zero()) terms_.emplace(ComplexAlgebraic(field_), constant);
}

ExpCoefficient ExpCoefficient::one(const FieldPtr& field) {
  return ExpCoefficient(ComplexAlgebraic(AlgebraicScalar(field, mpq_class(1))));
}

ExpCoefficient ExpCoefficient::rational(const FieldPtr& field, const mpq_class& q) {
  return ExpCoefficient(ComplexAlgebraic(AlgebraicScalar(field, q)));
}

ExpCoefficient ExpCoefficient::exponential(const ComplexAlgebraic& mu, const ComplexAlgebraic& coeff) {
  ExpCoefficient r(mu.field());
  require_same_field(mu.field(), coeff.field());
  if (!coeff.is_zero()) r.terms_.emplace(mu, coeff);
  return r;
}

ExpCoefficient ExpCoefficient::exponential(const ComplexAlgebraic& mu) {
  return exponential(mu, ComplexAlgebraic(AlgebraicScalar(mu.field(), mpq_class(1))));
}

ExpCoefficient ExpCoefficient::from_terms(const FieldPtr& field,
                                          const std::vector<std::pair<ComplexAlgebraic, ComplexAlgebraic>>& terms) {
  ExpCoefficient r(field);
  for (const auto& [mu, c] : terms) {
    require_same_field(field, mu.field());
    add_term(r.terms_, mu, c);
  }
  return r;
}

bool ExpCoefficient::is_one() const {
  if (terms_.size() != 1) return false;
  const auto& [mu, c] = *terms_.begin();
  return mu.is_zero() && c.is_real() && c.re().is_rational() && c.re().rational_value() == 1;
}

bool ExpCoefficient::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_zero());
}

ComplexAlgebraic ExpCoefficient::constant_value() const {
  if (!is_constant()) throw Error(ErrorKind::Internal, "coefficient is not constant");
  return terms_.empty() ? ComplexAlgebraic(field_) : terms_.begin()->second;
}

ExpCoefficient ExpCoefficient::conj() const {
  ExpCoefficient r(field_);
  for (const auto& [mu, c] : terms_) r.terms_.emplace(mu.conj(), c.conj());
  return r;
}

ExpCoefficient ExpCoefficient::operator-() const {
  ExpCoefficient r(*this);
  for (auto& [mu, c] : r.terms_) c = -c;
  return r;
}

ExpCoefficient& ExpCoefficient::operator+=(const ExpCoefficient& o) {
  require_same_field(field_, o.field_);
  for (const auto& [mu, c] : o.terms_) add_term(terms_, mu, c);
  return *this;
}

ExpCoefficient& ExpCoefficient::operator-=(const ExpCoefficient& o) {
  require_same_field(field_, o.field_);
  for (const auto& [mu, c] : o.terms_) add_term(terms_, mu, -c);
  return *this;
}

ExpCoefficient& ExpCoefficient::operator*=(const ComplexAlgebraic& c) {
  require_same_field(field_, c.field());
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [mu, v] : terms_) v *= c;
  return *this;
}

ExpCoefficient& ExpCoefficient::operator*=(const AlgebraicScalar& c) {
  require_same_field(field_, c.field());
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [mu, v] : terms_) v *= c;
  return *this;
}

ExpCoefficient operator*(const ExpCoefficient& a, const ExpCoefficient& b) {
  require_same_field(a.field_, b.field_);
  ExpCoefficient r(a.field_);
  if (a.is_zero() || b.is_zero()) return r;
  if (b.is_constant()) return a * b.constant_value();
  if (a.is_constant()) return b * a.constant_value();
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) add_term(r.terms_, ma + mb, ca * cb);
  return r;
}

ExpCoefficient expcoef_mul(const ExpCoefficient& a, const ExpCoefficient& b) { return a * b; }

bool operator==(const ExpCoefficient& a, const ExpCoefficient& b) {
  require_same_field(a.field_, b.field_);
  if (a.terms_.size() != b.terms_.size()) return false;
  auto ib = b.terms_.begin();
  for (auto ia = a.terms_.begin(); ia != a.terms_.end(); ++ia, ++ib)
    if (ia->first != ib->first || ia->second != ib->second) return false;
  return true;
}

int ExpCoefficient::compare(const ExpCoefficient& a, const ExpCoefficient& b) {
  auto ia = a.terms_.begin();
  auto ib = b.terms_.begin();
  for (; ia != a.terms_.end() && ib != b.terms_.end(); ++ia, ++ib) {
    int c = ComplexAlgebraic::key_compare(ia->first, ib->first);
    if (c != 0) return c;
    c = ComplexAlgebraic::key_compare(ia->second, ib->second);
    if (c != 0) return c;
  }
  if (ia == a.terms_.end() && ib == b.terms_.end()) return 0;
  return ia == a.terms_.end() ? -1 : 1;
}

ExpCoefficient ExpCoefficient::pow(unsigned n) const {
  ExpCoefficient r = one(field_);
  ExpCoefficient base = *this;
  while (n) {
    if (n & 1u) r = r * base;
    n >>= 1u;
    if (n) base = base * base;
  }
  return r;
}

ExpCoefficient ExpCoefficient::unit_inverse() const {
  if (!is_unit()) throw Error(ErrorKind::ZeroDivisor, "coefficient is not a unit of the group ring");
  const auto& [mu, c] = *terms_.begin();
  return exponential(-mu, c.inverse());
}

namespace {

std::vector<mpq_class> exponent_coordinates(const ComplexAlgebraic& mu) {
  std::vector<mpq_class> x = mu.re().coords();
  x.insert(x.end(), mu.im().coords().begin(), mu.im().coords().end());
  return x;
}

}  // namespace

std::optional<ExpCoefficient> ExpCoefficient::exact_div(const ExpCoefficient& b) const {
  require_same_field(field_, b.field_);
  if (b.is_zero()) throw Error(ErrorKind::ZeroDivisor, "division by the zero coefficient");
  if (is_zero()) return ExpCoefficient(field_);
  if (b.is_unit()) return *this * b.unit_inverse();

  const auto& [lead_b_mu, lead_b_c] = *b.terms_.rbegin();
  const ComplexAlgebraic lead_b_inv = lead_b_c.inverse();
  const ComplexAlgebraic floor_mu = terms_.begin()->first - b.terms_.begin()->first;

  // If a = q b then, coordinate by coordinate on the rational expansion of
  // the exponents, min(a) = min(q) + min(b) and max(a) = max(q) + max(b).
  // Quotient exponents therefore live in a finite box.
  const auto bounds = [](const TermMap& t) {
    std::vector<mpq_class> lo, hi;
    for (const auto& [mu, c] : t) {
      const auto x = exponent_coordinates(mu);
      if (lo.empty()) {
        lo = hi = x;
        continue;
      }
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < lo[i]) lo[i] = x[i];
        if (x[i] > hi[i]) hi[i] = x[i];
      }
    }
    return std::make_pair(lo, hi);
  };
  auto [alo, ahi] = bounds(terms_);
  const auto [blo, bhi] = bounds(b.terms_);
  for (std::size_t i = 0; i < alo.size(); ++i) {
    alo[i] -= blo[i];
    ahi[i] -= bhi[i];
    if (alo[i] > ahi[i]) return std::nullopt;
  }

  ExpCoefficient quotient(field_);
  ExpCoefficient rem(*this);
  for (std::size_t step = 0; !rem.is_zero(); ++step) {
    if (step > kDivisionStepCap) return std::nullopt;
    const auto& [lead_mu, lead_c] = *rem.terms_.rbegin();
    ComplexAlgebraic mu = lead_mu - lead_b_mu;
    if (ComplexAlgebraic::key_compare(mu, floor_mu) < 0) return std::nullopt;
    const auto x = exponent_coordinates(mu);
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i] < alo[i] || x[i] > ahi[i]) return std::nullopt;
    ComplexAlgebraic c = lead_c * lead_b_inv;
    quotient.terms_.emplace(mu, c);
    for (const auto& [mb, cb] : b.terms_) add_term(rem.terms_, mu + mb, -(c * cb));
  }
  return quotient;
}

}  // namespace deltaclose
