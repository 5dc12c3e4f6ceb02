#include "deltaclose/translation.hpp"

#include <cmath>

#include "deltaclose/error.hpp"
#include "deltaclose/numeric.hpp"

namespace deltaclose {

TranslationPolynomial::TranslationPolynomial(FieldPtr field, std::size_t dim) : field_(std::move(field)), dim_(dim) {
  if (!field_) throw Error(ErrorKind::Internal, "null field");
  if (dim_ == 0) throw Error(ErrorKind::DimensionMismatch, "translation operators need dimension >= 1");
}

TranslationPolynomial TranslationPolynomial::identity(const FieldPtr& field, std::size_t dim) {
  TranslationPolynomial r(field, dim);
  r.add_term(zero_vector(field, dim), ExpCoefficient::one(field));
  return r;
}

TranslationPolynomial TranslationPolynomial::shift(const FieldVector& y, const ExpCoefficient& coeff) {
  if (y.empty()) throw Error(ErrorKind::DimensionMismatch, "empty shift");
  TranslationPolynomial r(y[0].field(), y.size());
  r.add_term(y, coeff);
  return r;
}

TranslationPolynomial TranslationPolynomial::shift(const FieldVector& y) {
  if (y.empty()) throw Error(ErrorKind::DimensionMismatch, "empty shift");
  return shift(y, ExpCoefficient::one(y[0].field()));
}

void TranslationPolynomial::add_term(const FieldVector& y, const ExpCoefficient& c) {
  if (y.size() != dim_) throw Error(ErrorKind::DimensionMismatch, "shift dimension differs from operator");
  if (c.is_zero()) return;
  require_same_field(field_, c.field());
  for (const auto& v : y) require_same_field(field_, v.field());
  auto it = terms_.find(y);
  if (it == terms_.end()) {
    terms_.emplace(y, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) terms_.erase(it);
}

TranslationPolynomial TranslationPolynomial::operator-() const {
  TranslationPolynomial r(*this);
  for (auto& [y, c] : r.terms_) c = -c;
  return r;
}

TranslationPolynomial& TranslationPolynomial::operator+=(const TranslationPolynomial& o) {
  if (o.dim_ != dim_) throw Error(ErrorKind::DimensionMismatch, "sum of operators of different dimension");
  for (const auto& [y, c] : o.terms_) add_term(y, c);
  return *this;
}

TranslationPolynomial& TranslationPolynomial::operator-=(const TranslationPolynomial& o) { return *this += -o; }

TranslationPolynomial& TranslationPolynomial::operator*=(const ExpCoefficient& c) {
  require_same_field(field_, c.field());
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [y, x] : terms_) x = x * c;
  return *this;
}

TranslationPolynomial operator*(const TranslationPolynomial& a, const TranslationPolynomial& b) {
  if (a.dim_ != b.dim_) throw Error(ErrorKind::DimensionMismatch, "composition of operators of different dimension");
  require_same_field(a.field_, b.field_);
  TranslationPolynomial r(a.field_, a.dim_);
  for (const auto& [y, c] : a.terms_)
    for (const auto& [z, d] : b.terms_) r.add_term(y + z, c * d);
  return r;
}

bool operator==(const TranslationPolynomial& a, const TranslationPolynomial& b) {
  if (a.dim_ != b.dim_ || a.terms_.size() != b.terms_.size()) return false;
  auto ib = b.terms_.begin();
  for (auto ia = a.terms_.begin(); ia != a.terms_.end(); ++ia, ++ib) {
    if (KeyLess{}(ia->first, ib->first) || KeyLess{}(ib->first, ia->first)) return false;
    if (ia->second != ib->second) return false;
  }
  return true;
}

TranslationPolynomial TranslationPolynomial::pow(unsigned n) const {
  TranslationPolynomial r = identity(field_, dim_);
  TranslationPolynomial base = *this;
  while (n > 0) {
    if (n & 1u) r = r * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return r;
}

ExpPolynomial TranslationPolynomial::apply(const ExpPolynomial& f) const {
  if (f.dim() != dim_) throw Error(ErrorKind::DimensionMismatch, "operator and function dimensions differ");
  require_same_field(field_, f.field());
  ExpPolynomial r(field_, dim_);
  for (const auto& [y, c] : terms_) r += ep_translate(f, y) * c;
  return r;
}

TranslationPolynomial op_delta(const FieldVector& h, unsigned m) {
  if (h.empty()) throw Error(ErrorKind::DimensionMismatch, "empty step");
  const FieldPtr& field = h[0].field();
  TranslationPolynomial r(field, h.size());
  for (unsigned k = 0; k <= m; ++k) {
    mpq_class w = binomial(m, k);
    if ((m - k) % 2 == 1) w = -w;
    r.add_term(scaled(h, AlgebraicScalar(field, mpq_class(k))), ExpCoefficient::rational(field, w));
  }
  return r;
}

TranslationPolynomial op_compose(const TranslationPolynomial& a, const TranslationPolynomial& b) { return a * b; }

TranslationPolynomial op_divisibility_factor(const FieldVector& h, long p, unsigned n) {
  if (p == 0) throw Error(ErrorKind::Malformed, "divisibility factor needs p != 0");
  if (h.empty()) throw Error(ErrorKind::DimensionMismatch, "empty step");
  const FieldPtr& field = h[0].field();
  const std::size_t d = h.size();
  const unsigned long q = static_cast<unsigned long>(p < 0 ? -p : p);
  // 1 + tau_h + ... + tau_h^{q-1}
  TranslationPolynomial geometric(field, d);
  for (unsigned long j = 0; j < q; ++j)
    geometric.add_term(scaled(h, AlgebraicScalar(field, mpq_class(static_cast<long>(j)))), ExpCoefficient::one(field));
  TranslationPolynomial factor = geometric.pow(n);
  if (p < 0) {
    // tau_{-qh} - 1 = -tau_{-qh} (tau_{qh} - 1)
    FieldVector back = scaled(h, AlgebraicScalar(field, mpq_class(p)));
    TranslationPolynomial sign = TranslationPolynomial::shift(back, ExpCoefficient::rational(field, -1));
    factor = sign.pow(n) * factor;
  }
  return factor;
}

TelescopeExpansion op_telescope_expand(const std::vector<FieldVector>& h, const std::vector<long>& m, unsigned N) {
  if (h.empty()) throw Error(ErrorKind::EmptyGeneratorList, "telescoping needs at least one step");
  if (h.size() != m.size()) throw Error(ErrorKind::DimensionMismatch, "steps and powers differ in length");
  if (N == 0) throw Error(ErrorKind::Malformed, "N must be positive");
  if (h[0].empty()) throw Error(ErrorKind::DimensionMismatch, "empty step");
  const FieldPtr& field = h[0][0].field();
  const std::size_t d = h[0].size();
  const std::size_t t = h.size();
  for (const auto& v : h)
    if (v.size() != d) throw Error(ErrorKind::DimensionMismatch, "steps of different dimension");

  const TranslationPolynomial one = TranslationPolynomial::identity(field, d);
  std::vector<FieldVector> mh;
  for (std::size_t i = 0; i < t; ++i) mh.push_back(scaled(h[i], AlgebraicScalar(field, mpq_class(m[i]))));

  // A_i = tau_{m_{i+1} h_{i+1} + ... + m_t h_t} (tau_{m_i h_i} - 1)
  std::vector<TranslationPolynomial> factors;
  for (std::size_t i = 0; i < t; ++i) {
    FieldVector tail = zero_vector(field, d);
    for (std::size_t j = i + 1; j < t; ++j) tail = tail + mh[j];
    factors.push_back(TranslationPolynomial::shift(tail) * (TranslationPolynomial::shift(mh[i]) - one));
  }

  TelescopeExpansion out{{}, TranslationPolynomial(field, d)};
  FieldVector total = zero_vector(field, d);
  for (const auto& v : mh) total = total + v;
  out.target = (TranslationPolynomial::shift(total) - one).pow(N);

  const unsigned need = static_cast<unsigned>((N + t - 1) / t);
  out.pigeonhole_holds = true;
  TranslationPolynomial sum(field, d);
  std::vector<unsigned> alpha(t, 0);
  // Enumerate compositions of N into t parts.
  auto visit = [&](auto&& self, std::size_t i, unsigned left) -> void {
    if (i + 1 == t) {
      alpha[i] = left;
      mpz_class coef = factorial(N);
      TranslationPolynomial op = one;
      unsigned biggest = 0;
      for (std::size_t k = 0; k < t; ++k) {
        coef /= factorial(alpha[k]);
        op = op * factors[k].pow(alpha[k]);
        biggest = std::max(biggest, alpha[k]);
      }
      op *= ExpCoefficient::rational(field, mpq_class(coef));
      if (biggest < need) out.pigeonhole_holds = false;
      sum += op;
      out.summands.push_back({alpha, std::move(op)});
      return;
    }
    for (unsigned a = 0; a <= left; ++a) {
      alpha[i] = a;
      self(self, i + 1, left - a);
    }
  };
  visit(visit, 0, N);
  out.identity_holds = (sum == out.target);
  return out;
}

std::size_t Grid::size() const {
  std::size_t n = 1;
  for (std::size_t c : count) n *= c;
  return n;
}

std::vector<std::size_t> Grid::index(std::size_t flat) const {
  std::vector<std::size_t> idx(dim());
  for (std::size_t i = dim(); i-- > 0;) {
    idx[i] = flat % count[i];
    flat /= count[i];
  }
  return idx;
}

std::size_t Grid::flat(const std::vector<std::size_t>& idx) const {
  std::size_t f = 0;
  for (std::size_t i = 0; i < dim(); ++i) f = f * count[i] + idx[i];
  return f;
}

std::vector<double> Grid::point(std::size_t flat_index) const {
  auto idx = index(flat_index);
  std::vector<double> x(dim());
  for (std::size_t i = 0; i < dim(); ++i) x[i] = origin[i] + static_cast<double>(idx[i]) * spacing[i];
  return x;
}

std::vector<std::optional<std::complex<double>>> op_apply_grid(const TranslationPolynomial& op, const Grid& grid,
                                                               const std::vector<std::complex<double>>& samples) {
  const std::size_t d = grid.dim();
  if (op.dim() != d || grid.spacing.size() != d || grid.count.size() != d)
    throw Error(ErrorKind::DimensionMismatch, "grid and operator dimensions differ");
  if (samples.size() != grid.size()) throw Error(ErrorKind::DimensionMismatch, "sample count differs from grid size");
  struct Step {
    std::vector<long> offset;
    std::complex<double> weight;
  };
  std::vector<Step> steps;
  for (const auto& [y, c] : op.terms()) {
    Step s{std::vector<long>(d), expcoef_eval(c)};
    for (std::size_t i = 0; i < d; ++i) {
      const double k = y[i].to_double() / grid.spacing[i];
      const double kr = std::round(k);
      if (std::abs(k - kr) > 1e-9 * std::max(1.0, std::abs(k)))
        throw Error(ErrorKind::ShiftNotOnGrid, "shift is not a multiple of the grid spacing");
      s.offset[i] = static_cast<long>(kr);
    }
    steps.push_back(std::move(s));
  }
  std::vector<std::optional<std::complex<double>>> out(grid.size());
  std::vector<std::size_t> shifted(d);
  for (std::size_t f = 0; f < grid.size(); ++f) {
    const auto idx = grid.index(f);
    std::complex<double> acc = 0.0;
    bool inside = true;
    for (const auto& s : steps) {
      for (std::size_t i = 0; i < d && inside; ++i) {
        const long j = static_cast<long>(idx[i]) + s.offset[i];
        if (j < 0 || j >= static_cast<long>(grid.count[i])) inside = false;
        shifted[i] = static_cast<std::size_t>(j);
      }
      if (!inside) break;
      acc += s.weight * samples[grid.flat(shifted)];
    }
    if (inside) out[f] = acc;
  }
  return out;
}

}  // namespace deltaclose
