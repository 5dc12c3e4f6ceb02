#include "deltaclose/number_field.hpp"

#include <cmath>

#include "deltaclose/error.hpp"

namespace deltaclose {

namespace {

struct QInterval {
  mpq_class lo, hi;
};

QInterval mul(const QInterval& a, const QInterval& b) {
  mpq_class p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  QInterval r{p[0], p[0]};
  for (const auto& x : p) {
    if (x < r.lo) r.lo = x;
    if (x > r.hi) r.hi = x;
  }
  return r;
}

}  // namespace

FieldPtr NumberField::make(std::vector<mpq_class> minpoly, mpq_class lo, mpq_class hi) {
  QPoly p(std::move(minpoly));
  if (p.degree() < 1) throw Error(ErrorKind::Malformed, "minimal polynomial must have degree >= 1");
  if (p.leading() != 1) throw Error(ErrorKind::Malformed, "minimal polynomial must be monic");
  if (QPoly::gcd(p, p.derivative()).degree() != 0)
    throw Error(ErrorKind::NotSquareFree, "minimal polynomial shares a factor with its derivative");
  if (lo > hi) std::swap(lo, hi);
  int slo = sgn(p.eval(lo)), shi = sgn(p.eval(hi));
  if (slo == 0 || shi == 0 || slo == shi)
    throw Error(ErrorKind::NoSignChange, "isolating interval does not bracket a root");
  if (p.sturm_count(lo, hi) != 1)
    throw Error(ErrorKind::Malformed, "isolating interval contains more than one root");

  std::shared_ptr<NumberField> f(new NumberField());
  f->minpoly_ = p;
  f->degree_ = static_cast<std::size_t>(p.degree());
  f->lo0_ = lo;
  f->hi0_ = hi;
  f->lo_ = lo;
  f->hi_ = hi;
  f->sign_lo_ = slo;

  const std::size_t n = f->degree_;
  if (n >= 2) {
    // theta^n = -(p_0 + p_1 theta + ... + p_{n-1} theta^{n-1})
    std::vector<mpq_class> row(n);
    for (std::size_t i = 0; i < n; ++i) row[i] = -p.coeff(i);
    f->reduction_.push_back(row);
    for (std::size_t j = 1; j + 1 < n; ++j) {
      const auto& prev = f->reduction_.back();
      std::vector<mpq_class> next(n, mpq_class(0));
      for (std::size_t i = 0; i + 1 < n; ++i) next[i + 1] = prev[i];
      const mpq_class top = prev[n - 1];
      for (std::size_t i = 0; i < n; ++i) next[i] += top * row[i];
      f->reduction_.push_back(std::move(next));
    }
  }
  auto [a, b] = f->enclosure(64);
  f->theta_approx_ = (a + b) / 2;
  f->theta_double_ = f->theta_approx_.get_d();
  return f;
}

FieldPtr NumberField::rationals() {
  static const FieldPtr q = make({mpq_class(0), mpq_class(1)}, mpq_class(-1), mpq_class(1));
  return q;
}

std::pair<mpq_class, mpq_class> NumberField::enclosure(unsigned bits) const {
  std::lock_guard<std::mutex> lock(mutex_);
  mpq_class width_bound(1);
  mpz_class den(1);
  den <<= bits;
  width_bound = mpq_class(1, den);
  width_bound.canonicalize();
  while (hi_ - lo_ > width_bound) {
    mpq_class mid = (lo_ + hi_) / 2;
    int s = sgn(minpoly_.eval(mid));
    if (s == 0) {
      lo_ = hi_ = mid;
      break;
    }
    if (s == sign_lo_)
      lo_ = mid;
    else
      hi_ = mid;
  }
  return {lo_, hi_};
}

bool NumberField::same_as(const NumberField& other) const {
  if (this == &other) return true;
  if (!(minpoly_ == other.minpoly_)) return false;
  return theta_approx_ >= other.lo0_ && theta_approx_ <= other.hi0_ && other.theta_approx_ >= lo0_ &&
         other.theta_approx_ <= hi0_;
}

void require_same_field(const FieldPtr& a, const FieldPtr& b) {
  if (a.get() == b.get()) return;
  if (!a || !b || !a->same_as(*b)) throw Error(ErrorKind::FieldMismatch, "values live in different number fields");
}

AlgebraicScalar::AlgebraicScalar(FieldPtr field) : field_(std::move(field)) {
  if (!field_) throw Error(ErrorKind::Internal, "null field");
  coords_.assign(field_->degree(), mpq_class(0));
}

AlgebraicScalar::AlgebraicScalar(FieldPtr field, const mpq_class& value) : AlgebraicScalar(std::move(field)) {
  coords_[0] = value;
}

AlgebraicScalar::AlgebraicScalar(FieldPtr field, std::vector<mpq_class> coords) : field_(std::move(field)) {
  if (!field_) throw Error(ErrorKind::Internal, "null field");
  const std::size_t n = field_->degree();
  if (coords.size() <= n) {
    coords.resize(n, mpq_class(0));
    coords_ = std::move(coords);
    return;
  }
  QPoly q, r;
  QPoly::divmod(QPoly(std::move(coords)), field_->minimal_polynomial(), q, r);
  coords_.assign(n, mpq_class(0));
  for (std::size_t i = 0; i < n; ++i) coords_[i] = r.coeff(i);
}

AlgebraicScalar AlgebraicScalar::theta(FieldPtr field) {
  std::vector<mpq_class> c{mpq_class(0), mpq_class(1)};
  return AlgebraicScalar(std::move(field), std::move(c));
}

bool AlgebraicScalar::is_zero() const {
  for (const auto& c : coords_)
    if (c != 0) return false;
  return true;
}

bool AlgebraicScalar::is_rational() const {
  for (std::size_t i = 1; i < coords_.size(); ++i)
    if (coords_[i] != 0) return false;
  return true;
}

mpq_class AlgebraicScalar::value_at(const mpq_class& t) const {
  mpq_class acc = 0;
  for (auto it = coords_.rbegin(); it != coords_.rend(); ++it) acc = acc * t + *it;
  return acc;
}

int AlgebraicScalar::sign() const {
  if (is_rational()) return sgn(coords_[0]);
  for (unsigned bits = 32; bits <= 8192; bits *= 2) {
    auto [lo, hi] = field_->enclosure(bits);
    QInterval theta{lo, hi};
    QInterval acc{coords_.back(), coords_.back()};
    for (std::size_t k = coords_.size() - 1; k-- > 0;) {
      acc = mul(acc, theta);
      acc.lo += coords_[k];
      acc.hi += coords_[k];
    }
    if (acc.lo > 0) return 1;
    if (acc.hi < 0) return -1;
  }
  throw Error(ErrorKind::ZeroDivisor, "nonzero coordinates evaluate to zero; minimal polynomial is reducible");
}

mpz_class AlgebraicScalar::floor() const {
  if (is_rational()) {
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), coords_[0].get_num_mpz_t(), coords_[0].get_den_mpz_t());
    return r;
  }
  mpq_class approx = value_at(field_->theta_approx());
  mpz_class n;
  mpz_fdiv_q(n.get_mpz_t(), approx.get_num_mpz_t(), approx.get_den_mpz_t());
  auto shifted_sign = [this](const mpz_class& k) { return (*this - AlgebraicScalar(field_, mpq_class(k))).sign(); };
  while (shifted_sign(n) < 0) --n;
  while (shifted_sign(n + 1) >= 0) ++n;
  return n;
}

double AlgebraicScalar::to_double() const { return value_at(field_->theta_approx()).get_d(); }

AlgebraicScalar AlgebraicScalar::inverse() const {
  if (is_zero()) throw Error(ErrorKind::ZeroDivisor, "inverse of zero");
  if (is_rational()) return AlgebraicScalar(field_, mpq_class(1) / coords_[0]);
  QPoly s;
  QPoly g = QPoly::gcdex(QPoly(coords_), field_->minimal_polynomial(), s);
  if (g.degree() != 0)
    throw Error(ErrorKind::ZeroDivisor, "element shares a factor with the minimal polynomial");
  return AlgebraicScalar(field_, s.coeffs());
}

AlgebraicScalar AlgebraicScalar::operator-() const {
  AlgebraicScalar r(*this);
  for (auto& c : r.coords_) c = -c;
  return r;
}

AlgebraicScalar& AlgebraicScalar::operator+=(const AlgebraicScalar& o) {
  require_same_field(field_, o.field_);
  for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += o.coords_[i];
  return *this;
}

AlgebraicScalar& AlgebraicScalar::operator-=(const AlgebraicScalar& o) {
  require_same_field(field_, o.field_);
  for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] -= o.coords_[i];
  return *this;
}

AlgebraicScalar& AlgebraicScalar::operator*=(const mpq_class& q) {
  for (auto& c : coords_) c *= q;
  return *this;
}

AlgebraicScalar& AlgebraicScalar::operator*=(const AlgebraicScalar& o) {
  require_same_field(field_, o.field_);
  const std::size_t n = coords_.size();
  if (o.is_rational()) return *this *= o.coords_[0];
  if (is_rational()) {
    mpq_class c = coords_[0];
    coords_ = o.coords_;
    return *this *= c;
  }
  std::vector<mpq_class> prod(2 * n - 1, mpq_class(0));
  for (std::size_t i = 0; i < n; ++i) {
    if (coords_[i] == 0) continue;
    for (std::size_t j = 0; j < n; ++j)
      if (o.coords_[j] != 0) prod[i + j] += coords_[i] * o.coords_[j];
  }
  const auto& table = field_->reduction_table();
  for (std::size_t i = 0; i < n; ++i) coords_[i] = prod[i];
  for (std::size_t k = n; k < prod.size(); ++k) {
    if (prod[k] == 0) continue;
    for (std::size_t i = 0; i < n; ++i) coords_[i] += prod[k] * table[k - n][i];
  }
  return *this;
}

bool operator==(const AlgebraicScalar& a, const AlgebraicScalar& b) {
  require_same_field(a.field_, b.field_);
  return a.coords_ == b.coords_;
}

int AlgebraicScalar::key_compare(const AlgebraicScalar& a, const AlgebraicScalar& b) {
  for (std::size_t i = 0; i < a.coords_.size() && i < b.coords_.size(); ++i) {
    int c = cmp(a.coords_[i], b.coords_[i]);
    if (c != 0) return c < 0 ? -1 : 1;
  }
  if (a.coords_.size() != b.coords_.size()) return a.coords_.size() < b.coords_.size() ? -1 : 1;
  return 0;
}

ComplexAlgebraic::ComplexAlgebraic(AlgebraicScalar re, AlgebraicScalar im) : re_(std::move(re)), im_(std::move(im)) {
  require_same_field(re_.field(), im_.field());
}

ComplexAlgebraic ComplexAlgebraic::inverse() const {
  if (is_zero()) throw Error(ErrorKind::ZeroDivisor, "inverse of zero");
  if (im_.is_zero()) return ComplexAlgebraic(re_.inverse());
  AlgebraicScalar n = (re_ * re_ + im_ * im_).inverse();
  return {re_ * n, -(im_ * n)};
}

ComplexAlgebraic& ComplexAlgebraic::operator+=(const ComplexAlgebraic& o) {
  re_ += o.re_;
  im_ += o.im_;
  return *this;
}

ComplexAlgebraic& ComplexAlgebraic::operator-=(const ComplexAlgebraic& o) {
  re_ -= o.re_;
  im_ -= o.im_;
  return *this;
}

ComplexAlgebraic& ComplexAlgebraic::operator*=(const ComplexAlgebraic& o) {
  if (o.im_.is_zero()) return *this *= o.re_;
  if (im_.is_zero()) {
    AlgebraicScalar r = re_;
    re_ = o.re_ * r;
    im_ = o.im_ * r;
    return *this;
  }
  AlgebraicScalar re = re_ * o.re_ - im_ * o.im_;
  AlgebraicScalar im = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

ComplexAlgebraic& ComplexAlgebraic::operator*=(const AlgebraicScalar& s) {
  re_ *= s;
  if (!im_.is_zero()) im_ *= s;
  return *this;
}

int ComplexAlgebraic::key_compare(const ComplexAlgebraic& a, const ComplexAlgebraic& b) {
  int c = AlgebraicScalar::key_compare(a.re_, b.re_);
  return c != 0 ? c : AlgebraicScalar::key_compare(a.im_, b.im_);
}

FieldVector zero_vector(const FieldPtr& field, std::size_t dim) { return FieldVector(dim, AlgebraicScalar(field)); }

AlgebraicScalar dot(const FieldVector& a, const FieldVector& b) {
  if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "dot product of vectors of different length");
  if (a.empty()) throw Error(ErrorKind::DimensionMismatch, "dot product of empty vectors");
  AlgebraicScalar acc(a[0].field());
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

ComplexAlgebraic dot(const ComplexVector& a, const FieldVector& b) {
  if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "dot product of vectors of different length");
  if (a.empty()) throw Error(ErrorKind::DimensionMismatch, "dot product of empty vectors");
  ComplexAlgebraic acc(a[0].field());
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

FieldVector operator+(const FieldVector& a, const FieldVector& b) {
  if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "vector sum of different lengths");
  FieldVector r(a);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += b[i];
  return r;
}

FieldVector operator-(const FieldVector& a, const FieldVector& b) {
  if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "vector difference of different lengths");
  FieldVector r(a);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] -= b[i];
  return r;
}

FieldVector scaled(const FieldVector& a, const AlgebraicScalar& s) {
  FieldVector r(a);
  for (auto& x : r) x *= s;
  return r;
}

bool is_zero(const FieldVector& v) {
  for (const auto& x : v)
    if (!x.is_zero()) return false;
  return true;
}

std::vector<double> to_doubles(const FieldVector& v) {
  std::vector<double> r;
  r.reserve(v.size());
  for (const auto& x : v) r.push_back(x.to_double());
  return r;
}

}  // namespace deltaclose
