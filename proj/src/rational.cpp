#include "deltaclose/rational.hpp"

#include <cctype>

#include "deltaclose/error.hpp"

namespace deltaclose {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotSquareFree: return "NotSquareFree";
    case ErrorKind::NoSignChange: return "NoSignChange";
    case ErrorKind::FieldMismatch: return "FieldMismatch";
    case ErrorKind::ZeroDivisor: return "ZeroDivisor";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::EmptyGeneratorList: return "EmptyGeneratorList";
    case ErrorKind::ShiftNotOnGrid: return "ShiftNotOnGrid";
    case ErrorKind::PreconditionNotInvariant: return "PreconditionNotInvariant";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::DenseGroup: return "DenseGroup";
    case ErrorKind::NonIntegralRatio: return "NonIntegralRatio";
    case ErrorKind::NonpositivePeriod: return "NonpositivePeriod";
    case ErrorKind::LatticeValuesNonzero: return "LatticeValuesNonzero";
    case ErrorKind::FrameInvalid: return "FrameInvalid";
    case ErrorKind::NotDense: return "NotDense";
    case ErrorKind::Inconsistent: return "Inconsistent";
    case ErrorKind::IllConditionedFit: return "IllConditionedFit";
    case ErrorKind::Malformed: return "Malformed";
    case ErrorKind::Internal: return "Internal";
  }
  return "Unknown";
}

mpq_class parse_rational(std::string_view text) {
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t start = 0;
  while (start < s.size() && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
  s = s.substr(start);
  if (s.empty()) throw Error(ErrorKind::Malformed, "empty rational");

  auto dot = s.find('.');
  if (dot != std::string::npos) {
    if (s.find('/') != std::string::npos) throw Error(ErrorKind::Malformed, "bad rational '" + s + "'");
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    std::size_t frac = s.size() - dot - 1;
    if (digits.empty() || digits == "-" || digits == "+")
      throw Error(ErrorKind::Malformed, "bad rational '" + s + "'");
    if (digits[0] == '+') digits.erase(0, 1);
    mpz_class num;
    if (num.set_str(digits, 10) != 0) throw Error(ErrorKind::Malformed, "bad rational '" + s + "'");
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac);
    mpq_class q(num, den);
    q.canonicalize();
    return q;
  }
  if (s[0] == '+') s.erase(0, 1);
  mpq_class q;
  if (q.set_str(s, 10) != 0) throw Error(ErrorKind::Malformed, "bad rational '" + s + "'");
  if (q.get_den() == 0) throw Error(ErrorKind::Malformed, "zero denominator in '" + s + "'");
  q.canonicalize();
  return q;
}

std::string format_rational(const mpq_class& q) {
  mpq_class c = q;
  c.canonicalize();
  return c.get_str(10);
}

mpq_class binomial(unsigned n, unsigned k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return mpq_class(r);
}

mpz_class factorial(unsigned n) {
  mpz_class r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}

QPoly::QPoly(std::vector<mpq_class> coeffs) : c_(std::move(coeffs)) { trim(); }

QPoly QPoly::monomial(const mpq_class& c, std::size_t power) {
  std::vector<mpq_class> v(power + 1, mpq_class(0));
  v[power] = c;
  return QPoly(std::move(v));
}

void QPoly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

mpq_class QPoly::eval(const mpq_class& x) const {
  mpq_class acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

QPoly QPoly::derivative() const {
  if (c_.size() <= 1) return {};
  std::vector<mpq_class> d(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<unsigned long>(i);
  return QPoly(std::move(d));
}

QPoly QPoly::monic() const {
  if (is_zero()) return {};
  std::vector<mpq_class> d(c_);
  mpq_class lc = leading();
  for (auto& x : d) x /= lc;
  return QPoly(std::move(d));
}

QPoly operator+(const QPoly& a, const QPoly& b) {
  std::vector<mpq_class> r(std::max(a.c_.size(), b.c_.size()), mpq_class(0));
  for (std::size_t i = 0; i < a.c_.size(); ++i) r[i] += a.c_[i];
  for (std::size_t i = 0; i < b.c_.size(); ++i) r[i] += b.c_[i];
  return QPoly(std::move(r));
}

QPoly operator-(const QPoly& a, const QPoly& b) {
  std::vector<mpq_class> r(std::max(a.c_.size(), b.c_.size()), mpq_class(0));
  for (std::size_t i = 0; i < a.c_.size(); ++i) r[i] += a.c_[i];
  for (std::size_t i = 0; i < b.c_.size(); ++i) r[i] -= b.c_[i];
  return QPoly(std::move(r));
}

QPoly operator*(const QPoly& a, const QPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<mpq_class> r(a.c_.size() + b.c_.size() - 1, mpq_class(0));
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
  return QPoly(std::move(r));
}

void QPoly::divmod(const QPoly& a, const QPoly& b, QPoly& q, QPoly& r) {
  if (b.is_zero()) throw Error(ErrorKind::ZeroDivisor, "polynomial division by zero");
  std::vector<mpq_class> rem = a.c_;
  long db = b.degree();
  std::vector<mpq_class> quo;
  if (a.degree() >= db) quo.assign(static_cast<std::size_t>(a.degree() - db + 1), mpq_class(0));
  for (long i = a.degree(); i >= db; --i) {
    mpq_class f = rem[static_cast<std::size_t>(i)] / b.leading();
    if (f == 0) continue;
    quo[static_cast<std::size_t>(i - db)] = f;
    for (long j = 0; j <= db; ++j) rem[static_cast<std::size_t>(i - db + j)] -= f * b.c_[static_cast<std::size_t>(j)];
  }
  q = QPoly(std::move(quo));
  r = QPoly(std::move(rem));
}

QPoly QPoly::gcd(QPoly a, QPoly b) {
  while (!b.is_zero()) {
    QPoly q, r;
    divmod(a, b, q, r);
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

QPoly QPoly::gcdex(const QPoly& a, const QPoly& b, QPoly& s) {
  // Invariant: r0 = s0*a (mod b), r1 = s1*a (mod b).
  QPoly r0 = a, r1 = b, s0 = QPoly({mpq_class(1)}), s1;
  while (!r1.is_zero()) {
    QPoly q, r;
    divmod(r0, r1, q, r);
    QPoly s2 = s0 - q * s1;
    r0 = std::move(r1);
    r1 = std::move(r);
    s0 = std::move(s1);
    s1 = std::move(s2);
  }
  if (r0.is_zero()) {
    s = {};
    return {};
  }
  mpq_class lc = r0.leading();
  std::vector<mpq_class> sc = s0.coeffs();
  for (auto& x : sc) x /= lc;
  s = QPoly(std::move(sc));
  return r0.monic();
}

namespace {
std::size_t sign_variations(const std::vector<QPoly>& seq, const mpq_class& x) {
  std::size_t changes = 0;
  int prev = 0;
  for (const auto& p : seq) {
    int s = ::sgn(p.eval(x));
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++changes;
    prev = s;
  }
  return changes;
}
}  // namespace

std::size_t QPoly::sturm_count(const mpq_class& lo, const mpq_class& hi) const {
  if (degree() < 1) return 0;
  std::vector<QPoly> seq{*this, derivative()};
  while (!seq.back().is_zero()) {
    QPoly q, r;
    divmod(seq[seq.size() - 2], seq.back(), q, r);
    if (r.is_zero()) break;
    std::vector<mpq_class> neg = r.coeffs();
    for (auto& x : neg) x = -x;
    seq.emplace_back(std::move(neg));
  }
  std::size_t vlo = sign_variations(seq, lo), vhi = sign_variations(seq, hi);
  return vlo > vhi ? vlo - vhi : 0;
}

}  // namespace deltaclose
