#include "deltaclose/linalg.hpp"

namespace deltaclose {

std::vector<mpq_class> rational_coordinates(const FieldVector& v) {
  std::vector<mpq_class> out;
  for (const auto& x : v)
    for (const auto& c : x.coords()) out.push_back(c);
  return out;
}

std::optional<std::vector<AlgebraicScalar>> coordinates_in(const std::vector<FieldVector>& rows, const FieldVector& x) {
  const FieldPtr& field = x.at(0).field();
  const std::size_t k = rows.size();
  // Columns are the rows of the basis; the last column is x.
  Matrix<AlgebraicScalar> a(x.size(), std::vector<AlgebraicScalar>(k + 1, AlgebraicScalar(field)));
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < k; ++j) a[i][j] = rows[j].at(i);
    a[i][k] = x[i];
  }
  Rref<AlgebraicScalar> r = rref(a);
  std::vector<AlgebraicScalar> c(k, AlgebraicScalar(field));
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    if (r.pivots[i] == k) return std::nullopt;
    c[r.pivots[i]] = r.rows[i][k];
  }
  return c;
}

FieldVector orthogonal_projection(const std::vector<FieldVector>& basis, const FieldVector& x) {
  const FieldPtr& field = x.at(0).field();
  FieldVector out = zero_vector(field, x.size());
  if (basis.empty()) return out;
  const std::size_t k = basis.size();
  // Gram system G c = B x.
  Matrix<AlgebraicScalar> a(k, std::vector<AlgebraicScalar>(k + 1, AlgebraicScalar(field)));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) a[i][j] = dot(basis[i], basis[j]);
    a[i][k] = dot(basis[i], x);
  }
  Rref<AlgebraicScalar> r = rref(a);
  if (r.rows.size() != k || r.pivots.back() == k) throw Error(ErrorKind::Internal, "projection basis is dependent");
  for (std::size_t i = 0; i < k; ++i) out = out + scaled(basis[i], r.rows[i][k]);
  return out;
}

std::vector<FieldVector> orthogonal_complement(const FieldPtr& field, const std::vector<FieldVector>& vectors,
                                               std::size_t dim) {
  Matrix<AlgebraicScalar> a(vectors.begin(), vectors.end());
  return kernel(a, dim, AlgebraicScalar(field));
}

IntMatrix integer_rows(const Matrix<mpq_class>& a) {
  IntMatrix out;
  for (const auto& row : a) {
    mpz_class l = 1;
    for (const auto& q : row) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t());
    std::vector<mpz_class> r;
    for (const auto& q : row) r.push_back(mpz_class(q.get_num() * (l / q.get_den())));
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

// rows (i, j) <- [[s, t], [-b/g, a/g]] (rows i, j) where g = s a + t b.
void combine(IntMatrix& m, std::size_t i, std::size_t j, const mpz_class& s, const mpz_class& t, const mpz_class& x,
             const mpz_class& y) {
  for (std::size_t c = 0; c < m[i].size(); ++c) {
    mpz_class a = m[i][c], b = m[j][c];
    m[i][c] = s * a + t * b;
    m[j][c] = x * a + y * b;
  }
}

}  // namespace

HermiteForm hermite_rows(const IntMatrix& a) {
  HermiteForm out;
  out.h = a;
  const std::size_t m = a.size();
  out.u.assign(m, std::vector<mpz_class>(m, 0));
  for (std::size_t i = 0; i < m; ++i) out.u[i][i] = 1;
  if (m == 0) return out;
  const std::size_t n = a[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < m; ++c) {
    for (std::size_t i = r + 1; i < m; ++i) {
      if (out.h[i][c] == 0) continue;
      mpz_class g, s, t;
      mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), out.h[r][c].get_mpz_t(), out.h[i][c].get_mpz_t());
      const mpz_class x = -out.h[i][c] / g, y = out.h[r][c] / g;
      combine(out.h, r, i, s, t, x, y);
      combine(out.u, r, i, s, t, x, y);
    }
    if (out.h[r][c] == 0) continue;
    if (out.h[r][c] < 0) {
      for (auto& v : out.h[r]) v = -v;
      for (auto& v : out.u[r]) v = -v;
    }
    for (std::size_t i = 0; i < r; ++i) {
      mpz_class q;
      mpz_fdiv_q(q.get_mpz_t(), out.h[i][c].get_mpz_t(), out.h[r][c].get_mpz_t());
      if (q == 0) continue;
      for (std::size_t k = 0; k < n; ++k) out.h[i][k] -= q * out.h[r][k];
      for (std::size_t k = 0; k < m; ++k) out.u[i][k] -= q * out.u[r][k];
    }
    ++r;
  }
  out.rank = r;
  return out;
}

}  // namespace deltaclose
