#include "deltaclose/groups.hpp"

#include "deltaclose/error.hpp"
#include "deltaclose/linalg.hpp"

namespace deltaclose {

namespace {

FieldVector from_rational_coordinates(const FieldPtr& field, const std::vector<mpq_class>& x, std::size_t dim) {
  const std::size_t n = field->degree();
  FieldVector v;
  for (std::size_t i = 0; i < dim; ++i)
    v.emplace_back(field, std::vector<mpq_class>(x.begin() + i * n, x.begin() + (i + 1) * n));
  return v;
}

// Canonical basis of the lattice spanned by independent field vectors: row
// Hermite form of their rational coordinates over a common denominator.
std::vector<FieldVector> canonical_lattice(const FieldPtr& field, const std::vector<FieldVector>& gens,
                                           std::size_t dim) {
  if (gens.empty()) return {};
  Matrix<mpq_class> coords;
  mpz_class den = 1;
  for (const auto& g : gens) {
    coords.push_back(rational_coordinates(g));
    for (const auto& q : coords.back()) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.get_den_mpz_t());
  }
  IntMatrix ints;
  for (const auto& row : coords) {
    std::vector<mpz_class> r;
    for (const auto& q : row) r.push_back(mpz_class(q * den));
    ints.push_back(std::move(r));
  }
  HermiteForm hf = hermite_rows(ints);
  if (hf.rank != gens.size()) throw Error(ErrorKind::Internal, "lattice generators are dependent");
  std::vector<FieldVector> out;
  for (std::size_t i = 0; i < hf.rank; ++i) {
    std::vector<mpq_class> x;
    for (const auto& z : hf.h[i]) x.push_back(mpq_class(z, den));
    for (auto& q : x) q.canonicalize();
    out.push_back(from_rational_coordinates(field, x, dim));
  }
  return out;
}

}  // namespace

GroupClosure group_closure(const std::vector<FieldVector>& generators) {
  if (generators.empty()) throw Error(ErrorKind::EmptyInput, "no generators");
  const std::size_t d = generators[0].size();
  if (d == 0) throw Error(ErrorKind::DimensionMismatch, "generators must have dimension >= 1");
  const FieldPtr field = generators[0][0].field();
  for (const auto& g : generators) {
    if (g.size() != d) throw Error(ErrorKind::DimensionMismatch, "generators of different dimension");
    for (const auto& x : g) require_same_field(field, x.field());
  }
  const std::size_t t = generators.size();
  const std::size_t n = field->degree();

  GroupClosure c;
  c.field = field;
  c.dim = d;
  c.generators = generators;

  // Relations sum_k x_k h_k = 0 over the field.
  Matrix<AlgebraicScalar> m(d, std::vector<AlgebraicScalar>(t, AlgebraicScalar(field)));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < t; ++k) m[i][k] = generators[k][i];
  const Matrix<AlgebraicScalar> relations = kernel(m, t, AlgebraicScalar(field));

  // Smallest rational subspace W of Q^t whose real span contains them.
  Matrix<mpq_class> parts;
  for (const auto& rel : relations)
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<mpq_class> row;
      for (const auto& x : rel) row.push_back(x.coords()[j]);
      parts.push_back(std::move(row));
    }
  const Rref<mpq_class> w = rref(parts);
  c.relation_rank = w.rows.size();

  // V = M(W), kept in reduced echelon form.
  Matrix<AlgebraicScalar> images;
  for (const auto& row : w.rows) {
    FieldVector img = zero_vector(field, d);
    for (std::size_t k = 0; k < t; ++k)
      if (sgn(row[k]) != 0) img = img + scaled(generators[k], AlgebraicScalar(field, row[k]));
    images.push_back(std::move(img));
  }
  for (auto& row : rref(images).rows) c.v_basis.push_back(std::move(row));

  // Integer vectors outside W: Q spans W^perp, and the unimodular U with
  // U Q^T in Hermite form splits Z^t into a complement and Z^t cap W.
  Matrix<mpq_class> wperp = w.rows.empty() ? Matrix<mpq_class>{} : kernel(w.rows, t, mpq_class(0));
  if (w.rows.empty()) {
    for (std::size_t k = 0; k < t; ++k) {
      std::vector<mpq_class> e(t, mpq_class(0));
      e[k] = 1;
      wperp.push_back(std::move(e));
    }
  }
  std::vector<FieldVector> raw_lattice;
  if (!wperp.empty()) {
    const IntMatrix q = integer_rows(wperp);
    IntMatrix qt(t, std::vector<mpz_class>(q.size()));
    for (std::size_t i = 0; i < q.size(); ++i)
      for (std::size_t k = 0; k < t; ++k) qt[k][i] = q[i][k];
    const HermiteForm hf = hermite_rows(qt);
    for (std::size_t i = 0; i < hf.rank; ++i) {
      FieldVector img = zero_vector(field, d);
      for (std::size_t k = 0; k < t; ++k)
        if (hf.u[i][k] != 0) img = img + scaled(generators[k], AlgebraicScalar(field, mpq_class(hf.u[i][k])));
      raw_lattice.push_back(img - orthogonal_projection(c.v_basis, img));
    }
  }
  {
    Matrix<AlgebraicScalar> check(raw_lattice.begin(), raw_lattice.end());
    if (rank(check) != raw_lattice.size())
      throw Error(ErrorKind::Internal, "projected lattice generators are not independent");
  }
  c.lambda_basis = canonical_lattice(field, raw_lattice, d);
  c.dense = c.v_basis.size() == d && c.lambda_basis.empty();

  // Decompose every generator and verify the integer coordinates.
  for (const auto& g : generators) {
    FieldVector v = orthogonal_projection(c.v_basis, g);
    FieldVector rest = g - v;
    std::vector<mpz_class> coords;
    if (!c.lambda_basis.empty()) {
      auto sol = coordinates_in(c.lambda_basis, rest);
      if (!sol) throw Error(ErrorKind::Internal, "generator is outside V + Lambda");
      for (const auto& x : *sol) {
        if (!x.is_rational() || x.rational_value().get_den() != 1)
          throw Error(ErrorKind::Internal, "generator has non-integral lattice coordinates");
        coords.push_back(x.rational_value().get_num());
      }
    } else if (!is_zero(rest)) {
      throw Error(ErrorKind::Internal, "generator is outside V");
    }
    c.v_components.push_back(std::move(v));
    c.lambda_coords.push_back(std::move(coords));
  }
  return c;
}

AlgebraicScalar HyperplaneFrame::s(const FieldVector& z) const {
  if (z.size() != dim) throw Error(ErrorKind::DimensionMismatch, "point dimension differs from frame");
  return dot(z, w) / dot(w, w);
}

namespace {

void finish_frame(HyperplaneFrame& f, const GroupClosure& c) {
  f.field = c.field;
  f.dim = c.dim;
  f.generators = c.generators;
  if (f.r.sign() <= 0) throw Error(ErrorKind::Internal, "frame step is not positive");
  for (const auto& h : c.generators) {
    AlgebraicScalar ratio = f.s(h) / f.r;
    if (!ratio.is_rational() || ratio.rational_value().get_den() != 1)
      throw Error(ErrorKind::NonIntegralRatio, "s(h_k) is not an integer multiple of r");
    f.p.push_back(ratio.rational_value().get_num());
  }
}

}  // namespace

HyperplaneFrame frame_build(const GroupClosure& c) {
  if (c.dense) throw Error(ErrorKind::DenseGroup, "a dense group admits no hyperplane frame");
  const FieldPtr& field = c.field;
  std::vector<FieldVector> span = c.v_basis;
  span.insert(span.end(), c.lambda_basis.begin(), c.lambda_basis.end());
  std::vector<FieldVector> complement = orthogonal_complement(field, span, c.dim);

  std::vector<FieldVector> vt = c.v_basis;
  FieldVector dropped;
  if (!c.lambda_basis.empty()) {
    vt.insert(vt.end(), c.lambda_basis.begin(), c.lambda_basis.end() - 1);
    vt.insert(vt.end(), complement.begin(), complement.end());
    dropped = c.lambda_basis.back();
  } else {
    vt.insert(vt.end(), complement.begin(), complement.end() - 1);
    dropped = complement.back();
  }
  HyperplaneFrame f;
  f.w = dropped - orthogonal_projection(vt, dropped);
  if (is_zero(f.w)) throw Error(ErrorKind::Internal, "frame normal vanished");
  Matrix<AlgebraicScalar> vt_rows(vt.begin(), vt.end());
  for (auto& row : rref(vt_rows).rows) f.vt_basis.push_back(std::move(row));
  if (f.vt_basis.size() + 1 != c.dim) throw Error(ErrorKind::Internal, "frame hyperplane has wrong dimension");
  f.r = AlgebraicScalar(field, mpq_class(1));
  finish_frame(f, c);
  return f;
}

HyperplaneFrame frame_build(const GroupClosure& c, const std::vector<FieldVector>& vt_basis) {
  if (c.dense) throw Error(ErrorKind::DenseGroup, "a dense group admits no hyperplane frame");
  const FieldPtr& field = c.field;
  for (const auto& v : vt_basis) {
    if (v.size() != c.dim) throw Error(ErrorKind::FrameInvalid, "hyperplane vector has wrong dimension");
    for (const auto& x : v) require_same_field(field, x.field());
  }
  Matrix<AlgebraicScalar> rows(vt_basis.begin(), vt_basis.end());
  Rref<AlgebraicScalar> r = rref(rows);
  if (r.rows.size() + 1 != c.dim) throw Error(ErrorKind::FrameInvalid, "hyperplane must have dimension d - 1");
  std::vector<FieldVector> vt(r.rows.begin(), r.rows.end());
  for (const auto& v : c.v_basis)
    if (!coordinates_in(vt, v)) throw Error(ErrorKind::FrameInvalid, "hyperplane does not contain V");

  HyperplaneFrame f;
  f.dim = c.dim;
  f.vt_basis = vt;
  f.w = orthogonal_complement(field, vt, c.dim).at(0);
  // s(Lambda) must be a discrete subgroup g Z of R: all values rational
  // multiples of one of them.
  std::optional<AlgebraicScalar> unit;
  mpq_class step = 0;
  for (const auto& lam : c.lambda_basis) {
    AlgebraicScalar v = f.s(lam);
    if (v.is_zero()) continue;
    if (!unit) unit = v;
    AlgebraicScalar ratio = v / *unit;
    if (!ratio.is_rational()) throw Error(ErrorKind::NonIntegralRatio, "hyperplane plus lattice is dense");
    mpq_class q = abs(ratio.rational_value());
    if (step == 0) {
      step = q;
    } else {
      // gcd of two rationals
      mpz_class num, den;
      mpz_gcd(num.get_mpz_t(), mpz_class(q.get_num() * step.get_den()).get_mpz_t(),
              mpz_class(step.get_num() * q.get_den()).get_mpz_t());
      den = q.get_den() * step.get_den();
      step = mpq_class(num, den);
      step.canonicalize();
    }
  }
  if (!unit) {
    f.r = AlgebraicScalar(field, mpq_class(1));
  } else {
    f.r = *unit * step;
    if (f.r.sign() < 0) f.r = -f.r;
  }
  finish_frame(f, c);
  return f;
}

FrameProjection frame_project(const HyperplaneFrame& frame, const FieldVector& z) {
  AlgebraicScalar s = frame.s(z);
  return {z - scaled(frame.w, s), s};
}

FrameProjectionF frame_project(const HyperplaneFrame& frame, const std::vector<double>& z) {
  if (z.size() != frame.dim) throw Error(ErrorKind::DimensionMismatch, "point dimension differs from frame");
  const std::vector<double> w = to_doubles(frame.w);
  double zw = 0.0, ww = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    zw += z[i] * w[i];
    ww += w[i] * w[i];
  }
  FrameProjectionF out;
  out.s = zw / ww;
  for (std::size_t i = 0; i < z.size(); ++i) out.along.push_back(z[i] - out.s * w[i]);
  return out;
}

}  // namespace deltaclose
