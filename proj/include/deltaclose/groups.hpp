#pragma once

#include <optional>
#include <vector>

#include "deltaclose/number_field.hpp"

namespace deltaclose {

// Closure of h_1 Z + ... + h_t Z in R^d, split as V + Lambda with V a
// subspace and Lambda a lattice inside the orthogonal complement of V.
struct GroupClosure {
  FieldPtr field;
  std::size_t dim = 0;
  std::vector<FieldVector> generators;
  std::vector<FieldVector> v_basis;       // reduced row echelon form
  std::vector<FieldVector> lambda_basis;  // Hermite-reduced, orthogonal to V
  bool dense = false;

  // h_k = v_components[k] + sum_j lambda_coords[k][j] lambda_basis[j]
  std::vector<FieldVector> v_components;
  std::vector<std::vector<mpz_class>> lambda_coords;
  // Rank of the rational closure of the integer relations.
  std::size_t relation_rank = 0;
};

GroupClosure group_closure(const std::vector<FieldVector>& generators);
inline bool group_is_dense(const GroupClosure& c) { return c.dense; }

// Hyperplane Vt containing V with normal w (not unit length), the functional
// s(z) = <z, w> / <w, w>, and s(Lambda) = r Z with s(h_k) = p_k r.
struct HyperplaneFrame {
  FieldPtr field;
  std::size_t dim = 0;
  std::vector<FieldVector> vt_basis;
  FieldVector w;
  AlgebraicScalar r{NumberField::rationals()};
  std::vector<mpz_class> p;
  std::vector<FieldVector> generators;

  AlgebraicScalar s(const FieldVector& z) const;
  AlgebraicScalar w_norm2() const { return dot(w, w); }
};

// Vt = V + span(all lattice vectors but the last) + complement, r = 1.
HyperplaneFrame frame_build(const GroupClosure& c);
// Uses a caller supplied hyperplane; it must contain V and give a discrete
// image of the lattice (NonIntegralRatio otherwise).
HyperplaneFrame frame_build(const GroupClosure& c, const std::vector<FieldVector>& vt_basis);

struct FrameProjection {
  FieldVector along;  // P_Vt(z)
  AlgebraicScalar s;
};
FrameProjection frame_project(const HyperplaneFrame& frame, const FieldVector& z);

struct FrameProjectionF {
  std::vector<double> along;
  double s = 0.0;
};
FrameProjectionF frame_project(const HyperplaneFrame& frame, const std::vector<double>& z);

}  // namespace deltaclose
