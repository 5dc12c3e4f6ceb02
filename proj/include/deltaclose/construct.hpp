#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "deltaclose/groups.hpp"
#include "deltaclose/subspace.hpp"

namespace deltaclose {

enum class NodeKind { ExpPoly, Triangle, AntiDifference, Project, Sum, Scale, Coset };

// Immutable combinator tree of functions R^d -> C. Every node evaluates in
// double precision and exactly at field points (values in the formal
// exponential ring).
class EvaluableFunction {
 public:
  struct Node;

  static EvaluableFunction exp_poly(const ExpPolynomial& f);
  static EvaluableFunction triangle(const AlgebraicScalar& h);
  // One application of the lattice antidifference with step h.
  static EvaluableFunction antidifference(const EvaluableFunction& child, const AlgebraicScalar& h);
  // z -> child(A z); rows are the child's coordinates.
  static EvaluableFunction project(const EvaluableFunction& child, const std::vector<FieldVector>& rows);
  static EvaluableFunction sum(const std::vector<EvaluableFunction>& terms);
  static EvaluableFunction scale(const ComplexAlgebraic& c, const EvaluableFunction& child);
  // z -> e(P_Vt z) + inner(s(z) / r * factor)
  static EvaluableFunction coset(const HyperplaneFrame& frame, const ExpPolynomial& e, const EvaluableFunction& inner,
                                 const AlgebraicScalar& factor);

  NodeKind kind() const;
  std::size_t dim() const;
  const FieldPtr& field() const;

  std::complex<double> operator()(std::span<const double> x) const;
  std::complex<double> operator()(std::initializer_list<double> x) const {
    return (*this)(std::span<const double>(x.begin(), x.size()));
  }
  ExpCoefficient exact(const FieldVector& x) const;

  // Node data, for serialization.
  const ExpPolynomial& poly() const;
  const AlgebraicScalar& step() const;
  const std::vector<EvaluableFunction>& children() const;
  const std::vector<FieldVector>& rows() const;
  const ComplexAlgebraic& factor() const;
  const HyperplaneFrame& frame() const;
  const AlgebraicScalar& coset_factor() const;

  // Values at y + j h for j in [lo, hi].
  std::vector<std::complex<double>> progression(double y, double h, long lo, long hi) const;

 private:
  explicit EvaluableFunction(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// Double precision image of a translation operator.
class NumericOperator {
 public:
  explicit NumericOperator(const TranslationPolynomial& op);
  // sum_y c_y f(x + y)
  std::complex<double> operator()(const EvaluableFunction& f, std::span<const double> x) const;

 private:
  std::vector<std::pair<std::vector<double>, std::complex<double>>> terms_;
};

EvaluableFunction make_triangle_wave(const AlgebraicScalar& h);
// Antidifference of g vanishing on hZ. g(hZ) = 0 is checked at k in
// [-50, 50], exactly where possible, else to 1e-10.
EvaluableFunction make_antidifference(const EvaluableFunction& g, const AlgebraicScalar& h);
// f_1 = triangle wave, f_m = antidifference of f_{m-1}.
EvaluableFunction make_fm(unsigned m, const AlgebraicScalar& h);

struct Prop7Function {
  EvaluableFunction phi;
  FunctionSubspace h;  // hull(e) composed with P_Vt
  HyperplaneFrame frame;
  ExpPolynomial e;
  unsigned m;
};

// phi(z) = e(P_Vt z) + f_m(s(z) / r) with f_m of unit period.
Prop7Function make_prop7_phi(const HyperplaneFrame& frame, const ExpPolynomial& e, unsigned m);

struct CornerWitness {
  bool found = false;
  std::vector<double> point;
  std::vector<double> direction;
  double gap = 0.0;
  std::vector<double> gaps;  // at each step size
};

struct Box {
  std::vector<double> lo, hi;
};

// Scans lines parallel to the given directions (default: the axes) for a
// point where one-sided slopes differ by more than 0.1 at every step size,
// with gaps stable within a factor 1.5. Returns the largest gap found.
CornerWitness corner_witness(const EvaluableFunction& f, const Box& window,
                             const std::vector<double>& steps = {1e-2, 1e-3, 1e-4},
                             std::vector<std::vector<double>> directions = {});

struct Prop7Certificate {
  bool hull_invariant = false;       // Delta_{h_k}(H) inside H, exact
  bool shifts_reduce = false;        // tau_{h_k} = tau_{P h_k} on H, exact
  double membership_residual = 0.0;  // max over k of the fit residual
  bool membership_ok = false;
  CornerWitness corner;
  bool holds() const { return hull_invariant && shifts_reduce && membership_ok && corner.found; }
};

// Samples Delta_{h_k}^m phi on an n^d grid over the window and fits it in H.
Prop7Certificate prop7_certify(const Prop7Function& p, const Box& window, std::size_t n, double tolerance = 1e-8);

}  // namespace deltaclose
