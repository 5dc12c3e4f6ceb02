#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "deltaclose/construct.hpp"
#include "deltaclose/groups.hpp"
#include "deltaclose/subspace.hpp"

namespace deltaclose {

// Delta_{h_k}^{m_k} f = g_k, k = 1..t.
struct DifferenceSystem {
  FieldPtr field;
  std::size_t dim = 0;
  std::vector<FieldVector> steps;
  std::vector<unsigned> orders;
  std::vector<ExpPolynomial> rhs;
};

struct AnsatzEntry {
  ComplexVector lambda;
  int degree_bound = 0;
};

// Frequencies of the right-hand sides together with 0, each with a bound on
// the total degree of the solution there. Throws NotDense.
std::vector<AnsatzEntry> solver_ansatz(const DifferenceSystem& sys);

struct SolutionBundle {
  // Delta_{h_k}^{m_k} particular = denominator * g_k for every k. The
  // denominator is 1 unless the solution needs inverses of e^{lambda.h} - 1.
  ExpPolynomial particular;
  ExpCoefficient denominator;
  std::vector<ExpPolynomial> kernel_basis;
  std::vector<AnsatzEntry> ansatz;
  int kernel_degree_cap = 0;
};

// Throws NotDense or Inconsistent.
SolutionBundle solver_solve(const DifferenceSystem& sys);

// Polynomials of degree <= cap killed by every Delta_{h_k}^{m_k}; with no
// cap, the smallest cap that captures the whole kernel. The steps need only
// span R^d (NotDense otherwise).
std::vector<ExpPolynomial> solver_kernel(const std::vector<FieldVector>& steps, const std::vector<unsigned>& orders,
                                         std::optional<int> cap = std::nullopt);
// Smallest D with no homogeneous degree-D polynomial killed by every
// (h_k . grad)^{m_k}; the kernel has degree < D.
int kernel_degree_bound(const std::vector<FieldVector>& steps, const std::vector<unsigned>& orders);

struct CosetGrid {
  double half_width = 1.0;  // sample V coordinates in [-w, w]^k
  std::size_t points = 21;  // per axis; the held-out grid is offset by half a step
};

struct CosetSlice {
  FieldVector lambda;
  // e_lambda(t) = sum_j coeffs[j] candidates[j](t) in coordinates t of V
  // (x = sum_i t_i v_i); for V = {0} candidates are constants of one dummy
  // variable.
  std::vector<ExpPolynomial> candidates;
  std::vector<std::complex<double>> coeffs;
  double fit_residual = 0.0;
  double heldout_residual = 0.0;
  std::size_t rank = 0;
  double condition = 1.0;

  std::complex<double> operator()(std::span<const double> t) const;
};

struct CosetFitReport {
  std::vector<FieldVector> v_basis;
  // Directions completing density in the orthogonal complement of V: each
  // vector of an orthogonal field basis of it, times 1 and times theta.
  std::vector<FieldVector> hstar;
  std::vector<ExpPolynomial> closed_space;  // diamond closure of H
  std::vector<CosetSlice> slices;
};

// Fits f(x + lambda) on V within the closure of H plus polynomials in V.
// Throws DenseGroup, PreconditionNotInvariant, IllConditionedFit.
CosetFitReport coset_fit(const EvaluableFunction& f, const GroupClosure& closure, const std::vector<FieldVector>& steps,
                         const std::vector<unsigned>& orders, const FunctionSubspace& h,
                         const std::vector<FieldVector>& lambdas, const CosetGrid& grid = {});

}  // namespace deltaclose
