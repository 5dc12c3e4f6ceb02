#pragma once

#include <string>

#include "deltaclose/construct.hpp"
#include "deltaclose/solver.hpp"
#include "json.hpp"

namespace deltaclose::io {

using json = nlohmann::json;

// Scalars are strings in theta, written t: "3", "-1/4", "t", "1/2-3*t^2".
// Plain JSON integers and {"coords": [...]} (power basis) are accepted on input.
AlgebraicScalar parse_scalar(const FieldPtr& field, std::string_view text);
std::string format_scalar(const AlgebraicScalar& x);

// {"minpoly": [constant term first], "interval": [lo, hi]}, or the
// shorthands "Q" and "sqrt:N".
FieldPtr field_from_json(const json& j);
json to_json(const FieldPtr& field);

AlgebraicScalar scalar_from_json(const FieldPtr& field, const json& j);
json to_json(const AlgebraicScalar& x);
// [re, im] or a real scalar.
ComplexAlgebraic complex_from_json(const FieldPtr& field, const json& j);
json to_json(const ComplexAlgebraic& z);
// Arrays of scalars; a bare scalar is a vector of dimension 1, and vectors of
// dimension 1 are written that way.
FieldVector vector_from_json(const FieldPtr& field, const json& j);
json to_json(const FieldVector& v);
std::vector<FieldVector> vectors_from_json(const FieldPtr& field, const json& j);
json to_json(const std::vector<FieldVector>& vs);
ComplexVector complex_vector_from_json(const FieldPtr& field, const json& j);
json to_json(const ComplexVector& v);

// [{"exp": complex, "coeff": complex}, ...], or a complex shorthand for a
// constant.
ExpCoefficient coefficient_from_json(const FieldPtr& field, const json& j);
json to_json(const ExpCoefficient& c);

// {"dim": d, "terms": [{"lambda": [...], "poly": [{"alpha": [...], "coeff": ...}]}]}
ExpPolynomial exppoly_from_json(const FieldPtr& field, const json& j);
json to_json(const ExpPolynomial& f);

// {"dim": d, "terms": [{"shift": vector, "coeff": ...}]}, or an operator
// phrase such as "delta h=1,t m=2" or "shift y=0,1".
TranslationPolynomial operator_from_json(const FieldPtr& field, std::size_t dim, const json& j);
TranslationPolynomial parse_operator(const FieldPtr& field, std::string_view text);
json to_json(const TranslationPolynomial& op);

// {"dim": d, "basis": [exppoly, ...]}
FunctionSubspace space_from_json(const FieldPtr& field, const json& j);
json to_json(const FunctionSubspace& v);

json to_json(const GroupClosure& c);
json to_json(const HyperplaneFrame& f);
HyperplaneFrame frame_from_json(const FieldPtr& field, const json& j);

// {"node": "exp_poly" | "triangle" | "antidifference" | "project" | "sum" |
//  "scale" | "coset", ...}
EvaluableFunction function_from_json(const FieldPtr& field, const json& j);
json to_json(const EvaluableFunction& f);

// {"dim": d, "steps": [{"h": vector, "m": k}], "rhs": [exppoly, ...]}
DifferenceSystem system_from_json(const FieldPtr& field, const json& j);
json to_json(const SolutionBundle& b);

}  // namespace deltaclose::io
