#include "deltaclose/subspace.hpp"

#include "deltaclose/error.hpp"

namespace deltaclose {

std::vector<ExpPolynomial> FunctionSubspace::basis() const {
  std::vector<ExpPolynomial> out;
  for (const auto& row : echelon_.rows()) out.push_back(from_sparse(field_, dim_, row));
  return out;
}

bool FunctionSubspace::contains(const ExpPolynomial& f) const {
  if (f.dim() != dim_) throw Error(ErrorKind::DimensionMismatch, "function dimension differs from space");
  return echelon_.contains(to_sparse(f));
}

bool FunctionSubspace::contains(const FunctionSubspace& other) const {
  for (const auto& row : other.echelon_.rows())
    if (!echelon_.contains(row)) return false;
  return true;
}

bool FunctionSubspace::insert(const ExpPolynomial& f) {
  if (f.dim() != dim_) throw Error(ErrorKind::DimensionMismatch, "function dimension differs from space");
  require_same_field(field_, f.field());
  return echelon_.insert(to_sparse(f));
}

bool FunctionSubspace::invariant_under(const TranslationPolynomial& op) const {
  for (const auto& b : basis())
    if (!contains(op.apply(b))) return false;
  return true;
}

FunctionSubspace space_span(const FieldPtr& field, std::size_t dim, const std::vector<ExpPolynomial>& generators) {
  FunctionSubspace v(field, dim);
  for (const auto& g : generators) v.insert(g);
  return v;
}

FunctionSubspace space_one_step_hull(const FunctionSubspace& v, const TranslationPolynomial& op, unsigned n) {
  if (op.dim() != v.ambient_dim()) throw Error(ErrorKind::DimensionMismatch, "operator dimension differs from space");
  if (!v.invariant_under(op.pow(n))) throw NotInvariantError(0, "space is not invariant under L^n");
  FunctionSubspace out = v;
  std::vector<ExpPolynomial> layer = v.basis();
  for (unsigned k = 1; k <= n && !layer.empty(); ++k) {
    std::vector<ExpPolynomial> next;
    for (const auto& f : layer) {
      ExpPolynomial g = op.apply(f);
      if (g.is_zero()) continue;
      out.insert(g);
      next.push_back(std::move(g));
    }
    layer = std::move(next);
  }
  if (!out.invariant_under(op)) throw Error(ErrorKind::Internal, "one-step hull is not invariant");
  return out;
}

FunctionSubspace space_diamond(const FunctionSubspace& v, const std::vector<OperatorPower>& ops) {
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (ops[i].op.dim() != v.ambient_dim()) throw Error(ErrorKind::DimensionMismatch, "operator dimension differs");
    if (!v.invariant_under(ops[i].op.pow(ops[i].power)))
      throw NotInvariantError(i, "space is not invariant under L_" + std::to_string(i) + "^s");
  }
  for (std::size_t i = 0; i < ops.size(); ++i)
    for (std::size_t j = i + 1; j < ops.size(); ++j)
      if (ops[i].op * ops[j].op != ops[j].op * ops[i].op)
        throw Error(ErrorKind::Internal, "operators do not commute");
  FunctionSubspace cur = v;
  for (const auto& [op, s] : ops) {
    try {
      cur = space_one_step_hull(cur, op, s);
    } catch (const NotInvariantError&) {
      throw Error(ErrorKind::Internal, "intermediate space lost invariance");
    }
  }
  if (!cur.contains(v)) throw Error(ErrorKind::Internal, "closure does not contain the input space");
  for (const auto& [op, s] : ops)
    if (!cur.invariant_under(op)) throw Error(ErrorKind::Internal, "closure is not invariant");
  return cur;
}

SaturationResult space_saturate_oracle(const FunctionSubspace& v, const std::vector<TranslationPolynomial>& ops,
                                       std::size_t cap) {
  if (cap == 0) throw Error(ErrorKind::Malformed, "saturation cap must be positive");
  SaturationResult out{v};
  std::vector<ExpPolynomial> frontier = v.basis();
  while (true) {
    std::vector<ExpPolynomial> added;
    for (const auto& f : frontier)
      for (const auto& op : ops) {
        ExpPolynomial g = op.apply(f);
        if (out.space.insert(g)) added.push_back(std::move(g));
      }
    if (added.empty()) return out;
    if (out.iterations == cap) {
      out.capped = true;
      return out;
    }
    ++out.iterations;
    frontier = std::move(added);
  }
}

}  // namespace deltaclose
