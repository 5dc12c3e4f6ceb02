#include "deltaclose/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "deltaclose/io.hpp"
#include "deltaclose/rational.hpp"

namespace deltaclose {

namespace {

using io::json;

const char* kExactPass = "exact-pass";
const char* kExactFail = "exact-fail";

const char* exact(bool ok) { return ok ? kExactPass : kExactFail; }

json numeric_certificate(double value, double tolerance) {
  return {{"status", value <= tolerance ? "pass" : "fail"}, {"value", value}, {"tolerance", tolerance}};
}

bool certificates_pass(const json& certs) {
  for (const auto& [key, c] : certs.items()) {
    if (c.is_string() && c.get<std::string>() == kExactFail) return false;
    if (c.is_object() && c.contains("status") && c.at("status") == "fail") return false;
  }
  return true;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Inconsistent:
      return kExitInconsistent;
    case ErrorKind::NotDense:
    case ErrorKind::DenseGroup:
      return kExitNotDense;
    case ErrorKind::PreconditionNotInvariant:
      return kExitNotInvariant;
    case ErrorKind::IllConditionedFit:
      return kExitVerificationFailed;
    case ErrorKind::Internal:
      return kExitInternal;
    default:
      return kExitMalformed;
  }
}

struct Options {
  std::string field = "Q";
  std::string manifest;
  double atol = 1e-12;
  double rtol = 1e-9;
  std::uint64_t seed = 0;
  std::string out;
  std::string grid;
};

class Context {
 public:
  explicit Context(const Options& o) : opt_(o) {
    if (!o.manifest.empty()) {
      manifest_ = read_document(o.manifest);
      if (!manifest_.is_object() || !manifest_.contains("objects") || !manifest_.at("objects").is_object())
        throw Error(ErrorKind::Malformed, "a manifest needs an \"objects\" map");
    }
    if (manifest_.is_object() && manifest_.contains("field") && o.field == "Q")
      field_ = io::field_from_json(manifest_.at("field"));
    else
      field_ = io::field_from_json(o.field[0] == '{' || std::filesystem::exists(o.field) ? read_document(o.field)
                                                                                       : json(o.field));
  }

  const FieldPtr& field() const { return field_; }
  const Options& options() const { return opt_; }

  // Inline JSON, a file path, or @id from the manifest.
  json load(const std::string& arg) const {
    if (!arg.empty() && arg[0] == '@') {
      if (!manifest_.is_object()) throw Error(ErrorKind::Malformed, "\"" + arg + "\" needs --manifest");
      const auto& objs = manifest_.at("objects");
      if (!objs.contains(arg.substr(1))) throw Error(ErrorKind::Malformed, "unknown manifest id \"" + arg + "\"");
      return objs.at(arg.substr(1));
    }
    return read_document(arg);
  }

 private:
  static json read_document(const std::string& arg) {
    std::string text = arg;
    if (std::filesystem::exists(arg)) {
      std::ifstream in(arg);
      std::stringstream ss;
      ss << in.rdbuf();
      text = ss.str();
    }
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      const auto first = text.find_first_not_of(" \t\r\n");
      if (first != std::string::npos && (text[first] == '{' || text[first] == '['))
        throw Error(ErrorKind::Malformed, std::string("invalid JSON: ") + e.what());
      // bare words such as 1/2 or delta phrases
      return json(arg);
    }
  }

  Options opt_;
  json manifest_;
  FieldPtr field_;
};

// A function document may be a tree or a report carrying one.
json function_document(const json& j) {
  if (j.is_object() && !j.contains("node") && j.contains("function")) return j.at("function");
  return j;
}

std::vector<FieldVector> generators_document(const Context& ctx, const json& j) {
  if (j.is_object()) {
    if (j.contains("closure")) return io::vectors_from_json(ctx.field(), j.at("closure").at("generators"));
    if (j.contains("generators")) return io::vectors_from_json(ctx.field(), j.at("generators"));
  }
  return io::vectors_from_json(ctx.field(), j);
}

struct Axis {
  double lo, hi;
  std::size_t n;
};

std::vector<Axis> parse_grid(const std::string& text, std::size_t dim, const Axis& fallback) {
  std::vector<Axis> axes;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ';')) {
    if (part.empty()) continue;
    Axis a{};
    char c1 = 0, c2 = 0;
    std::stringstream ps(part);
    if (!(ps >> a.lo >> c1 >> a.hi >> c2 >> a.n) || c1 != ',' || c2 != ',' || a.n == 0 || !(a.lo <= a.hi))
      throw Error(ErrorKind::Malformed, "grid axes are \"min,max,n\": \"" + part + "\"");
    axes.push_back(a);
  }
  if (axes.empty()) axes.push_back(fallback);
  if (axes.size() == 1) axes.resize(dim, axes[0]);
  if (axes.size() != dim) throw Error(ErrorKind::Malformed, "grid has " + std::to_string(axes.size()) + " axes, need " +
                                                                std::to_string(dim));
  return axes;
}

Grid make_grid(const std::vector<Axis>& axes) {
  Grid g;
  for (const auto& a : axes) {
    g.origin.push_back(a.lo);
    g.spacing.push_back(a.n > 1 ? (a.hi - a.lo) / static_cast<double>(a.n - 1) : 0.0);
    g.count.push_back(a.n);
  }
  return g;
}

json corner_json(const CornerWitness& c) {
  return {{"found", c.found}, {"point", c.point}, {"direction", c.direction}, {"gap", c.gap}, {"gaps", c.gaps}};
}

// --- commands --------------------------------------------------------------

json cmd_group_closure(const Context& ctx, const std::string& gens) {
  const auto g = generators_document(ctx, ctx.load(gens));
  const GroupClosure c = group_closure(g);
  bool decomposes = true;
  for (std::size_t k = 0; k < g.size(); ++k) {
    FieldVector sum = c.v_components[k];
    for (std::size_t j = 0; j < c.lambda_basis.size(); ++j)
      sum = sum + scaled(c.lambda_basis[j], AlgebraicScalar(ctx.field(), mpq_class(c.lambda_coords[k][j])));
    decomposes = decomposes && sum == g[k];
  }
  bool orthogonal = true;
  for (const auto& v : c.v_basis)
    for (const auto& l : c.lambda_basis) orthogonal = orthogonal && dot(v, l).is_zero();
  json certs{{"generator_decomposition", exact(decomposes)}, {"lattice_orthogonal_to_V", exact(orthogonal)}};
  return {{"closure", io::to_json(c)}, {"certificates", certs}};
}

json cmd_op_expand(const Context& ctx, const std::string& steps, const std::string& powers, unsigned n) {
  const auto h = io::vectors_from_json(ctx.field(), ctx.load(steps));
  const json pj = ctx.load(powers);
  std::vector<long> m;
  if (!pj.is_array()) throw Error(ErrorKind::Malformed, "powers must be an array of integers");
  for (const auto& x : pj) {
    if (!x.is_number_integer()) throw Error(ErrorKind::Malformed, "powers must be integers");
    m.push_back(x.get<long>());
  }
  const TelescopeExpansion e = op_telescope_expand(h, m, n);
  json summands = json::array();
  for (const auto& s : e.summands) summands.push_back({{"alpha", s.alpha}, {"op", io::to_json(s.op)}});
  json certs{{"identity", exact(e.identity_holds)}, {"pigeonhole", exact(e.pigeonhole_holds)}};
  return {{"target", io::to_json(e.target)}, {"summands", summands}, {"certificates", certs}};
}

json cmd_op_divide(const Context& ctx, const std::string& step, long p, unsigned n) {
  const FieldVector h = io::vector_from_json(ctx.field(), ctx.load(step));
  const TranslationPolynomial q = op_divisibility_factor(h, p, n);
  const FieldVector ph = scaled(h, AlgebraicScalar(ctx.field(), mpq_class(p)));
  const TranslationPolynomial lhs =
      (TranslationPolynomial::shift(ph) - TranslationPolynomial::identity(ctx.field(), h.size())).pow(n);
  json certs{{"divisibility", exact(q * op_delta(h, n) == lhs)}};
  return {{"quotient", io::to_json(q)}, {"certificates", certs}};
}

json cmd_space_diamond(const Context& ctx, const std::string& space, const std::string& ops_arg) {
  const FunctionSubspace v = io::space_from_json(ctx.field(), ctx.load(space));
  const json oj = ctx.load(ops_arg);
  if (!oj.is_array() || oj.empty()) throw Error(ErrorKind::Malformed, "ops must be a non-empty array");
  std::vector<OperatorPower> ops;
  std::vector<TranslationPolynomial> plain;
  for (const auto& o : oj) {
    const json& pw = o.at("power");
    if (!pw.is_number_unsigned()) throw Error(ErrorKind::Malformed, "power must be a non-negative integer");
    ops.push_back({io::operator_from_json(ctx.field(), v.ambient_dim(), o.at("op")), pw.get<unsigned>()});
    plain.push_back(ops.back().op);
  }
  const FunctionSubspace w = space_diamond(v, ops);
  bool invariant = true;
  for (const auto& op : plain) invariant = invariant && w.invariant_under(op);
  const SaturationResult oracle = space_saturate_oracle(v, plain, 64);
  json certs{{"invariant_under_each_operator", exact(invariant)},
             {"contains_input", exact(w.contains(v))},
             {"saturation_oracle_equal", exact(!oracle.capped && oracle.space == w)}};
  return {{"space", io::to_json(w)}, {"certificates", certs}};
}

std::vector<std::pair<FieldVector, unsigned>> steps_document(const Context& ctx, const json& j) {
  const json& a = j.is_object() && j.contains("steps") ? j.at("steps") : j;
  if (!a.is_array()) throw Error(ErrorKind::Malformed, "steps must be an array of {h, m}");
  std::vector<std::pair<FieldVector, unsigned>> out;
  for (const auto& s : a) {
    const json& m = s.at("m");
    if (!m.is_number_unsigned() || m.get<unsigned>() == 0) throw Error(ErrorKind::Malformed, "m must be positive");
    out.emplace_back(io::vector_from_json(ctx.field(), s.at("h")), m.get<unsigned>());
  }
  return out;
}

json cmd_solve(const Context& ctx, const std::string& system) {
  const DifferenceSystem s = io::system_from_json(ctx.field(), ctx.load(system));
  const SolutionBundle b = solver_solve(s);
  bool forward = true;
  for (std::size_t k = 0; k < s.steps.size(); ++k)
    forward = forward && ep_forward_difference(b.particular, s.steps[k], s.orders[k]) == s.rhs[k] * b.denominator;
  bool annihilated = true;
  for (const auto& p : b.kernel_basis)
    for (std::size_t k = 0; k < s.steps.size(); ++k)
      annihilated = annihilated && ep_forward_difference(p, s.steps[k], s.orders[k]).is_zero();
  json certs{{"forward_residual_zero", exact(forward)}, {"kernel_annihilated", exact(annihilated)}};
  return {{"solution", io::to_json(b)}, {"certificates", certs}};
}

json cmd_kernel(const Context& ctx, const std::string& steps, std::optional<int> cap) {
  std::vector<FieldVector> h;
  std::vector<unsigned> m;
  for (const auto& [hk, mk] : steps_document(ctx, ctx.load(steps))) {
    h.push_back(hk);
    m.push_back(mk);
  }
  const auto kb = solver_kernel(h, m, cap);
  bool annihilated = true;
  json basis = json::array();
  for (const auto& p : kb) {
    basis.push_back(io::to_json(p));
    for (std::size_t k = 0; k < h.size(); ++k)
      annihilated = annihilated && ep_forward_difference(p, h[k], m[k]).is_zero();
  }
  return {{"kernel_basis", basis},
          {"degree_cap", cap ? *cap : kernel_degree_bound(h, m) - 1},
          {"certificates", {{"kernel_annihilated", exact(annihilated)}}}};
}

// max |Delta_h^m f| on [lo, hi] at n points, with the function scale.
std::pair<double, double> periodic_residual(const EvaluableFunction& f, const AlgebraicScalar& h, unsigned m, double lo,
                                            double hi, std::size_t n) {
  const NumericOperator op(op_delta({h}, m));
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    worst = std::max(worst, std::abs(op(f, std::span<const double>(&x, 1))));
    scale = std::max(scale, std::abs(f({x})));
  }
  return {worst, scale};
}

json cmd_construct_triangle(const Context& ctx, const std::string& h_arg) {
  const AlgebraicScalar h = io::scalar_from_json(ctx.field(), ctx.load(h_arg));
  const EvaluableFunction f = make_triangle_wave(h);
  bool zeros = true;
  for (long k = -4; k <= 4; ++k) zeros = zeros && f.exact({h * mpq_class(k)}).is_zero();
  const double hd = h.to_double();
  const CornerWitness c = corner_witness(f, {{-1.5 * hd}, {1.5 * hd}});
  json certs{{"vanishes_on_lattice", exact(zeros)}, {"corner_witness", corner_json(c)}};
  return {{"function", io::to_json(f)}, {"certificates", certs}};
}

json cmd_construct_fm(const Context& ctx, unsigned m, const std::string& h_arg) {
  const AlgebraicScalar h = io::scalar_from_json(ctx.field(), ctx.load(h_arg));
  const EvaluableFunction f = make_fm(m, h);
  const auto [worst, scale] = periodic_residual(f, h, m, -20.0, 20.0, 10001);
  const double hd = h.to_double();
  const CornerWitness c = corner_witness(f, {{-1.5 * hd}, {1.5 * hd}});
  json certs{{"annihilated_by_delta_h_m", numeric_certificate(worst, ctx.options().atol + ctx.options().rtol * scale)},
             {"corner_witness", corner_json(c)}};
  return {{"function", io::to_json(f)}, {"m", m}, {"certificates", certs}};
}

json cmd_construct_prop7(const Context& ctx, const std::string& gens, const std::string& e_arg, unsigned m,
                         const std::string& vt_arg) {
  const GroupClosure c = group_closure(generators_document(ctx, ctx.load(gens)));
  const HyperplaneFrame fr =
      vt_arg.empty() ? frame_build(c) : frame_build(c, io::vectors_from_json(ctx.field(), ctx.load(vt_arg)));
  const ExpPolynomial e = io::exppoly_from_json(ctx.field(), ctx.load(e_arg));
  const Prop7Function p = make_prop7_phi(fr, e, m);
  const auto axes = parse_grid(ctx.options().grid, c.dim, {-1.0, 1.0, 21});
  Box window;
  for (const auto& a : axes) {
    window.lo.push_back(a.lo);
    window.hi.push_back(a.hi);
  }
  const std::size_t n = axes[0].n;
  for (const auto& a : axes)
    if (a.n != n) throw Error(ErrorKind::Malformed, "the membership grid needs the same count on every axis");
  const Prop7Certificate cert = prop7_certify(p, window, n, 1e-8);
  json certs{{"hull_invariant", exact(cert.hull_invariant)},
             {"shifts_reduce", exact(cert.shifts_reduce)},
             {"membership", numeric_certificate(cert.membership_residual, 1e-8)},
             {"corner_witness", corner_json(cert.corner)},
             {"not_exponential_polynomial", cert.corner.found ? "pass" : "fail"}};
  return {{"function", io::to_json(p.phi)},
          {"closure", io::to_json(c)},
          {"frame", io::to_json(fr)},
          {"H", io::to_json(p.h)},
          {"m", m},
          {"certificates", certs}};
}

json cmd_verify_grid(const Context& ctx, const std::string& fn, const std::string& op_arg, std::size_t random_points) {
  const EvaluableFunction f = io::function_from_json(ctx.field(), function_document(ctx.load(fn)));
  const TranslationPolynomial op = io::operator_from_json(ctx.field(), f.dim(), ctx.load(op_arg));
  const NumericOperator nop(op);
  const Axis fallback = f.dim() == 1 ? Axis{-20.0, 20.0, 10001} : Axis{-1.0, 1.0, 41};
  const auto axes = parse_grid(ctx.options().grid, f.dim(), fallback);
  const Grid grid = make_grid(axes);

  std::vector<std::vector<double>> points;
  for (std::size_t i = 0; i < grid.size(); ++i) points.push_back(grid.point(i));
  std::mt19937_64 rng(ctx.options().seed);
  for (std::size_t r = 0; r < random_points; ++r) {
    std::vector<double> x;
    for (const auto& a : axes) x.push_back(std::uniform_real_distribution<double>(a.lo, a.hi)(rng));
    points.push_back(std::move(x));
  }
  std::vector<std::complex<double>> values(points.size());
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    values[i] = nop(f, points[i]);
    worst = std::max(worst, std::abs(values[i]));
    scale = std::max(scale, std::abs(f(points[i])));
  }
  const double tol = ctx.options().atol + ctx.options().rtol * scale;
  json geometry = json::array();
  for (const auto& a : axes) geometry.push_back({{"min", a.lo}, {"max", a.hi}, {"n", a.n}});
  json report{{"points", points.size()},
              {"grid", geometry},
              {"random_points", random_points},
              {"seed", ctx.options().seed},
              {"operator", io::to_json(op)},
              {"max_abs_residual", worst},
              {"function_scale", scale},
              {"certificates", {{"residual_within_tolerance", numeric_certificate(worst, tol)}}}};
  if (!ctx.options().out.empty()) {
    std::ofstream csv(ctx.options().out);
    if (!csv) throw Error(ErrorKind::Malformed, "cannot write " + ctx.options().out);
    csv.precision(17);
    for (std::size_t i = 0; i < f.dim(); ++i) csv << "x" << i + 1 << ",";
    csv << "re,im\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
      for (double x : points[i]) csv << x << ",";
      csv << values[i].real() << "," << values[i].imag() << "\n";
    }
    json sidecar{{"csv", std::filesystem::path(ctx.options().out).filename().string()},
                 {"columns", f.dim() + 2},
                 {"grid", geometry},
                 {"random_points", random_points},
                 {"seed", ctx.options().seed},
                 {"operator", io::to_json(op)}};
    std::ofstream(ctx.options().out + ".json") << sidecar.dump(2) << "\n";
    report["csv"] = ctx.options().out;
  }
  return report;
}

json cmd_fit_cosets(const Context& ctx, const std::string& fn, const std::string& closure_arg,
                    const std::string& lambdas_arg, const std::string& space_arg, const std::string& orders_arg) {
  const EvaluableFunction f = io::function_from_json(ctx.field(), function_document(ctx.load(fn)));
  const GroupClosure c = group_closure(generators_document(ctx, ctx.load(closure_arg)));
  const auto lambdas = io::vectors_from_json(ctx.field(), ctx.load(lambdas_arg));
  json sj = ctx.load(space_arg);
  if (sj.is_object() && !sj.contains("basis") && sj.contains("H")) sj = sj.at("H");
  const FunctionSubspace h = io::space_from_json(ctx.field(), sj);
  std::vector<unsigned> orders(c.generators.size(), 1);
  if (!orders_arg.empty()) {
    const json oj = ctx.load(orders_arg);
    if (oj.is_number_unsigned()) {
      orders.assign(c.generators.size(), oj.get<unsigned>());
    } else {
      if (!oj.is_array() || oj.size() != orders.size())
        throw Error(ErrorKind::Malformed, "one order per generator is required");
      for (std::size_t k = 0; k < orders.size(); ++k) orders[k] = oj[k].get<unsigned>();
    }
  }
  CosetGrid grid;
  if (!ctx.options().grid.empty()) {
    const auto axes = parse_grid(ctx.options().grid, 1, {-1.0, 1.0, 21});
    if (axes[0].lo != -axes[0].hi) throw Error(ErrorKind::Malformed, "coset grids are symmetric: \"-w,w,n\"");
    grid = {axes[0].hi, axes[0].n};
  }
  const CosetFitReport r = coset_fit(f, c, c.generators, orders, h, lambdas, grid);

  json slices = json::array();
  double worst = 0.0;
  for (const auto& s : r.slices) {
    json cands = json::array(), coeffs = json::array();
    for (std::size_t j = 0; j < s.candidates.size(); ++j) {
      if (std::abs(s.coeffs[j]) == 0.0) continue;
      cands.push_back(io::to_json(s.candidates[j]));
      coeffs.push_back({s.coeffs[j].real(), s.coeffs[j].imag()});
    }
    slices.push_back({{"lambda", io::to_json(s.lambda)},
                      {"candidates", cands},
                      {"coefficients", coeffs},
                      {"fit_residual", s.fit_residual},
                      {"heldout_residual", s.heldout_residual},
                      {"rank", s.rank},
                      {"condition", s.condition}});
    worst = std::max(worst, s.heldout_residual);
  }
  json closed = json::array();
  for (const auto& b : r.closed_space) closed.push_back(io::to_json(b));
  const double tol = std::max(ctx.options().atol, 1e-8);
  return {{"V", io::to_json(r.v_basis)},
          {"hstar", io::to_json(r.hstar)},
          {"closed_space", closed},
          {"slices", slices},
          {"certificates", {{"heldout_residual", numeric_certificate(worst, tol)}}}};
}

}  // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact difference-operator algebra and verification reports", "deltaclose"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--field", opt.field, "Number field: Q, sqrt:N, or {\"minpoly\", \"interval\"}");
  app.add_option("--manifest", opt.manifest, "Manifest whose objects are referenced as @id");
  app.add_option("--tolerance-atol", opt.atol, "Absolute tolerance of numeric certificates");
  app.add_option("--tolerance-rtol", opt.rtol, "Relative tolerance of numeric certificates");
  app.add_option("--seed", opt.seed, "Seed for randomized sample points");
  app.add_option("--out", opt.out, "CSV output path (a JSON sidecar is written next to it)");
  app.add_option("--grid", opt.grid, "Sample grid \"min,max,n[;...]\"");
  app.fallthrough();

  std::function<json(const Context&)> action;
  auto sub = [&](CLI::App* parent, const char* name, const char* desc) {
    auto* s = parent->add_subcommand(name, desc);
    s->fallthrough();
    return s;
  };

  auto* group = sub(&app, "group", "Closure of finitely generated subgroups");
  group->require_subcommand(1);
  std::string gens;
  auto* closure = sub(group, "closure", "Decompose the closure as V + Lambda");
  closure->add_option("--generators", gens, "List of generator vectors")->required();
  closure->callback([&] { action = [&](const Context& c) { return cmd_group_closure(c, gens); }; });

  auto* op = sub(&app, "op", "Translation operator algebra");
  op->require_subcommand(1);
  std::string steps, powers, step;
  unsigned big_n = 1, n = 1;
  long p = 1;
  auto* expand = sub(op, "expand", "Telescoping expansion of (tau_{sum m_k h_k} - 1)^N");
  expand->add_option("--steps", steps, "Steps h_k")->required();
  expand->add_option("--powers", powers, "Integer multipliers m_k")->required();
  expand->add_option("--N,-N", big_n, "Power N")->required();
  expand->callback([&] { action = [&](const Context& c) { return cmd_op_expand(c, steps, powers, big_n); }; });
  auto* divide = sub(op, "divide", "Q with (tau_{ph} - 1)^n = Q (tau_h - 1)^n");
  divide->add_option("--step", step, "Step h")->required();
  divide->add_option("--p,-p", p, "Nonzero integer p")->required();
  divide->add_option("--n,-n", n, "Power n")->required();
  divide->callback([&] { action = [&](const Context& c) { return cmd_op_divide(c, step, p, n); }; });

  auto* space = sub(&app, "space", "Invariant subspaces");
  space->require_subcommand(1);
  std::string space_arg, ops_arg;
  auto* diamond = sub(space, "diamond", "Diamond closure of a space under operator powers");
  diamond->add_option("--space", space_arg, "Space {dim, basis}")->required();
  diamond->add_option("--ops", ops_arg, "List of {op, power}")->required();
  diamond->callback([&] { action = [&](const Context& c) { return cmd_space_diamond(c, space_arg, ops_arg); }; });

  std::string system;
  auto* solve = sub(&app, "solve", "Solve Delta_{h_k}^{m_k} f = g_k");
  solve->add_option("--system", system, "System {steps: [{h, m}], rhs}")->required();
  solve->callback([&] { action = [&](const Context& c) { return cmd_solve(c, system); }; });

  std::optional<int> cap;
  auto* kernel_cmd = sub(&app, "kernel", "Polynomials killed by every Delta_{h_k}^{m_k}");
  kernel_cmd->add_option("--steps", steps, "List of {h, m}")->required();
  kernel_cmd->add_option("--cap", cap, "Degree cap (default: whole kernel)");
  kernel_cmd->callback([&] { action = [&](const Context& c) { return cmd_kernel(c, steps, cap); }; });

  auto* construct = sub(&app, "construct", "Explicit functions");
  construct->require_subcommand(1);
  std::string h_arg = "1", e_arg, vt_arg;
  unsigned m = 1;
  auto* triangle = sub(construct, "triangle", "Triangle wave vanishing on hZ");
  triangle->add_option("--period", h_arg, "Period h (default 1)");
  triangle->callback([&] { action = [&](const Context& c) { return cmd_construct_triangle(c, h_arg); }; });
  auto* fm = sub(construct, "fm", "f_m, killed by Delta_h^m and not an exponential polynomial");
  fm->add_option("-m,--m", m, "Order m")->required();
  fm->add_option("--period", h_arg, "Period h (default 1)");
  fm->callback([&] { action = [&](const Context& c) { return cmd_construct_fm(c, m, h_arg); }; });
  auto* prop7 = sub(construct, "prop7", "Non-exponential-polynomial solution for a non-dense group");
  prop7->add_option("--generators", gens, "Generators of the step group")->required();
  prop7->add_option("--e", e_arg, "Exponential polynomial e")->required();
  prop7->add_option("-m,--m", m, "Order m")->required();
  prop7->add_option("--vt", vt_arg, "Override of the hyperplane basis");
  prop7->callback([&] { action = [&](const Context& c) { return cmd_construct_prop7(c, gens, e_arg, m, vt_arg); }; });

  auto* verify = sub(&app, "verify", "Numeric verification");
  verify->require_subcommand(1);
  std::string fn, op_text;
  std::size_t random_points = 0;
  auto* vgrid = sub(verify, "grid", "Apply an operator to a function on a grid");
  vgrid->add_option("--function", fn, "Function tree (or a construct report)")->required();
  vgrid->add_option("--op", op_text, "Operator, e.g. \"delta h=1 m=2\"")->required();
  vgrid->add_option("--random", random_points, "Extra uniformly random points drawn with --seed");
  vgrid->callback([&] { action = [&](const Context& c) { return cmd_verify_grid(c, fn, op_text, random_points); }; });

  auto* fit = sub(&app, "fit", "Least-squares fits");
  fit->require_subcommand(1);
  std::string closure_arg, lambdas_arg, orders_arg;
  auto* cosets = sub(fit, "cosets", "Fit f(x + lambda) on V for lattice points lambda");
  cosets->add_option("--function", fn, "Function tree (or a construct report)")->required();
  cosets->add_option("--closure", closure_arg, "Generators or a closure report")->required();
  cosets->add_option("--lambdas", lambdas_arg, "Lattice points")->required();
  cosets->add_option("--space", space_arg, "Space H (or a prop7 report)")->required();
  cosets->add_option("--orders", orders_arg, "Orders n_k (one per generator, or one for all)");
  cosets->callback([&] {
    action = [&](const Context& c) { return cmd_fit_cosets(c, fn, closure_arg, lambdas_arg, space_arg, orders_arg); };
  });

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "deltaclose: " << e.what() << "\n";
    out << json{{"error", {{"kind", "Malformed"}, {"message", e.what()}, {"exit_code", kExitMalformed}}}}.dump(2)
        << "\n";
    return kExitMalformed;
  }

  try {
    const Context ctx(opt);
    json report = action(ctx);
    report["version"] = 1;
    report["field"] = io::to_json(ctx.field());
    out << report.dump(2) << "\n";
    return certificates_pass(report.at("certificates")) ? kExitOk : kExitVerificationFailed;
  } catch (const Error& e) {
    const int code = exit_code_for(e.kind());
    json ej{{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}, {"exit_code", code}};
    if (const auto* ni = dynamic_cast<const NotInvariantError*>(&e)) ej["operator_index"] = ni->index();
    err << "deltaclose: " << e.what() << "\n";
    out << json{{"error", ej}}.dump(2) << "\n";
    return code;
  } catch (const json::exception& e) {
    err << "deltaclose: malformed JSON: " << e.what() << "\n";
    out << json{{"error", {{"kind", "Malformed"}, {"message", e.what()}, {"exit_code", kExitMalformed}}}}.dump(2)
        << "\n";
    return kExitMalformed;
  } catch (const std::exception& e) {
    err << "deltaclose: internal error: " << e.what() << "\n";
    out << json{{"error", {{"kind", "Internal"}, {"message", e.what()}, {"exit_code", kExitInternal}}}}.dump(2)
        << "\n";
    return kExitInternal;
  }
}

}  // namespace deltaclose
