#include "deltaclose/io.hpp"

#include <cctype>

#include "deltaclose/rational.hpp"

namespace deltaclose::io {

namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorKind::Malformed, what); }

const json& member(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) malformed(std::string("missing \"") + key + "\"");
  return j.at(key);
}

const json& array_member(const json& j, const char* key) {
  const json& a = member(j, key);
  if (!a.is_array()) malformed(std::string("\"") + key + "\" must be an array");
  return a;
}

std::size_t size_member(const json& j, const char* key) {
  const json& v = member(j, key);
  if (!v.is_number_unsigned()) malformed(std::string("\"") + key + "\" must be a non-negative integer");
  return v.get<std::size_t>();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

json integer_json(const mpz_class& z) { return z.get_str(); }

}  // namespace

AlgebraicScalar parse_scalar(const FieldPtr& field, std::string_view text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) malformed("empty scalar");
  std::vector<mpq_class> coords(std::max<std::size_t>(field->degree(), 1), mpq_class(0));
  std::size_t i = 0;
  while (i < s.size()) {
    int sign = 1;
    if (s[i] == '+' || s[i] == '-') {
      sign = s[i] == '-' ? -1 : 1;
      ++i;
    } else if (i != 0) {
      malformed("bad scalar \"" + s + "\"");
    }
    std::size_t j = i;
    while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '/' || s[j] == '.')) ++j;
    mpq_class c = j > i ? parse_rational(std::string_view(s).substr(i, j - i)) : mpq_class(1);
    std::size_t power = 0;
    if (j < s.size() && (s[j] == '*' || s[j] == 't')) {
      if (s[j] == '*') {
        if (j == i) malformed("bad scalar \"" + s + "\"");
        ++j;
      }
      if (j >= s.size() || s[j] != 't') malformed("bad scalar \"" + s + "\"");
      ++j;
      power = 1;
      if (j < s.size() && s[j] == '^') {
        std::size_t k = ++j;
        while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
        if (k == j) malformed("bad exponent in \"" + s + "\"");
        power = std::stoul(s.substr(j, k - j));
        j = k;
      }
    } else if (j == i) {
      malformed("bad scalar \"" + s + "\"");
    }
    if (power >= coords.size()) coords.resize(power + 1, mpq_class(0));
    coords[power] += sign * c;
    i = j;
  }
  if (field->degree() <= 1) {
    for (std::size_t k = 1; k < coords.size(); ++k)
      if (coords[k] != 0) malformed("theta used in the rational field");
    return AlgebraicScalar(field, coords[0]);
  }
  return AlgebraicScalar(field, coords);
}

std::string format_scalar(const AlgebraicScalar& x) {
  std::string out;
  const auto& c = x.coords();
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (c[j] == 0) continue;
    std::string term;
    if (j == 0) {
      term = format_rational(c[j]);
    } else {
      const std::string mono = j == 1 ? "t" : "t^" + std::to_string(j);
      if (c[j] == 1) term = mono;
      else if (c[j] == -1) term = "-" + mono;
      else term = format_rational(c[j]) + "*" + mono;
    }
    if (!out.empty() && term[0] != '-') out += "+";
    out += term;
  }
  return out.empty() ? "0" : out;
}

FieldPtr field_from_json(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "Q") return NumberField::rationals();
    if (s.rfind("sqrt:", 0) == 0) {
      const mpq_class n = parse_rational(s.substr(5));
      if (n.get_den() != 1 || n < 2) malformed("sqrt:N needs an integer N >= 2");
      const mpz_class root = sqrt(n.get_num());
      if (root * root == n.get_num()) malformed("sqrt:N needs N not a perfect square");
      return NumberField::make({-n, mpq_class(0), mpq_class(1)}, mpq_class(0), n);
    }
    malformed("unknown field \"" + s + "\"");
  }
  const json& mp = array_member(j, "minpoly");
  const json& iv = array_member(j, "interval");
  if (iv.size() != 2) malformed("interval needs two endpoints");
  std::vector<mpq_class> coeffs;
  auto rational_of = [](const json& v) {
    if (v.is_number_integer()) return mpq_class(v.get<long>());
    if (v.is_string()) return parse_rational(v.get<std::string>());
    malformed("rational expected");
  };
  for (const auto& c : mp) coeffs.push_back(rational_of(c));
  const FieldPtr f = NumberField::make(coeffs, rational_of(iv[0]), rational_of(iv[1]));
  if (f->degree() == 1) return NumberField::rationals();
  return f;
}

json to_json(const FieldPtr& field) {
  if (field->degree() <= 1) return "Q";
  json mp = json::array();
  for (const auto& c : field->minimal_polynomial().coeffs()) mp.push_back(format_rational(c));
  const auto [lo, hi] = field->isolating_interval();
  return {{"minpoly", mp}, {"interval", {format_rational(lo), format_rational(hi)}}};
}

AlgebraicScalar scalar_from_json(const FieldPtr& field, const json& j) {
  if (j.is_string()) return parse_scalar(field, j.get<std::string>());
  if (j.is_number_integer()) return AlgebraicScalar(field, mpq_class(j.get<long>()));
  if (j.is_object() && j.contains("coords")) {
    std::vector<mpq_class> c;
    for (const auto& x : array_member(j, "coords")) {
      if (x.is_number_integer()) c.emplace_back(x.get<long>());
      else if (x.is_string()) c.push_back(parse_rational(x.get<std::string>()));
      else malformed("coordinates must be rationals");
    }
    if (c.empty()) malformed("empty coordinate list");
    return AlgebraicScalar(field, c);
  }
  malformed("scalar expected (string such as \"1/2+t\")");
}

json to_json(const AlgebraicScalar& x) { return format_scalar(x); }

ComplexAlgebraic complex_from_json(const FieldPtr& field, const json& j) {
  if (j.is_array()) {
    if (j.size() != 2) malformed("complex values are [re, im]");
    return {scalar_from_json(field, j[0]), scalar_from_json(field, j[1])};
  }
  return ComplexAlgebraic(scalar_from_json(field, j));
}

json to_json(const ComplexAlgebraic& z) {
  if (z.is_real()) return to_json(z.re());
  return json::array({to_json(z.re()), to_json(z.im())});
}

FieldVector vector_from_json(const FieldPtr& field, const json& j) {
  if (!j.is_array()) return {scalar_from_json(field, j)};
  FieldVector v;
  for (const auto& x : j) v.push_back(scalar_from_json(field, x));
  if (v.empty()) malformed("empty vector");
  return v;
}

json to_json(const FieldVector& v) {
  if (v.size() == 1) return to_json(v[0]);
  json a = json::array();
  for (const auto& x : v) a.push_back(to_json(x));
  return a;
}

std::vector<FieldVector> vectors_from_json(const FieldPtr& field, const json& j) {
  if (!j.is_array()) malformed("list of vectors expected");
  std::vector<FieldVector> out;
  for (const auto& v : j) out.push_back(vector_from_json(field, v));
  for (const auto& v : out)
    if (v.size() != out[0].size()) malformed("vectors of different dimensions");
  return out;
}

json to_json(const std::vector<FieldVector>& vs) {
  json a = json::array();
  for (const auto& v : vs) a.push_back(to_json(v));
  return a;
}

ComplexVector complex_vector_from_json(const FieldPtr& field, const json& j) {
  if (!j.is_array()) return {complex_from_json(field, j)};
  ComplexVector v;
  for (const auto& x : j) v.push_back(complex_from_json(field, x));
  return v;
}

json to_json(const ComplexVector& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(to_json(x));
  return a;
}

ExpCoefficient coefficient_from_json(const FieldPtr& field, const json& j) {
  if (j.is_array() && !j.empty() && j[0].is_object()) {
    std::vector<std::pair<ComplexAlgebraic, ComplexAlgebraic>> terms;
    for (const auto& t : j)
      terms.emplace_back(complex_from_json(field, member(t, "exp")), complex_from_json(field, member(t, "coeff")));
    return ExpCoefficient::from_terms(field, terms);
  }
  if (j.is_array() && j.empty()) return ExpCoefficient(field);
  return ExpCoefficient(complex_from_json(field, j));
}

json to_json(const ExpCoefficient& c) {
  if (c.is_constant()) return to_json(c.constant_value());
  json a = json::array();
  for (const auto& [mu, coeff] : c.terms()) a.push_back({{"exp", to_json(mu)}, {"coeff", to_json(coeff)}});
  return a;
}

ExpPolynomial exppoly_from_json(const FieldPtr& field, const json& j) {
  const std::size_t d = size_member(j, "dim");
  if (d == 0) malformed("dimension must be positive");
  ExpPolynomial f(field, d);
  for (const auto& t : array_member(j, "terms")) {
    const ComplexVector lambda =
        t.contains("lambda") ? complex_vector_from_json(field, t.at("lambda")) : ExpPolynomial::zero_frequency(field, d);
    if (lambda.size() != d) malformed("frequency of wrong dimension");
    for (const auto& m : array_member(t, "poly")) {
      MultiIndex alpha;
      for (const auto& a : array_member(m, "alpha")) {
        if (!a.is_number_unsigned()) malformed("exponents must be non-negative integers");
        alpha.push_back(a.get<unsigned>());
      }
      if (alpha.size() != d) malformed("exponent of wrong dimension");
      f.add_term(lambda, alpha, coefficient_from_json(field, member(m, "coeff")));
    }
  }
  return f;
}

json to_json(const ExpPolynomial& f) {
  json terms = json::array();
  for (const auto& [lambda, part] : f.terms()) {
    json poly = json::array();
    for (const auto& [alpha, c] : part) poly.push_back({{"alpha", alpha}, {"coeff", to_json(c)}});
    terms.push_back({{"lambda", to_json(lambda)}, {"poly", poly}});
  }
  return {{"dim", f.dim()}, {"terms", terms}};
}

TranslationPolynomial parse_operator(const FieldPtr& field, std::string_view text) {
  std::optional<TranslationPolynomial> out;
  std::string_view rest = text;
  while (!rest.empty()) {
    const std::size_t semi = rest.find(';');
    std::string_view piece = trim(rest.substr(0, semi));
    rest = semi == std::string_view::npos ? std::string_view{} : rest.substr(semi + 1);
    if (piece.empty()) continue;
    std::vector<std::string> words;
    std::string cur;
    for (char c : piece) {
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!cur.empty()) words.push_back(std::move(cur));
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) words.push_back(cur);
    std::map<std::string, std::string> kv;
    for (std::size_t i = 1; i < words.size(); ++i) {
      const auto eq = words[i].find('=');
      if (eq == std::string::npos) malformed("operator arguments are key=value: \"" + words[i] + "\"");
      kv[words[i].substr(0, eq)] = words[i].substr(eq + 1);
    }
    auto vec_of = [&](const std::string& key) {
      if (!kv.count(key)) malformed("operator \"" + words[0] + "\" needs " + key + "=");
      FieldVector v;
      std::string_view s = kv[key];
      while (true) {
        const std::size_t comma = s.find(',');
        v.push_back(parse_scalar(field, s.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        s.remove_prefix(comma + 1);
      }
      return v;
    };
    TranslationPolynomial op(field, 1);
    if (words[0] == "delta") {
      unsigned m = 1;
      if (kv.count("m")) {
        const mpq_class mq = parse_rational(kv["m"]);
        if (mq.get_den() != 1 || mq < 0) malformed("m must be a non-negative integer");
        m = static_cast<unsigned>(mq.get_num().get_ui());
      }
      op = op_delta(vec_of("h"), m);
    } else if (words[0] == "shift") {
      op = TranslationPolynomial::shift(vec_of("y"));
    } else {
      malformed("unknown operator \"" + words[0] + "\" (use delta or shift)");
    }
    if (out && out->dim() != op.dim()) malformed("operators of different dimensions");
    out = out ? *out * op : op;
  }
  if (!out) malformed("empty operator");
  return *out;
}

TranslationPolynomial operator_from_json(const FieldPtr& field, std::size_t dim, const json& j) {
  TranslationPolynomial op(field, 1);
  if (j.is_string()) {
    op = parse_operator(field, j.get<std::string>());
  } else {
    const std::size_t d = size_member(j, "dim");
    op = TranslationPolynomial(field, d);
    for (const auto& t : array_member(j, "terms")) {
      const FieldVector y = vector_from_json(field, member(t, "shift"));
      if (y.size() != d) malformed("shift of wrong dimension");
      op.add_term(y, coefficient_from_json(field, member(t, "coeff")));
    }
  }
  if (dim != 0 && op.dim() != dim) malformed("operator of dimension " + std::to_string(op.dim()) + ", expected " +
                                             std::to_string(dim));
  return op;
}

json to_json(const TranslationPolynomial& op) {
  json terms = json::array();
  for (const auto& [y, c] : op.terms()) terms.push_back({{"shift", to_json(y)}, {"coeff", to_json(c)}});
  return {{"dim", op.dim()}, {"terms", terms}};
}

FunctionSubspace space_from_json(const FieldPtr& field, const json& j) {
  const std::size_t d = size_member(j, "dim");
  FunctionSubspace v(field, d);
  for (const auto& b : array_member(j, "basis")) {
    ExpPolynomial f = exppoly_from_json(field, b);
    if (f.dim() != d) malformed("basis element of wrong dimension");
    v.insert(f);
  }
  return v;
}

json to_json(const FunctionSubspace& v) {
  json basis = json::array();
  for (const auto& b : v.basis()) basis.push_back(to_json(b));
  return {{"dim", v.ambient_dim()}, {"dimension", v.dimension()}, {"basis", basis}};
}

json to_json(const GroupClosure& c) {
  json decomposition = json::array();
  for (std::size_t k = 0; k < c.generators.size(); ++k) {
    json n = json::array();
    for (const auto& z : c.lambda_coords[k]) n.push_back(integer_json(z));
    decomposition.push_back({{"v", to_json(c.v_components[k])}, {"lattice_coords", n}});
  }
  return {{"dim", c.dim},
          {"generators", to_json(c.generators)},
          {"V", to_json(c.v_basis)},
          {"Lambda", to_json(c.lambda_basis)},
          {"dense", c.dense},
          {"relation_rank", c.relation_rank},
          {"decomposition", decomposition}};
}

json to_json(const HyperplaneFrame& f) {
  json p = json::array();
  for (const auto& z : f.p) p.push_back(integer_json(z));
  return {{"dim", f.dim},       {"Vt", to_json(f.vt_basis)}, {"w", to_json(f.w)},
          {"r", to_json(f.r)},  {"p", p},                    {"generators", to_json(f.generators)}};
}

HyperplaneFrame frame_from_json(const FieldPtr& field, const json& j) {
  HyperplaneFrame f;
  f.field = field;
  f.dim = size_member(j, "dim");
  f.vt_basis = vectors_from_json(field, member(j, "Vt"));
  f.w = vector_from_json(field, member(j, "w"));
  f.r = scalar_from_json(field, member(j, "r"));
  f.generators = vectors_from_json(field, member(j, "generators"));
  for (const auto& z : array_member(j, "p")) {
    if (!z.is_string() && !z.is_number_integer()) malformed("p entries are integers");
    f.p.emplace_back(z.is_string() ? z.get<std::string>() : std::to_string(z.get<long>()));
  }
  if (f.w.size() != f.dim || f.vt_basis.size() + 1 != f.dim || f.p.size() != f.generators.size())
    throw Error(ErrorKind::FrameInvalid, "frame fields have inconsistent sizes");
  for (const auto& v : f.vt_basis)
    if (v.size() != f.dim || !dot(v, f.w).is_zero())
      throw Error(ErrorKind::FrameInvalid, "w must be orthogonal to every Vt vector");
  if (f.r.sign() <= 0) throw Error(ErrorKind::FrameInvalid, "r must be positive");
  for (std::size_t k = 0; k < f.generators.size(); ++k)
    if (f.s(f.generators[k]) != f.r * mpq_class(f.p[k]))
      throw Error(ErrorKind::FrameInvalid, "s(h_k) differs from p_k r for generator " + std::to_string(k));
  return f;
}

EvaluableFunction function_from_json(const FieldPtr& field, const json& j) {
  const json& node = member(j, "node");
  if (!node.is_string()) malformed("\"node\" must be a string");
  const std::string kind = node.get<std::string>();
  if (kind == "exp_poly") return EvaluableFunction::exp_poly(exppoly_from_json(field, member(j, "poly")));
  if (kind == "triangle") return make_triangle_wave(scalar_from_json(field, member(j, "h")));
  if (kind == "antidifference")
    return make_antidifference(function_from_json(field, member(j, "child")), scalar_from_json(field, member(j, "h")));
  if (kind == "project")
    return EvaluableFunction::project(function_from_json(field, member(j, "child")),
                                      vectors_from_json(field, member(j, "rows")));
  if (kind == "sum") {
    std::vector<EvaluableFunction> terms;
    for (const auto& t : array_member(j, "terms")) terms.push_back(function_from_json(field, t));
    return EvaluableFunction::sum(terms);
  }
  if (kind == "scale")
    return EvaluableFunction::scale(complex_from_json(field, member(j, "c")),
                                    function_from_json(field, member(j, "child")));
  if (kind == "coset")
    return EvaluableFunction::coset(frame_from_json(field, member(j, "frame")),
                                    exppoly_from_json(field, member(j, "e")),
                                    function_from_json(field, member(j, "inner")),
                                    scalar_from_json(field, member(j, "factor")));
  malformed("unknown node \"" + kind + "\"");
}

json to_json(const EvaluableFunction& f) {
  switch (f.kind()) {
    case NodeKind::ExpPoly:
      return {{"node", "exp_poly"}, {"poly", to_json(f.poly())}};
    case NodeKind::Triangle:
      return {{"node", "triangle"}, {"h", to_json(f.step())}};
    case NodeKind::AntiDifference:
      return {{"node", "antidifference"}, {"h", to_json(f.step())}, {"child", to_json(f.children()[0])}};
    case NodeKind::Project:
      return {{"node", "project"}, {"rows", to_json(f.rows())}, {"child", to_json(f.children()[0])}};
    case NodeKind::Sum: {
      json terms = json::array();
      for (const auto& c : f.children()) terms.push_back(to_json(c));
      return {{"node", "sum"}, {"terms", terms}};
    }
    case NodeKind::Scale:
      return {{"node", "scale"}, {"c", to_json(f.factor())}, {"child", to_json(f.children()[0])}};
    case NodeKind::Coset:
      return {{"node", "coset"},
              {"frame", to_json(f.frame())},
              {"e", to_json(f.poly())},
              {"inner", to_json(f.children()[0])},
              {"factor", to_json(f.coset_factor())}};
  }
  throw Error(ErrorKind::Internal, "unknown node kind");
}

DifferenceSystem system_from_json(const FieldPtr& field, const json& j) {
  DifferenceSystem s;
  s.field = field;
  for (const auto& st : array_member(j, "steps")) {
    s.steps.push_back(vector_from_json(field, member(st, "h")));
    const json& m = member(st, "m");
    if (!m.is_number_unsigned() || m.get<unsigned>() == 0) malformed("orders m must be positive integers");
    s.orders.push_back(m.get<unsigned>());
  }
  if (s.steps.empty()) throw Error(ErrorKind::EmptyGeneratorList, "no steps");
  s.dim = j.contains("dim") ? size_member(j, "dim") : s.steps[0].size();
  for (const auto& g : array_member(j, "rhs")) s.rhs.push_back(exppoly_from_json(field, g));
  return s;
}

json to_json(const SolutionBundle& b) {
  json kernel = json::array();
  for (const auto& p : b.kernel_basis) kernel.push_back(to_json(p));
  json ansatz = json::array();
  for (const auto& e : b.ansatz) ansatz.push_back({{"lambda", to_json(e.lambda)}, {"degree_bound", e.degree_bound}});
  return {{"particular", to_json(b.particular)},
          {"denominator", to_json(b.denominator)},
          {"kernel_basis", kernel},
          {"kernel_degree_cap", b.kernel_degree_cap},
          {"ansatz", ansatz}};
}

}  // namespace deltaclose::io
