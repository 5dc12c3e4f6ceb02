#include "deltaclose/construct.hpp"

#include <algorithm>
#include <cmath>

#include "deltaclose/error.hpp"
#include "deltaclose/fit.hpp"
#include "deltaclose/numeric.hpp"

namespace deltaclose {

struct EvaluableFunction::Node {
  NodeKind kind;
  std::size_t dim = 1;
  FieldPtr field;
  std::optional<ExpPolynomial> poly;
  NumericExpPoly numeric;
  std::optional<AlgebraicScalar> h;
  double hd = 0.0;
  std::vector<EvaluableFunction> children;
  std::vector<FieldVector> rows;
  std::vector<std::vector<double>> rows_d;
  std::optional<ComplexAlgebraic> c;
  std::complex<double> cd;
  std::optional<HyperplaneFrame> frame;
  std::vector<double> w_d;
  double ww_d = 0.0;
  double coset_scale_d = 1.0;  // factor / r
  std::optional<AlgebraicScalar> coset_factor;
};

namespace {

using Node = EvaluableFunction::Node;

void require(bool ok, ErrorKind kind, const char* what) {
  if (!ok) throw Error(kind, what);
}

// x = y + k h with y in [0, h).
long reduce(double x, double h, double& y) {
  double k = std::floor(x / h);
  y = x - k * h;
  if (y >= h) {
    y -= h;
    k += 1;
  } else if (y < 0) {
    y += h;
    k -= 1;
  }
  return static_cast<long>(k);
}

}  // namespace

EvaluableFunction EvaluableFunction::exp_poly(const ExpPolynomial& f) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::ExpPoly;
  n->dim = f.dim();
  n->field = f.field();
  n->poly = f;
  n->numeric = NumericExpPoly(f);
  return EvaluableFunction(n);
}

EvaluableFunction EvaluableFunction::triangle(const AlgebraicScalar& h) {
  require(h.sign() > 0, ErrorKind::NonpositivePeriod, "triangle wave period must be positive");
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Triangle;
  n->field = h.field();
  n->h = h;
  n->hd = h.to_double();
  return EvaluableFunction(n);
}

EvaluableFunction EvaluableFunction::antidifference(const EvaluableFunction& child, const AlgebraicScalar& h) {
  require(h.sign() > 0, ErrorKind::NonpositivePeriod, "antidifference step must be positive");
  require(child.dim() == 1, ErrorKind::DimensionMismatch, "antidifference needs a function of one variable");
  require_same_field(child.field(), h.field());
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::AntiDifference;
  n->field = h.field();
  n->h = h;
  n->hd = h.to_double();
  n->children = {child};
  return EvaluableFunction(n);
}

EvaluableFunction EvaluableFunction::project(const EvaluableFunction& child, const std::vector<FieldVector>& rows) {
  require(rows.size() == child.dim(), ErrorKind::DimensionMismatch, "projection rows must match the child dimension");
  require(!rows.empty() && !rows[0].empty(), ErrorKind::DimensionMismatch, "empty projection");
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Project;
  n->dim = rows[0].size();
  n->field = child.field();
  for (const auto& r : rows) {
    require(r.size() == n->dim, ErrorKind::DimensionMismatch, "projection rows of different length");
    for (const auto& x : r) require_same_field(n->field, x.field());
    n->rows_d.push_back(to_doubles(r));
  }
  n->rows = rows;
  n->children = {child};
  return EvaluableFunction(n);
}

EvaluableFunction EvaluableFunction::sum(const std::vector<EvaluableFunction>& terms) {
  require(!terms.empty(), ErrorKind::EmptyInput, "sum of no functions");
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Sum;
  n->dim = terms[0].dim();
  n->field = terms[0].field();
  for (const auto& t : terms) {
    require(t.dim() == n->dim, ErrorKind::DimensionMismatch, "summands of different dimension");
    require_same_field(n->field, t.field());
  }
  n->children = terms;
  return EvaluableFunction(n);
}

EvaluableFunction EvaluableFunction::scale(const ComplexAlgebraic& c, const EvaluableFunction& child) {
  require_same_field(c.field(), child.field());
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Scale;
  n->dim = child.dim();
  n->field = child.field();
  n->c = c;
  n->cd = c.to_complex();
  n->children = {child};
  return EvaluableFunction(n);
}

EvaluableFunction EvaluableFunction::coset(const HyperplaneFrame& frame, const ExpPolynomial& e,
                                           const EvaluableFunction& inner, const AlgebraicScalar& factor) {
  require(e.dim() == frame.dim, ErrorKind::FrameInvalid, "exponential polynomial and frame dimensions differ");
  require(inner.dim() == 1, ErrorKind::DimensionMismatch, "inner function must have one variable");
  require(frame.r.sign() > 0, ErrorKind::FrameInvalid, "frame step must be positive");
  require(!is_zero(frame.w), ErrorKind::FrameInvalid, "frame normal is zero");
  require(frame.vt_basis.size() + 1 == frame.dim, ErrorKind::FrameInvalid, "frame hyperplane has wrong dimension");
  for (const auto& v : frame.vt_basis)
    require(dot(v, frame.w).is_zero(), ErrorKind::FrameInvalid, "frame normal is not orthogonal to the hyperplane");
  require_same_field(frame.field, e.field());
  require_same_field(frame.field, inner.field());
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Coset;
  n->dim = frame.dim;
  n->field = frame.field;
  n->poly = e;
  n->numeric = NumericExpPoly(e);
  n->frame = frame;
  n->w_d = to_doubles(frame.w);
  for (double x : n->w_d) n->ww_d += x * x;
  n->coset_factor = factor;
  n->coset_scale_d = (factor / frame.r).to_double();
  n->children = {inner};
  return EvaluableFunction(n);
}

NodeKind EvaluableFunction::kind() const { return node_->kind; }
std::size_t EvaluableFunction::dim() const { return node_->dim; }
const FieldPtr& EvaluableFunction::field() const { return node_->field; }
const ExpPolynomial& EvaluableFunction::poly() const { return node_->poly.value(); }
const AlgebraicScalar& EvaluableFunction::step() const { return node_->h.value(); }
const std::vector<EvaluableFunction>& EvaluableFunction::children() const { return node_->children; }
const std::vector<FieldVector>& EvaluableFunction::rows() const { return node_->rows; }
const ComplexAlgebraic& EvaluableFunction::factor() const { return node_->c.value(); }
const HyperplaneFrame& EvaluableFunction::frame() const { return node_->frame.value(); }
const AlgebraicScalar& EvaluableFunction::coset_factor() const { return node_->coset_factor.value(); }

std::complex<double> EvaluableFunction::operator()(std::span<const double> x) const {
  const Node& n = *node_;
  if (x.size() != n.dim) throw Error(ErrorKind::DimensionMismatch, "evaluation point has wrong dimension");
  switch (n.kind) {
    case NodeKind::ExpPoly:
      return n.numeric(x);
    case NodeKind::Triangle: {
      const double t = x[0] / n.hd;
      return n.hd * std::abs(t - std::floor(t + 0.5));
    }
    case NodeKind::AntiDifference: {
      double y;
      const long k = reduce(x[0], n.hd, y);
      if (k == 0) return 0.0;
      std::complex<double> acc = 0.0;
      if (k > 0) {
        for (const auto& v : n.children[0].progression(y, n.hd, 0, k - 1)) acc += v;
        return acc;
      }
      for (const auto& v : n.children[0].progression(y, n.hd, k, -1)) acc -= v;
      return acc;
    }
    case NodeKind::Project: {
      std::vector<double> y(n.rows_d.size(), 0.0);
      for (std::size_t i = 0; i < y.size(); ++i)
        for (std::size_t j = 0; j < n.dim; ++j) y[i] += n.rows_d[i][j] * x[j];
      return n.children[0](y);
    }
    case NodeKind::Sum: {
      std::complex<double> acc = 0.0;
      for (const auto& c : n.children) acc += c(x);
      return acc;
    }
    case NodeKind::Scale:
      return n.cd * n.children[0](x);
    case NodeKind::Coset: {
      double zw = 0.0;
      for (std::size_t i = 0; i < n.dim; ++i) zw += x[i] * n.w_d[i];
      const double s = zw / n.ww_d;
      std::vector<double> along(n.dim);
      for (std::size_t i = 0; i < n.dim; ++i) along[i] = x[i] - s * n.w_d[i];
      const double arg = s * n.coset_scale_d;
      return n.numeric(along) + n.children[0](std::span<const double>(&arg, 1));
    }
  }
  throw Error(ErrorKind::Internal, "unknown node kind");
}

std::vector<std::complex<double>> EvaluableFunction::progression(double y, double h, long lo, long hi) const {
  std::vector<std::complex<double>> out;
  if (hi < lo) return out;
  const Node& n = *node_;
  if (n.kind == NodeKind::AntiDifference && n.hd == h) {
    // f(y0 + i h) are partial sums of child values along the same lattice.
    double y0;
    const long k0 = reduce(y + static_cast<double>(lo) * h, h, y0);
    const long ilo = k0, ihi = k0 + (hi - lo);
    const long clo = std::min(ilo, 0L), chi = std::max(ihi, 0L);
    const auto g = n.children[0].progression(y0, h, clo, chi);
    std::vector<std::complex<double>> prefix(static_cast<std::size_t>(chi - clo + 1));
    const long zero = -clo;
    prefix[static_cast<std::size_t>(zero)] = 0.0;
    for (long i = 0; i < chi; ++i)
      prefix[static_cast<std::size_t>(zero + i + 1)] = prefix[static_cast<std::size_t>(zero + i)] +
                                                        g[static_cast<std::size_t>(zero + i)];
    for (long i = -1; i >= clo; --i)
      prefix[static_cast<std::size_t>(zero + i)] = prefix[static_cast<std::size_t>(zero + i + 1)] -
                                                    g[static_cast<std::size_t>(zero + i)];
    for (long i = ilo; i <= ihi; ++i) out.push_back(prefix[static_cast<std::size_t>(zero + i)]);
    return out;
  }
  out.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (long j = lo; j <= hi; ++j) {
    const double x = y + static_cast<double>(j) * h;
    out.push_back((*this)(std::span<const double>(&x, 1)));
  }
  return out;
}

ExpCoefficient EvaluableFunction::exact(const FieldVector& x) const {
  const Node& n = *node_;
  if (x.size() != n.dim) throw Error(ErrorKind::DimensionMismatch, "evaluation point has wrong dimension");
  for (const auto& v : x) require_same_field(n.field, v.field());
  switch (n.kind) {
    case NodeKind::ExpPoly:
      return ep_eval_exact(*n.poly, x);
    case NodeKind::Triangle: {
      const AlgebraicScalar t = x[0] / *n.h;
      const mpz_class k = (t + AlgebraicScalar(n.field, mpq_class(1, 2))).floor();
      AlgebraicScalar d = t - AlgebraicScalar(n.field, mpq_class(k));
      if (d.sign() < 0) d = -d;
      return ExpCoefficient(d * *n.h);
    }
    case NodeKind::AntiDifference: {
      const mpz_class k = (x[0] / *n.h).floor();
      const AlgebraicScalar y = x[0] - *n.h * mpq_class(k);
      ExpCoefficient acc(n.field);
      if (k > 0) {
        for (mpz_class j = 0; j < k; ++j) acc += n.children[0].exact({y + *n.h * mpq_class(j)});
      } else {
        for (mpz_class j = 1; j <= -k; ++j) acc -= n.children[0].exact({y - *n.h * mpq_class(j)});
      }
      return acc;
    }
    case NodeKind::Project: {
      FieldVector y;
      for (const auto& r : n.rows) y.push_back(dot(r, x));
      return n.children[0].exact(y);
    }
    case NodeKind::Sum: {
      ExpCoefficient acc(n.field);
      for (const auto& c : n.children) acc += c.exact(x);
      return acc;
    }
    case NodeKind::Scale:
      return n.children[0].exact(x) * *n.c;
    case NodeKind::Coset: {
      const FrameProjection p = frame_project(*n.frame, x);
      const AlgebraicScalar arg = p.s / n.frame->r * *n.coset_factor;
      return ep_eval_exact(*n.poly, p.along) + n.children[0].exact({arg});
    }
  }
  throw Error(ErrorKind::Internal, "unknown node kind");
}

NumericOperator::NumericOperator(const TranslationPolynomial& op) {
  for (const auto& [y, c] : op.terms()) terms_.emplace_back(to_doubles(y), expcoef_eval(c));
}

std::complex<double> NumericOperator::operator()(const EvaluableFunction& f, std::span<const double> x) const {
  std::complex<double> acc = 0.0;
  std::vector<double> xy(x.size());
  for (const auto& [y, c] : terms_) {
    for (std::size_t i = 0; i < x.size(); ++i) xy[i] = x[i] + y.at(i);
    acc += c * f(xy);
  }
  return acc;
}

EvaluableFunction make_triangle_wave(const AlgebraicScalar& h) { return EvaluableFunction::triangle(h); }

EvaluableFunction make_antidifference(const EvaluableFunction& g, const AlgebraicScalar& h) {
  require(h.sign() > 0, ErrorKind::NonpositivePeriod, "antidifference step must be positive");
  require(g.dim() == 1, ErrorKind::DimensionMismatch, "antidifference needs a function of one variable");
  const double hd = h.to_double();
  for (long k = -50; k <= 50; ++k) {
    const double x = static_cast<double>(k) * hd;
    if (std::abs(g(std::span<const double>(&x, 1))) > 1e-10)
      throw Error(ErrorKind::LatticeValuesNonzero, "g does not vanish at " + std::to_string(k) + " h");
  }
  for (long k = -4; k <= 4; ++k)
    if (!g.exact({h * mpq_class(k)}).is_zero())
      throw Error(ErrorKind::LatticeValuesNonzero, "g does not vanish exactly at " + std::to_string(k) + " h");
  return EvaluableFunction::antidifference(g, h);
}

EvaluableFunction make_fm(unsigned m, const AlgebraicScalar& h) {
  if (m == 0) throw Error(ErrorKind::Malformed, "m must be positive");
  EvaluableFunction f = make_triangle_wave(h);
  for (unsigned k = 1; k < m; ++k) f = make_antidifference(f, h);
  return f;
}

namespace {

std::vector<FieldVector> hyperplane_projector(const HyperplaneFrame& frame) {
  const AlgebraicScalar ww = frame.w_norm2();
  std::vector<FieldVector> p;
  for (std::size_t i = 0; i < frame.dim; ++i) {
    FieldVector row;
    for (std::size_t j = 0; j < frame.dim; ++j) {
      AlgebraicScalar v = -(frame.w[i] * frame.w[j]) / ww;
      if (i == j) v += AlgebraicScalar(frame.field, mpq_class(1));
      row.push_back(v);
    }
    p.push_back(std::move(row));
  }
  return p;
}

}  // namespace

Prop7Function make_prop7_phi(const HyperplaneFrame& frame, const ExpPolynomial& e, unsigned m) {
  if (m == 0) throw Error(ErrorKind::Malformed, "m must be positive");
  const AlgebraicScalar one(frame.field, mpq_class(1));
  EvaluableFunction phi = EvaluableFunction::coset(frame, e, make_fm(m, one), one);
  FunctionSubspace h(frame.field, frame.dim);
  const auto proj = hyperplane_projector(frame);
  for (const auto& b : ep_translation_hull(e)) h.insert(ep_compose_linear(b, proj, frame.dim));
  return {phi, h, frame, e, m};
}

namespace {

double slope_gap(const EvaluableFunction& f, const std::vector<double>& x0, const std::vector<double>& u, double t,
                 double delta) {
  std::vector<double> p(x0.size());
  auto at = [&](double s) {
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = x0[i] + s * u[i];
    return f(p);
  };
  const auto c = at(t);
  return std::abs((at(t + delta) - c) / delta - (c - at(t - delta)) / delta);
}

}  // namespace

CornerWitness corner_witness(const EvaluableFunction& f, const Box& window, const std::vector<double>& steps,
                             std::vector<std::vector<double>> directions) {
  const std::size_t d = f.dim();
  if (window.lo.size() != d || window.hi.size() != d)
    throw Error(ErrorKind::DimensionMismatch, "window dimension differs from function");
  if (steps.empty()) throw Error(ErrorKind::Malformed, "no step sizes");
  std::vector<double> deltas = steps;
  std::sort(deltas.begin(), deltas.end(), std::greater<>());
  constexpr double kMinGap = 0.1, kStability = 1.5;

  std::vector<bool> axis;
  if (directions.empty()) {
    for (std::size_t i = 0; i < d; ++i) {
      std::vector<double> e(d, 0.0);
      e[i] = 1.0;
      directions.push_back(e);
    }
  }
  for (auto& u : directions) {
    double norm = 0.0;
    for (double v : u) norm += v * v;
    norm = std::sqrt(norm);
    if (u.size() != d || norm == 0.0) throw Error(ErrorKind::Malformed, "bad scan direction");
    for (double& v : u) v /= norm;
    std::size_t nonzero = 0;
    for (double v : u) nonzero += (v != 0.0);
    axis.push_back(nonzero == 1);
  }

  const std::size_t per_axis = d <= 2 ? 5 : 3;
  CornerWitness best;
  for (std::size_t di = 0; di < directions.size(); ++di) {
    const auto& u = directions[di];
    // Anchors on a coarse grid; lines along an axis only vary the others.
    std::size_t anchors = 1;
    for (std::size_t i = 0; i < d; ++i) anchors *= (axis[di] && u[i] != 0.0) ? 1 : per_axis;
    for (std::size_t a = 0; a < anchors; ++a) {
      std::vector<double> x0(d);
      std::size_t rest = a;
      for (std::size_t i = 0; i < d; ++i) {
        const double mid = 0.5 * (window.lo[i] + window.hi[i]);
        if (axis[di] && u[i] != 0.0) {
          x0[i] = mid;
          continue;
        }
        const std::size_t idx = rest % per_axis;
        rest /= per_axis;
        x0[i] = window.lo[i] + (window.hi[i] - window.lo[i]) * static_cast<double>(idx) / (per_axis - 1);
      }
      // Parameter range keeping x0 + t u inside the window.
      double tlo = -std::numeric_limits<double>::infinity(), thi = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < d; ++i) {
        if (u[i] == 0.0) continue;
        double t1 = (window.lo[i] - x0[i]) / u[i], t2 = (window.hi[i] - x0[i]) / u[i];
        if (t1 > t2) std::swap(t1, t2);
        tlo = std::max(tlo, t1);
        thi = std::min(thi, t2);
      }
      if (!(thi > tlo)) continue;
      const double d0 = deltas[0];
      const std::size_t samples = static_cast<std::size_t>((thi - tlo) / d0) + 1;
      std::vector<std::complex<double>> vals(samples);
      std::vector<double> p(d);
      for (std::size_t s = 0; s < samples; ++s) {
        const double t = tlo + static_cast<double>(s) * d0;
        for (std::size_t i = 0; i < d; ++i) p[i] = x0[i] + t * u[i];
        vals[s] = f(p);
      }
      std::vector<std::pair<double, double>> candidates;  // (coarse gap, t)
      for (std::size_t s = 1; s + 1 < samples; ++s) {
        const double g = std::abs(vals[s + 1] - 2.0 * vals[s] + vals[s - 1]) / d0;
        if (g >= kMinGap) candidates.emplace_back(g, tlo + static_cast<double>(s) * d0);
      }
      std::sort(candidates.begin(), candidates.end(), std::greater<>());
      if (candidates.size() > 4) candidates.resize(4);
      for (const auto& [coarse, t0] : candidates) {
        double c = t0, prev = d0;
        for (double delta : deltas) {
          const double spacing = delta / 20.0;
          const long count = static_cast<long>(std::ceil(2.0 * prev / spacing));
          double best_t = c, best_gap = -1.0;
          for (long j = -count; j <= count; ++j) {
            const double t = c + static_cast<double>(j) * spacing;
            const double g = slope_gap(f, x0, u, t, delta);
            if (g > best_gap) {
              best_gap = g;
              best_t = t;
            }
          }
          c = best_t;
          prev = delta;
        }
        std::vector<double> gaps;
        for (double delta : deltas) gaps.push_back(slope_gap(f, x0, u, c, delta));
        const double lo = *std::min_element(gaps.begin(), gaps.end());
        const double hi = *std::max_element(gaps.begin(), gaps.end());
        if (lo < kMinGap || hi > kStability * lo) continue;
        if (best.found && gaps.back() <= best.gap) continue;
        best.found = true;
        best.gap = gaps.back();
        best.gaps = gaps;
        best.direction = u;
        best.point.assign(d, 0.0);
        for (std::size_t i = 0; i < d; ++i) best.point[i] = x0[i] + c * u[i];
      }
    }
  }
  return best;
}

Prop7Certificate prop7_certify(const Prop7Function& p, const Box& window, std::size_t n, double tolerance) {
  Prop7Certificate cert;
  const HyperplaneFrame& fr = p.frame;
  const std::size_t d = fr.dim;
  const auto proj = hyperplane_projector(fr);
  const std::vector<ExpPolynomial> basis = p.h.basis();

  cert.hull_invariant = true;
  cert.shifts_reduce = true;
  for (const auto& h : fr.generators) {
    cert.hull_invariant = cert.hull_invariant && p.h.invariant_under(op_delta(h, 1));
    FieldVector ph;
    for (const auto& row : proj) ph.push_back(dot(row, h));
    for (const auto& b : basis)
      if (ep_translate(b, h) != ep_translate(b, ph)) cert.shifts_reduce = false;
  }

  Grid grid;
  for (std::size_t i = 0; i < d; ++i) {
    grid.origin.push_back(window.lo[i]);
    grid.spacing.push_back(n > 1 ? (window.hi[i] - window.lo[i]) / static_cast<double>(n - 1) : 0.0);
    grid.count.push_back(n);
  }
  const std::size_t rows = grid.size();
  std::vector<NumericExpPoly> nb(basis.begin(), basis.end());
  Eigen::MatrixXcd a(rows, static_cast<Eigen::Index>(nb.size()));
  for (std::size_t r = 0; r < rows; ++r) {
    const auto x = grid.point(r);
    for (std::size_t j = 0; j < nb.size(); ++j) a(r, j) = nb[j](x);
  }
  cert.membership_ok = true;
  for (const auto& h : fr.generators) {
    const NumericOperator op(op_delta(h, p.m));
    Eigen::VectorXcd b(rows);
    double mag = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      b(r) = op(p.phi, grid.point(r));
      mag = std::max(mag, std::abs(b(r)));
    }
    const LeastSquares fit = least_squares(a, b);
    cert.membership_residual = std::max(cert.membership_residual, fit.max_residual);
    if (fit.max_residual > tolerance * std::max(1.0, mag)) cert.membership_ok = false;
  }

  std::vector<std::vector<double>> dirs;
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<double> e(d, 0.0);
    e[i] = 1.0;
    dirs.push_back(e);
  }
  dirs.push_back(to_doubles(fr.w));
  cert.corner = corner_witness(p.phi, window, {1e-2, 1e-3, 1e-4}, dirs);
  return cert;
}

}  // namespace deltaclose
