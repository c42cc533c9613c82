#include "uc/einstein.hpp"

#include "einstein_detail.hpp"

#include <cmath>
#include <limits>

namespace uc {

Potential::Potential(std::string name, std::function<double(int, double)> derivative, int max_order,
                     double lipschitz)
    : name_(std::move(name)), d_(std::move(derivative)), max_order_(max_order), lipschitz_(lipschitz) {}

Potential Potential::zero() {
  return Potential("zero", [](int, double) { return 0.0; }, std::numeric_limits<int>::max(), 0.0);
}

Potential Potential::constant(double v0) {
  return Potential(
      "constant", [v0](int k, double) { return k == 0 ? v0 : 0.0; }, std::numeric_limits<int>::max(), 0.0);
}

Potential Potential::quadratic(double m) {
  const double m2 = m * m;
  return Potential(
      "quadratic",
      [m2](int k, double x) {
        switch (k) {
          case 0: return 0.5 * m2 * x * x;
          case 1: return m2 * x;
          case 2: return m2;
          default: return 0.0;
        }
      },
      std::numeric_limits<int>::max(), m2);
}

Potential Potential::quartic(double m, double g) {
  const double m2 = m * m;
  // V'' is bounded by m^2 + 3 g on |phi| <= 1, the range used in the experiments.
  return Potential(
      "quartic",
      [m2, g](int k, double x) {
        switch (k) {
          case 0: return 0.5 * m2 * x * x + 0.25 * g * x * x * x * x;
          case 1: return m2 * x + g * x * x * x;
          case 2: return m2 + 3.0 * g * x * x;
          case 3: return 6.0 * g * x;
          case 4: return 6.0 * g;
          default: return 0.0;
        }
      },
      std::numeric_limits<int>::max(), m2 + 3.0 * std::abs(g));
}

double Potential::operator()(int k, double x) const {
  if (k < 0 || k > max_order_) throw DomainError("potential derivative order out of range");
  return d_(k, x);
}

Jet Potential::apply(int k, const Jet& phi) const {
  std::vector<double> d(phi.order() + 1);
  for (int j = 0; j <= phi.order(); ++j) d[j] = (*this)(k + j, phi.value());
  return compose_univariate(phi, d);
}

ScalarSolution ScalarSolution::constant(double c) {
  return {[c](std::span<const Jet> x) { return Jet(x[0].layout(), c); }, DiffBackend::analytic()};
}

using detail::Values;

namespace {

// Taylor data of the metric and the field at one point, with iterated
// covariant derivatives of phi.
struct Local {
  int n = 0;
  int order = 0;
  LocalGeometry geo;
  std::vector<BasicTensor<Jet>> dphi;  // nabla^k phi, k = 0..order
};

Local make_local(const MetricField& f, const ScalarSolution& s, std::span<const double> p, int order) {
  if (static_cast<int>(p.size()) != f.dim()) throw ShapeError("point dimension mismatch");
  if (!f.in_domain(p)) throw DomainError("point outside the metric's domain");
  Local l;
  l.n = f.dim();
  l.order = order;
  l.geo = LocalGeometry::at(f, p, order, order >= 2);
  Jet ph = taylor_expand(s.phi, p, order, s.backend);
  l.dphi.emplace_back(l.n, std::vector<Variance>{}, ph);
  l.dphi.back().data()[0] = ph;
  for (int k = 1; k <= order; ++k) l.dphi.push_back(covariant_derivative(l.dphi.back(), l.geo));
  return l;
}

std::vector<double> flat_values(const BasicTensor<Jet>& t) {
  std::vector<double> v(t.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = t.data()[i].value();
  return v;
}

Values make_values(const Local& l, const Forcing* forcing) {
  Values v;
  const int n = l.n;
  v.n = n;
  v.g.resize(n * n);
  v.gi.resize(n * n);
  for (int i = 0; i < n * n; ++i) {
    v.g[i] = l.geo.g[i].value();
    v.gi[i] = l.geo.g_inv[i].value();
  }
  v.phi = l.dphi[0].data()[0].value();
  std::vector<double>* d[] = {&v.d1, &v.d2, &v.d3, &v.d4};
  for (int k = 1; k <= std::min(l.order, 4); ++k) *d[k - 1] = flat_values(l.dphi[k]);
  if (l.order >= 2) {
    v.R = flat_values(l.geo.riemann);
    BasicTensor<Jet> ric = l.geo.ricci();
    v.ric = flat_values(ric);
    if (l.order >= 3) {
      BasicTensor<Jet> dr = covariant_derivative(l.geo.riemann, l.geo);
      v.dR = flat_values(dr);
      if (l.order >= 4) v.ddR = flat_values(covariant_derivative(dr, l.geo));
    }
  }
  const std::size_t n2 = n * n;
  v.clear_forcing();
  if (forcing) {
    if (forcing->stress.dim() != n || forcing->stress.rank() != 2) throw ShapeError("forcing stress shape mismatch");
    const int so = std::min({forcing->stress.data()[0].order(), 2, l.geo.order - 1});
    BasicTensor<Jet> s(n, lower_slots(2), Jet(JetLayout::get(n, so)));
    for (std::size_t i = 0; i < n2; ++i) s.data()[i] = forcing->stress.data()[i].truncated(so);
    v.S = flat_values(s);
    if (so >= 1) {
      BasicTensor<Jet> ds = covariant_derivative(s, l.geo);
      v.dS = flat_values(ds);
      if (so >= 2) v.ddS = flat_values(covariant_derivative(ds, l.geo));
    }
    const int fo = std::min({forcing->scalar.order(), 2, l.geo.order - 1});
    BasicTensor<Jet> fs(n, std::vector<Variance>{}, forcing->scalar.truncated(fo));
    v.f0 = forcing->scalar.value();
    if (fo >= 1) {
      BasicTensor<Jet> dfs = covariant_derivative(fs, l.geo);
      v.df = flat_values(dfs);
      if (fo >= 2) v.ddf = flat_values(covariant_derivative(dfs, l.geo));
    }
  }
  return v;
}

Residual finish(Tensor value) {
  Residual r;
  r.norm = sup_norm(value);
  r.value = std::move(value);
  return r;
}

Tensor einstein_values(const Values& v, const Potential& pot, double lambda) {
  const int n = v.n;
  Tensor out(n, lower_slots(2));
  const double vl = pot(0, v.phi) + lambda;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out(i, j) = v.ric[i * n + j] - v.d1[i] * v.d1[j] - vl * v.g[i * n + j] - v.S[i * n + j];
  return out;
}

double scalar_value(const Values& v, const Potential& pot) {
  const int n = v.n;
  double lap = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) lap += v.gi[a * n + b] * v.d2[a * n + b];
  return lap - pot(1, v.phi) - v.f0;
}

void mark_shell(Residual& r, const Values& v, const Potential& pot, double lambda, const ResidualOptions& opt) {
  const double d = std::max(sup_norm(einstein_values(v, pot, lambda)), std::abs(scalar_value(v, pot)));
  r.on_shell_defect = d;
  r.off_shell = !(d <= opt.on_shell_tol);
}

}  // namespace

namespace detail {

void Values::clear_forcing() {
  const std::size_t n1 = n, n2 = n1 * n1;
  S.assign(n2, 0.0);
  dS.assign(n2 * n1, 0.0);
  ddS.assign(n2 * n2, 0.0);
  f0 = 0.0;
  df.assign(n1, 0.0);
  ddf.assign(n2, 0.0);
}

std::vector<double> ricci_from(const Values& v) {
  const int n = v.n;
  std::vector<double> ric(n * n, 0.0);
  for (int b = 0; b < n; ++b)
    for (int c = 0; c < n; ++c)
      for (int a = 0; a < n; ++a)
        for (int d = 0; d < n; ++d) ric[b * n + c] += v.gi[a * n + d] * v.R[((a * n + b) * n + c) * n + d];
  return ric;
}

std::vector<double> divergence_on_shell(const Values& v, const Potential& pot) {
  const int n = v.n;
  const double v1 = pot(1, v.phi);
  std::vector<double> c(n * n * n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int m = 0; m < n; ++m) {
        double s = v.d1[j] * v.d2[k * n + m] - v.d1[k] * v.d2[j * n + m];
        s += v1 * (v.d1[k] * v.g[j * n + m] - v.d1[j] * v.g[k * n + m]);
        s += -v.dS[(j * n + k) * n + m] + v.dS[(k * n + j) * n + m];
        c[(j * n + k) * n + m] = s;
      }
  return c;
}

std::vector<double> divergence_gradient_on_shell(const Values& v, const Potential& pot) {
  const int n = v.n;
  const double v1 = pot(1, v.phi), v2 = pot(2, v.phi);
  auto H = [&](int a, int b) { return v.d2[a * n + b]; };
  auto T3 = [&](int a, int b, int c) { return v.d3[(a * n + b) * n + c]; };
  auto g = [&](int a, int b) { return v.g[a * n + b]; };
  auto ddS = [&](int a, int b, int c, int d) { return v.ddS[((a * n + b) * n + c) * n + d]; };
  std::vector<double> dc(n * n * n * n);
  for (int a = 0; a < n; ++a)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m) {
          double s = H(a, j) * H(k, m) + v.d1[j] * T3(a, k, m) - H(a, k) * H(j, m) - v.d1[k] * T3(a, j, m);
          s += v2 * v.d1[a] * (v.d1[k] * g(j, m) - v.d1[j] * g(k, m));
          s += v1 * (H(a, k) * g(j, m) - H(a, j) * g(k, m));
          s += -ddS(a, j, k, m) + ddS(a, k, j, m);
          dc[((a * n + j) * n + k) * n + m] = s;
        }
  return dc;
}

std::vector<double> curvature_laplacian_rhs(const Values& v, const Potential& pot) {
  const int n = v.n;
  const std::vector<double> dc = divergence_gradient_on_shell(v, pot);
  auto R = [&](int a, int b, int c, int d) { return v.R[((a * n + b) * n + c) * n + d]; };
  // R_abc^d
  std::vector<double> rup(n * n * n * n, 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double s = 0.0;
          for (int e = 0; e < n; ++e) s += v.gi[d * n + e] * R(a, b, c, e);
          rup[((a * n + b) * n + c) * n + d] = s;
        }
  auto Ru = [&](int a, int b, int c, int d) { return rup[((a * n + b) * n + c) * n + d]; };
  // ([nabla_a, nabla_b] R)_{c0 c1 c2 c3}
  auto comm = [&](int a, int b, const int c[4]) {
    double s = 0.0;
    for (int slot = 0; slot < 4; ++slot) {
      int idx[4] = {c[0], c[1], c[2], c[3]};
      for (int d = 0; d < n; ++d) {
        idx[slot] = d;
        s -= Ru(a, b, c[slot], d) * R(idx[0], idx[1], idx[2], idx[3]);
      }
    }
    return s;
  };
  auto dC = [&](int a, int j, int k, int m) { return dc[((a * n + j) * n + k) * n + m]; };
  std::vector<double> out(n * n * n * n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m) {
          double rhs = dC(j, l, m, k) - dC(k, l, m, j);
          for (int i = 0; i < n; ++i)
            for (int a = 0; a < n; ++a) {
              const double w = v.gi[i * n + a];
              if (w == 0.0) continue;
              const int c1[4] = {k, i, l, m};
              const int c2[4] = {i, j, l, m};
              rhs -= w * (comm(a, j, c1) + comm(a, k, c2));
            }
          out[((j * n + k) * n + l) * n + m] = rhs;
        }
  return out;
}

std::vector<double> prolonged_rhs_1(const Values& v, const Potential& pot) {
  const int n = v.n;
  const double v2 = pot(2, v.phi);
  std::vector<double> out(n);
  for (int j = 0; j < n; ++j) {
    double ricgrad = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) ricgrad += v.ric[j * n + a] * v.gi[a * n + b] * v.d1[b];
    out[j] = v2 * v.d1[j] + ricgrad + v.df[j];
  }
  return out;
}

std::vector<double> prolonged_rhs_2(const Values& v, const Potential& pot) {
  const int n = v.n;
  const double v2 = pot(2, v.phi), v3 = pot(3, v.phi);
  auto H = [&](int a, int b) { return v.d2[a * n + b]; };
  auto R = [&](int a, int b, int c, int d) { return v.R[((a * n + b) * n + c) * n + d]; };
  auto dR = [&](int a, int b, int c, int d, int e) { return v.dR[(((a * n + b) * n + c) * n + d) * n + e]; };
  auto gi = [&](int a, int b) { return v.gi[a * n + b]; };
  std::vector<double> up(n, 0.0);  // nabla^d phi
  for (int d = 0; d < n; ++d)
    for (int e = 0; e < n; ++e) up[d] += gi(d, e) * v.d1[e];
  // Ric_j^d
  std::vector<double> ricu(n * n, 0.0);
  for (int j = 0; j < n; ++j)
    for (int d = 0; d < n; ++d)
      for (int e = 0; e < n; ++e) ricu[j * n + d] += v.ric[j * n + e] * gi(e, d);
  // nabla_k Ric_jd - nabla^b R_bkjd
  std::vector<double> w(n * n * n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int d = 0; d < n; ++d) {
        double s = 0.0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) s += gi(a, b) * (dR(k, a, j, d, b) - dR(a, b, k, j, d));
        w[(k * n + j) * n + d] = s;
      }
  std::vector<double> out(n * n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      double rhs = v3 * v.d1[k] * v.d1[j] + v2 * H(k, j) + v.ddf[k * n + j];
      for (int d = 0; d < n; ++d) {
        rhs += w[(k * n + j) * n + d] * up[d];
        rhs += ricu[j * n + d] * H(k, d) + ricu[k * n + d] * H(d, j);
      }
      // -2 R^b_kj^d H_bd
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int c = 0; c < n; ++c)
            for (int d = 0; d < n; ++d) rhs -= 2.0 * gi(a, b) * gi(c, d) * R(a, k, j, c) * H(b, d);
      out[k * n + j] = rhs;
    }
  return out;
}
}  // namespace detail

Forcing manufacture_forcing(const MetricField& f, const ScalarSolution& phi, const Potential& v,
                            CosmologicalConstant lambda, std::span<const double> p, int order) {
  if (order < 2) throw DomainError("manufactured forcing needs jets of order >= 2");
  MetricField exact = f.with_backend(DiffBackend::analytic());
  ScalarSolution s{phi.phi, DiffBackend::analytic()};
  Local l = make_local(exact, s, p, order);
  const int n = l.n;
  const int so = order - 2;
  const JetLayout& lay = JetLayout::get(n, so);
  BasicTensor<Jet> ric = l.geo.ricci();
  Jet ph = l.dphi[0].data()[0];
  Jet vl = v.apply(0, ph).truncated(so) + lambda.value;
  Forcing out;
  out.stress = BasicTensor<Jet>(n, lower_slots(2), Jet(lay));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Jet s_ij = ric(i, j) - (l.dphi[1](i) * l.dphi[1](j)).truncated(so) - vl * l.geo.g[i * n + j].truncated(so);
      out.stress(i, j) = s_ij;
    }
  Jet lap = metric_trace01(l.dphi[2], l.geo).data()[0];
  out.scalar = lap - v.apply(1, ph).truncated(so);
  return out;
}

Residual einstein_residual(const MetricField& f, const ScalarSolution& phi, const Potential& v,
                           CosmologicalConstant lambda, std::span<const double> p, const ResidualOptions& opt) {
  Values val = make_values(make_local(f, phi, p, 2), opt.forcing);
  Residual r = finish(einstein_values(val, v, lambda.value));
  r.on_shell_defect = r.norm;
  r.off_shell = !(r.norm <= opt.on_shell_tol);
  return r;
}

Residual scalar_residual(const MetricField& f, const ScalarSolution& phi, const Potential& v,
                         std::span<const double> p, const ResidualOptions& opt) {
  Values val = make_values(make_local(f, phi, p, 2), opt.forcing);
  Tensor t(f.dim(), {});
  t.data()[0] = scalar_value(val, v);
  Residual r = finish(std::move(t));
  r.on_shell_defect = r.norm;
  r.off_shell = !(r.norm <= opt.on_shell_tol);
  return r;
}

Residual bianchi2_residual(const MetricField& f, std::span<const double> p) {
  const int n = f.dim();
  Values val = make_values(make_local(f, ScalarSolution::constant(0.0), p, 3), nullptr);
  Tensor out(n, lower_slots(5));
  auto dR = [&](int a, int b, int c, int d, int e) { return val.dR[(((a * n + b) * n + c) * n + d) * n + e]; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          for (int m = 0; m < n; ++m) out(i, j, k, l, m) = dR(i, j, k, l, m) + dR(j, k, i, l, m) + dR(k, i, j, l, m);
  return finish(std::move(out));
}

Residual contracted_bianchi_residual(const MetricField& f, const ScalarSolution& phi, const Potential& v,
                                     CosmologicalConstant lambda, std::span<const double> p,
                                     const ResidualOptions& opt) {
  const int n = f.dim();
  Values val = make_values(make_local(f, phi, p, 3), opt.forcing);
  std::vector<double> c = detail::divergence_on_shell(val, v);
  Tensor out(n, lower_slots(3));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int m = 0; m < n; ++m) {
        double lhs = 0.0;
        for (int i = 0; i < n; ++i)
          for (int a = 0; a < n; ++a) lhs += val.gi[i * n + a] * val.dR[(((a * n + j) * n + k) * n + i) * n + m];
        out(j, k, m) = lhs - c[(j * n + k) * n + m];
      }
  Residual r = finish(std::move(out));
  mark_shell(r, val, v, lambda.value, opt);
  return r;
}

Residual curvature_laplacian_residual(const MetricField& f, const ScalarSolution& phi, const Potential& v,
                                      CosmologicalConstant lambda, std::span<const double> p,
                                      const ResidualOptions& opt) {
  const int n = f.dim();
  Values val = make_values(make_local(f, phi, p, 4), opt.forcing);
  const std::vector<double> rhs = detail::curvature_laplacian_rhs(val, v);
  Tensor out(n, lower_slots(4));
  const std::size_t n4 = out.size();
  for (std::size_t o = 0; o < n4; ++o) {
    double lhs = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) lhs += val.gi[a * n + b] * val.ddR[(a * n + b) * n4 + o];
    out.data()[o] = lhs - rhs[o];
  }
  Residual r = finish(std::move(out));
  mark_shell(r, val, v, lambda.value, opt);
  return r;
}

Residual prolonged_scalar_residual_1(const MetricField& f, const ScalarSolution& phi, const Potential& v,
                                     CosmologicalConstant lambda, std::span<const double> p,
                                     const ResidualOptions& opt) {
  const int n = f.dim();
  Values val = make_values(make_local(f, phi, p, 3), opt.forcing);
  const std::vector<double> rhs = detail::prolonged_rhs_1(val, v);
  Tensor out(n, lower_slots(1));
  for (int j = 0; j < n; ++j) {
    double lhs = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) lhs += val.gi[a * n + b] * val.d3[(a * n + b) * n + j];
    out(j) = lhs - rhs[j];
  }
  Residual r = finish(std::move(out));
  mark_shell(r, val, v, lambda.value, opt);
  return r;
}

Residual prolonged_scalar_residual_2(const MetricField& f, const ScalarSolution& phi, const Potential& v,
                                     CosmologicalConstant lambda, std::span<const double> p,
                                     const ResidualOptions& opt) {
  const int n = f.dim();
  Values val = make_values(make_local(f, phi, p, 4), opt.forcing);
  const std::vector<double> rhs = detail::prolonged_rhs_2(val, v);
  Tensor out(n, lower_slots(2));
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      double lhs = 0.0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) lhs += val.gi[a * n + b] * val.d4[((a * n + b) * n + k) * n + j];
      out(k, j) = lhs - rhs[k * n + j];
    }
  Residual r = finish(std::move(out));
  mark_shell(r, val, v, lambda.value, opt);
  return r;
}

FrameForcing frame_forcing(const MetricField& f, const Forcing& forcing, const Frame& frame,
                           std::span<const double> p) {
  const int n = f.dim();
  Values val = make_values(make_local(f, ScalarSolution::constant(0.0), p, 3), &forcing);
  auto rotate = [&](const std::vector<double>& x, int rank) {
    Tensor t(n, lower_slots(rank));
    t.data() = x;
    return frame_components(t, frame).data();
  };
  FrameForcing out;
  out.dim = n;
  out.stress = rotate(val.S, 2);
  out.dstress = rotate(val.dS, 3);
  out.ddstress = rotate(val.ddS, 4);
  out.scalar = val.f0;
  out.dscalar = rotate(val.df, 1);
  out.ddscalar = rotate(val.ddf, 2);
  return out;
}

std::vector<ExactSolution> exact_solution_presets(int n) {
  if (n < 2) throw DomainError("exact solutions need dimension >= 2");
  std::vector<ExactSolution> out;
  Point p(n, 0.0);
  for (int a = 0; a < n; ++a) p[a] = 0.1 * (a + 1) / n;
  out.push_back({"flat_vacuum", MetricField::euclidean(n), ScalarSolution::constant(0.0), Potential::zero(),
                 CosmologicalConstant(0.0), p});
  out.push_back({"sphere_massive_field", MetricField::constant_curvature(n, 1.0), ScalarSolution::constant(0.0),
                 Potential::quadratic(1.0), CosmologicalConstant(n - 1.0), p});
  const double v0 = 0.3;
  out.push_back({"hyperbolic_constant_field", MetricField::constant_curvature(n, -1.0), ScalarSolution::constant(0.7),
                 Potential::constant(v0), CosmologicalConstant(-(n - 1.0) - v0), p});
  if (n >= 3) {
    // R x H^{n-1} with the field linear along the line factor.
    const double c = 0.8;
    const double kappa = c * c / (n - 2);
    FieldFn g = [n, kappa](std::span<const Jet> x) {
      const JetLayout& l = x[0].layout();
      Jet rho2(l, 0.0);
      for (int a = 1; a < n; ++a) rho2 += x[a] * x[a];
      Jet w = pow(1.0 - 0.25 * kappa * rho2, -2.0);
      std::vector<Jet> out(n * n, Jet(l));
      out[0] = Jet(l, 1.0);
      for (int a = 1; a < n; ++a) out[a * n + a] = w;
      return out;
    };
    auto domain = [n, kappa](std::span<const double> x) {
      double r2 = 0.0;
      for (int a = 1; a < n; ++a) r2 += x[a] * x[a];
      return r2 < 4.0 / kappa;
    };
    ScalarSolution field{[c](std::span<const Jet> x) { return c * x[0]; }, DiffBackend::analytic()};
    out.push_back({"product_linear_field", MetricField(n, g, MetricPreset::custom, domain), field,
                   Potential::constant(v0), CosmologicalConstant(-c * c - v0), p});
  }
  return out;
}

}  // namespace uc
