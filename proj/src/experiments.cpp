#include "uc/experiments.hpp"

#include "uc/error.hpp"
#include "uc/parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace uc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using JetOp = std::function<Jet(std::span<const Jet> vars, const Jet& u, int order)>;

double norm_of(std::span<const Jet> x) {
  double s = 0.0;
  for (const Jet& c : x) s += c.value() * c.value();
  return std::sqrt(s);
}

Jet laplacian_of(const Jet& u) {
  Jet out = u.derivative(0).derivative(0);
  for (int a = 1; a < u.nvars(); ++a) out += u.derivative(a).derivative(a);
  return out;
}

// x . grad u / r at order `order`; zero at the origin.
Jet radial_derivative_of(std::span<const Jet> vars, const Jet& u, int order) {
  const JetLayout& l = JetLayout::get(u.nvars(), order);
  if (norm_of(vars) == 0.0) return Jet(l, 0.0);
  Jet s = vars[0].truncated(order) * vars[0].truncated(order);
  Jet dot = vars[0].truncated(order) * u.derivative(0).truncated(order);
  for (int a = 1; a < u.nvars(); ++a) {
    s += vars[a].truncated(order) * vars[a].truncated(order);
    dot += vars[a].truncated(order) * u.derivative(a).truncated(order);
  }
  return dot / sqrt(s);
}

// A field built from derivatives of u: evaluates u on fresh variables of
// higher order at the base point and composes the result with x.
ScalarFn derived(ScalarFn u, int extra, JetOp op) {
  return [u = std::move(u), extra, op = std::move(op)](std::span<const Jet> x) {
    const int order = x[0].order();
    std::vector<double> p(x.size());
    for (std::size_t a = 0; a < x.size(); ++a) p[a] = x[a].value();
    std::vector<Jet> vars = variables(p, order + extra);
    Jet poly = op(vars, u(vars), order);
    return compose(poly, x);
  };
}

TestFunction as_test_function(std::string name, ScalarFn fn) {
  TestFunction t;
  t.name = std::move(name);
  t.fn = std::move(fn);
  t.support_radius = 2.0;
  return t;
}

double hat_big(const CarlemanParams& cp) { return hat_r(cp.R, cp.delta); }

WeightedNormOptions options(const CarlemanParams& cp, double exponent, double extra = 0.0) {
  WeightedNormOptions o;
  o.delta = cp.delta;
  o.exponent = exponent;
  o.extra_power = extra;
  return o;
}

double log_sum(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -kInf) return a;
  return a + std::log1p(std::exp(b - a));
}

VanishingOrder fit_order(std::vector<double> radii, std::vector<double> sup, double floor) {
  VanishingOrder out;
  out.radii = radii;
  out.sup = sup;
  std::vector<double> lx, ly;
  double smallest_nonzero = kInf, largest_zero = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (sup[i] > floor) {
      lx.push_back(std::log(radii[i]));
      ly.push_back(std::log(sup[i]));
      smallest_nonzero = std::min(smallest_nonzero, radii[i]);
    } else {
      largest_zero = std::max(largest_zero, radii[i]);
    }
  }
  if (lx.empty()) {
    out.all_zero = true;
    out.infinite = true;
    out.slope = kVanishingOrderCap;
    return out;
  }
  if (lx.size() == 1) {
    out.slope = largest_zero > 0.0 ? kVanishingOrderCap : 0.0;
  } else {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      mx += lx[i] / lx.size();
      my += ly[i] / ly.size();
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxy += (lx[i] - mx) * (ly[i] - my);
      sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    out.slope = sxy / sxx;
  }
  // Zero below a nonzero radius: decay faster than any sampled power.
  if (largest_zero > 0.0 && largest_zero < smallest_nonzero) out.slope = std::max(out.slope, kVanishingOrderCap);
  out.infinite = out.slope >= kVanishingOrderCap;
  return out;
}

double sup_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

ModelPair manufactured_pair(std::string name, ScalarFn u, std::optional<int> vanishing_order,
                            const ModelCoefficients& c) {
  if (c.v == 0.0) throw ConfigError("the v coefficient of the model system must be nonzero");
  ModelPair p;
  p.name = std::move(name);
  p.u = u;
  p.vanishing_order = vanishing_order;
  p.v = derived(std::move(u), 2, [c](std::span<const Jet> vars, const Jet& U, int order) {
    Jet lap = laplacian_of(U);
    return (lap - c.u * U.truncated(order) - c.grad * radial_derivative_of(vars, U, order)) / c.v;
  });
  return p;
}

ModelPair zero_pair() {
  ModelPair p;
  p.name = "zero";
  p.u = [](std::span<const Jet> x) { return Jet(x[0].layout(), 0.0); };
  p.v = p.u;
  return p;
}

std::vector<ModelPair> model_corpus() {
  ScalarFn e = [](std::span<const Jet> x) {
    if (norm_of(x) == 0.0) return Jet(x[0].layout(), 0.0);
    Jet s = x[0] * x[0];
    for (std::size_t a = 1; a < x.size(); ++a) s += x[a] * x[a];
    return exp(-1.0 * reciprocal(sqrt(s)));
  };
  ScalarFn r5 = [](std::span<const Jet> x) {
    if (norm_of(x) == 0.0) return Jet(x[0].layout(), 0.0);
    Jet s = x[0] * x[0];
    for (std::size_t a = 1; a < x.size(); ++a) s += x[a] * x[a];
    return pow(s, 2.5);
  };
  return {manufactured_pair("exp1", e, std::nullopt), manufactured_pair("r5", r5, 5)};
}

std::vector<double> default_vanishing_radii() {
  std::vector<double> r;
  for (int j = 0; j <= 10; ++j) r.push_back(0.1 * std::ldexp(1.0, -j));
  return r;
}

VanishingOrder vanishing_order_estimate(const std::function<double(std::span<const double>)>& field,
                                        std::span<const double> p0, std::span<const double> radii, double floor,
                                        int sphere_order) {
  const int n = static_cast<int>(p0.size());
  if (radii.size() < 2) throw DomainError("the order estimate needs at least two radii");
  QuadratureGrid g = QuadratureGrid::ball(n, 0.5, 0, 4, sphere_order);
  std::vector<double> sup;
  Point x(n);
  for (double r : radii) {
    if (!(r > 0.0)) throw DomainError("radii must be positive");
    double m = 0.0;
    for (const auto& [w, weight] : g.sphere()) {
      for (int a = 0; a < n; ++a) x[a] = p0[a] + r * w[a];
      m = std::max(m, std::abs(field(x)));
    }
    sup.push_back(m);
  }
  return fit_order(std::vector<double>(radii.begin(), radii.end()), sup, floor);
}

bool verify_declared_order(const ModelPair& pair, int n) {
  const Point origin(n, 0.0);
  const auto radii = default_vanishing_radii();
  auto field = [&](std::span<const double> x) {
    return taylor_expand(pair.u, x, 0, DiffBackend::analytic()).value();
  };
  VanishingOrder o = vanishing_order_estimate(field, origin, radii);
  if (!pair.vanishing_order) return o.infinite;
  return o.infinite || o.slope >= *pair.vanishing_order - 0.5;
}

ModelResiduals model_residuals(const ModelPair& pair, const QuadratureGrid& grid, const ModelCoefficients& c,
                               double budget) {
  FieldSamples su = sample(as_test_function("u", pair.u), grid);
  FieldSamples sv = sample(as_test_function("v", pair.v), grid);
  ModelResiduals out;
  const std::size_t m = grid.size();
  out.res_u.resize(m);
  out.res_v.resize(m);
  out.slack_u.resize(m);
  out.slack_v.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double lower = c.u * su.u[i] + c.grad * su.radial[i];
    out.res_u[i] = std::abs(su.laplacian[i] - (lower + c.v * sv.u[i]));
    out.res_v[i] = std::abs(sv.y[i] - (lower + c.v * sv.u[i]));
    const double size = std::abs(su.u[i]) + su.grad_norm[i] + std::abs(sv.u[i]);
    out.slack_u[i] = std::max(0.0, std::abs(su.laplacian[i]) - budget * size);
    out.slack_v[i] = std::max(0.0, std::abs(sv.y[i]) - budget * size);
    out.max_res_u = std::max(out.max_res_u, out.res_u[i]);
    out.max_res_v = std::max(out.max_res_v, out.res_v[i]);
    out.max_slack_u = std::max(out.max_slack_u, out.slack_u[i]);
    out.max_slack_v = std::max(out.max_slack_v, out.slack_v[i]);
  }
  return out;
}

CutoffPair assemble_cutoff_pair(const ModelPair& pair, int k, double R) {
  if (k < 0) throw DomainError("cutoff index must be nonnegative");
  const Bump phi(R);
  CutoffPair out;
  out.k = k;
  out.R = R;
  ScalarFn u = pair.u, v = pair.v;
  out.uk = [phi, k, u](std::span<const Jet> x) { return cutoff_chi(phi, k, x) * phi(x) * u(x); };
  out.vphi = [phi, v](std::span<const Jet> x) { return phi(x) * v(x); };
  out.phi_u = [phi, u](std::span<const Jet> x) { return phi(x) * u(x); };
  out.leibniz = [phi, k, u](std::span<const Jet> x) {
    const int order = x[0].order();
    std::vector<double> p(x.size());
    for (std::size_t a = 0; a < x.size(); ++a) p[a] = x[a].value();
    std::vector<Jet> vars = variables(p, order + 2);
    Jet U = u(vars);
    Jet chi = cutoff_chi(phi, k, vars);
    Jet out = U.truncated(order) * laplacian_of(chi);
    for (std::size_t a = 0; a < vars.size(); ++a) {
      out += 2.0 * (chi.derivative(static_cast<int>(a)).truncated(order) *
                    U.derivative(static_cast<int>(a)).truncated(order));
    }
    return compose(out, x);
  };
  return out;
}

double bump_c2_norm(const Bump& phi, int n) {
  double m = 1.0;
  std::vector<double> p(n, 0.0);
  const int steps = 4000;
  for (int i = 1; i < steps; ++i) {
    const double rho = phi.inner() + (1.0 - phi.inner()) * i / steps;
    for (int dir = 0; dir < 2; ++dir) {
      std::fill(p.begin(), p.end(), 0.0);
      if (dir == 0) {
        p[0] = rho;
      } else {
        p[0] = p[1] = rho / std::sqrt(2.0);
      }
      Jet j = phi(variables(p, 2));
      for (std::size_t c = 1; c < j.size(); ++c) {
        m = std::max(m, std::abs(j[c]) * j.layout().factorial_weight(c));
      }
    }
  }
  return m;
}

namespace {

// log of R^-l 2^{(l+2)k} ||phi||_C2 ||u||_{W^{1,p}(B_{2^-k})}
double leibniz_log(const FieldSamples& s, const QuadratureGrid& g, double lambda, int k, double R, double c2,
                   double p) {
  WeightedNormOptions o;
  o.exponent = p;
  o.core_fraction = 1.0;
  const double w = log_sum(log_weighted_norm(s.u, g, CarlemanLambda(0.0), o),
                           log_weighted_norm(s.grad_norm, g, CarlemanLambda(0.0), o));
  if (w == -kInf) return -kInf;
  return -lambda * std::log(R) + (lambda + 2.0) * k * std::log(2.0) + std::log(c2) + w;
}

}  // namespace

SweepReport chain_report(const ModelPair& pair, std::span<const double> lambdas, const CarlemanParams& cp,
                         const ChainOptions& opt) {
  cp.validate();
  const int n = cp.n;
  for (double l : lambdas) {
    if (!(l > n)) throw DomainError(fmt::format("chain sweep needs lambda > n, got {}", l));
    if (!lambda_admissible(l, n)) throw DomainError(fmt::format("lambda = {} is not admissible", l));
  }
  const double R = cp.R;
  if (std::ldexp(1.0, -opt.k) >= R) throw DomainError("cutoff index too small: need 2^-k < R");
  const LebesgueExponents pq = lebesgue_exponents(n);
  CutoffPair cut = assemble_cutoff_pair(pair, opt.k, R);
  const Bump phi(R);
  const int k = opt.k;
  ScalarFn u = pair.u, v = pair.v;
  ScalarFn chi = [phi, k](std::span<const Jet> x) { return cutoff_chi(phi, k, x); };

  const int sphere = 4;
  const int levels = std::max(k + 3, 12);
  QuadratureGrid ball = QuadratureGrid::ball(n, R, levels, 16, sphere);
  QuadratureGrid outer = QuadratureGrid::annulus(n, R, 1.0 - 1e-9, 16, 16, sphere);
  QuadratureGrid small = QuadratureGrid::ball(n, std::ldexp(1.0, -k), 8, 16, sphere);

  FieldSamples s_uk = sample(as_test_function("uk", cut.uk), ball);
  FieldSamples s_u = sample(as_test_function("u", u), ball);
  FieldSamples s_v = sample(as_test_function("v", v), ball);
  FieldSamples s_small = sample(as_test_function("u", u), small);
  FieldSamples s_phiu = sample(as_test_function("phi_u", cut.phi_u), outer);
  FieldSamples s_phiv = sample(as_test_function("phi_v", cut.vphi), outer);
  std::vector<double> chi_u(ball.size()), chi_grad(ball.size()), chi_v(ball.size());
  for (std::size_t i = 0; i < ball.size(); ++i) {
    const double c = cutoff_chi(phi, k, ball.point(i));
    chi_u[i] = c * s_u.u[i];
    chi_grad[i] = c * s_u.grad_norm[i];
    chi_v[i] = c * s_v.u[i];
  }
  const double c2 = bump_c2_norm(phi, n);
  const double vol = ball_volume(n, R);
  const double holder_c = std::pow(vol, 2.0 / n) / (R * R);
  const double holder_c2 = std::pow(vol, (pq.q - 2.0) / (2.0 * pq.q)) / R;
  const double C = opt.carleman_constant;
  const double lR = std::log(hat_big(cp));

  SweepReport rep;
  rep.pair = pair.name;
  rep.params = cp;
  rep.options = opt;
  rep.grid = fmt::format("ball levels={} radial=16 sphere={} outer=annulus({}, 1) k={}", levels, sphere, R, k);
  rep.rows.resize(lambdas.size());
  const WeightedNormOptions oq = options(cp, pq.q), op = options(cp, pq.p), o2 = options(cp, 2.0);
  const WeightedNormOptions oqg = options(cp, pq.q, -1.0 + 0.5 * cp.delta);
  WeightedNormOptions op_out = op, o2_out = o2;
  op_out.core_fraction = o2_out.core_fraction = 1.0;
  parallel_for(lambdas.size(), opt.jobs, [&](std::size_t i) {
    SweepRow& row = rep.rows[i];
    const double l = lambdas[i];
    const CarlemanLambda lam(l);
    row.lambda = l;
    const double lp = std::pow(l, 1.0 / n);
    row.uk_q = weighted_norm(s_uk.u, ball, lam, oq);
    row.uk_grad_q = lp * weighted_norm(s_uk.grad_norm, ball, lam, oqg);
    row.lap_uk_p = weighted_norm(s_uk.laplacian, ball, lam, op);
    row.lap_phi_u_out = weighted_norm(s_phiu.laplacian, outer, lam, op_out);
    row.leibniz_bound = std::exp(leibniz_log(s_small, small, l, k, R, c2, pq.p));
    row.chi_u_q = weighted_norm(chi_u, ball, lam, oq);
    row.chi_grad_q = weighted_norm(chi_grad, ball, lam, oq);
    row.chi_v_2 = weighted_norm(chi_v, ball, lam, o2);
    const double lv = log_weighted_norm(s_v.u, ball, lam, o2);
    const double lu = log_weighted_norm(s_u.u, ball, lam, oq);
    const double lg = log_weighted_norm(s_u.grad_norm, ball, lam, oq);
    const double lgw = std::log(lp) + log_weighted_norm(s_u.grad_norm, ball, lam, oqg);
    row.v_2 = std::exp(lv);
    row.lambda_v_2 = l * row.v_2;
    row.u_q = std::exp(lu);
    row.grad_q = std::exp(lg);
    row.y_phi_v_out = weighted_norm(s_phiv.y, outer, lam, o2_out);
    row.coef_r2 = C * holder_c * R * R;
    row.coef_r = C * holder_c2 * R;
    row.coef_lambda = C / l;
    row.absorbed_r2 = row.coef_r2 < 0.5;
    row.absorbed_r = row.coef_r < 0.5;
    row.absorbed_lambda = row.coef_lambda < 0.5;
    const double lhs = log_sum(log_sum(lu, lgw), std::log(l) + lv);
    row.final_constant = lhs == -kInf ? 0.0 : std::exp(l * lR + lhs);
    row.bounded_u = lu == -kInf ? 0.0 : std::exp(l * lR + lu);
  });
  double lo = kInf, hi = 0.0;
  for (const auto& row : rep.rows) {
    rep.absorption_consistent = rep.absorption_consistent && row.absorbed_r2 == (row.coef_r2 < 0.5) &&
                                row.absorbed_r == (row.coef_r < 0.5) &&
                                row.absorbed_lambda == (row.coef_lambda < 0.5);
    if (row.final_constant > 0.0) {
      lo = std::min(lo, row.final_constant);
      hi = std::max(hi, row.final_constant);
    }
  }
  rep.final_constant_spread = hi > 0.0 ? hi / lo : 1.0;
  return rep;
}

BoundedQuantity bounded_quantity(const ScalarFn& u, CarlemanLambda lambda, const CarlemanParams& cp) {
  const LebesgueExponents pq = lebesgue_exponents(cp.n);
  TestFunction tf = as_test_function("u", u);
  tf.radial = false;
  const int max_levels = 40;
  const int levels = levels_for(tf, cp, lambda, 1e-3, 4, max_levels, pq.q);
  QuadratureGrid g = QuadratureGrid::ball(cp.n, cp.R, levels, 16, 4);
  FieldSamples s = sample(tf, g);
  BoundedQuantity out;
  try {
    const double l = log_weighted_norm(s.u, g, lambda, options(cp, pq.q));
    out.value = l == -kInf ? 0.0 : std::exp(lambda.value * std::log(hat_big(cp)) + l);
  } catch (const NumericalError&) {
    out.divergent = true;
    out.value = kInf;
  }
  return out;
}

ContrastReport mechanism_contrast(const std::vector<TestFunction>& corpus, std::span<const double> lambdas,
                                  const CarlemanParams& cp, int jobs) {
  if (lambdas.empty()) throw DomainError("empty lambda sweep");
  ContrastReport rep;
  rep.lambdas.assign(lambdas.begin(), lambdas.end());
  const std::size_t nf = corpus.size(), nl = lambdas.size();
  rep.values.assign(nf, std::vector<BoundedQuantity>(nl));
  parallel_for(nf * nl, jobs, [&](std::size_t t) {
    const std::size_t f = t / nl, l = t % nl;
    rep.values[f][l] = bounded_quantity(corpus[f].fn, CarlemanLambda(lambdas[l]), cp);
  });
  bool any_inf = false, any_fin = false;
  rep.infinite_order_bounded = true;
  rep.finite_order_diverges = true;
  for (std::size_t f = 0; f < nf; ++f) {
    rep.names.push_back(corpus[f].name);
    rep.orders.push_back(corpus[f].vanishing_order);
    const auto& first = rep.values[f].front();
    const auto& last = rep.values[f].back();
    double growth;
    if (last.divergent) {
      growth = kInf;
    } else if (first.value == 0.0) {
      growth = last.value == 0.0 ? 1.0 : kInf;
    } else {
      growth = last.value / first.value;
    }
    rep.growth.push_back(growth);
    if (corpus[f].vanishing_order) {
      any_fin = true;
      rep.finite_order_diverges = rep.finite_order_diverges && growth >= 1e3;
    } else {
      any_inf = true;
      rep.infinite_order_bounded = rep.infinite_order_bounded && growth <= 2.0 && growth >= 0.5;
    }
  }
  if (!any_inf) rep.infinite_order_bounded = false;
  if (!any_fin) rep.finite_order_diverges = false;
  rep.separated = any_inf && any_fin;
  for (std::size_t a = 0; a < nf; ++a) {
    if (corpus[a].vanishing_order) continue;
    for (std::size_t b = 0; b < nf; ++b) {
      if (!corpus[b].vanishing_order) continue;
      for (std::size_t l = 0; l < nl; ++l) {
        if (lambdas[l] < 2.0 * *corpus[b].vanishing_order) continue;
        rep.separated = rep.separated && rep.values[a][l].value < rep.values[b][l].value;
      }
    }
  }
  return rep;
}

DecayReport leibniz_decay(const ScalarFn& u, CarlemanLambda lambda, const CarlemanParams& cp,
                          std::span<const int> ks) {
  const LebesgueExponents pq = lebesgue_exponents(cp.n);
  const double c2 = bump_c2_norm(Bump(cp.R), cp.n);
  DecayReport rep;
  for (int k : ks) {
    QuadratureGrid g = QuadratureGrid::ball(cp.n, std::ldexp(1.0, -k), 8, 16, 4);
    FieldSamples s = sample(as_test_function("u", u), g);
    const double l = leibniz_log(s, g, lambda.value, k, cp.R, c2, pq.p);
    rep.ks.push_back(k);
    rep.values.push_back(l == -kInf ? 0.0 : std::exp(l));
  }
  rep.monotone = rep.values.size() >= 2 && rep.values.back() < rep.values.front();
  for (std::size_t i = 1; i < rep.values.size(); ++i) rep.monotone = rep.monotone && rep.values[i] <= rep.values[i - 1];
  return rep;
}

SolutionSpec sphere_solution(int n, double k, Point base) {
  if (!(k > 0.0)) throw DomainError("sphere solution needs K > 0");
  return {fmt::format("sphere_K{}", k), MetricField::constant_curvature(n, k), ScalarSolution::constant(0.0),
          Potential::quadratic(1.0), CosmologicalConstant((n - 1) * k), std::move(base), {}};
}

SolutionSpec rotated(const SolutionSpec& s, const std::vector<double>& q) {
  const int n = s.metric.dim();
  if (static_cast<int>(q.size()) != n * n) throw ShapeError("rotation size mismatch");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double d = 0.0;
      for (int a = 0; a < n; ++a) d += q[a * n + i] * q[a * n + j];
      if (std::abs(d - (i == j)) > 1e-12) throw DomainError("rotation matrix is not orthogonal");
    }
  SolutionSpec out = s;
  out.name = s.name + "_rotated";
  out.metric = s.metric.pulled_back(q);
  ScalarFn phi = s.field.phi;
  out.field.phi = [phi, q, n](std::span<const Jet> y) {
    std::vector<Jet> x(n, Jet(y[0].layout()));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) x[a].axpy(q[a * n + b], y[b]);
    return phi(x);
  };
  // Q^T maps points and vectors of the original chart to the new one.
  auto back = [&](std::span<const double> v) {
    std::vector<double> w(n, 0.0);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) w[a] += q[b * n + a] * v[b];
    return w;
  };
  out.base = back(s.base);
  const Frame e = s.frame.empty() ? gram_schmidt_frame(s.metric, s.base) : s.frame;
  out.frame.clear();
  for (const auto& ei : e) out.frame.push_back(back(ei));
  return out;
}

namespace {

void check_on_shell(const SolutionSpec& s, double tol) {
  const double e = einstein_residual(s.metric, s.field, s.potential, s.lambda, s.base).norm;
  const double f = scalar_residual(s.metric, s.field, s.potential, s.base).norm;
  if (e > tol || f > tol) {
    throw DomainError(fmt::format("solution '{}' is off shell at its base point (einstein {:.3g}, scalar {:.3g})",
                                  s.name, e, f));
  }
}

struct RaySamples {
  std::vector<std::vector<double>> u, du, lap, v, yv;
};

}  // namespace

DifferenceReport difference_pipeline(const SolutionSpec& a, const SolutionSpec& b, const DifferenceOptions& opt) {
  const int n = a.metric.dim();
  if (b.metric.dim() != n) throw ShapeError("solutions live in different dimensions");
  if (opt.require_on_shell) {
    check_on_shell(a, opt.on_shell_tol);
    check_on_shell(b, opt.on_shell_tol);
  }
  const NormalChart ca(a.metric, a.base, a.frame), cb(b.metric, b.base, b.frame);

  QuadratureGrid grid = QuadratureGrid::ball(n, opt.radius, opt.levels, opt.radial_nodes, opt.sphere_order);
  std::vector<double> radii;
  for (const auto& [r, w] : grid.radial()) radii.push_back(r);
  std::sort(radii.begin(), radii.end());
  std::vector<double> order_radii;
  for (int j = 0; j <= 6; ++j) order_radii.push_back(0.1 * std::ldexp(1.0, -j));
  std::sort(order_radii.begin(), order_radii.end());
  const double eps = 1e-4;
  // Every radius used: grid radii with their +-eps neighbours, then the order radii.
  std::vector<double> all;
  for (double r : radii) {
    all.push_back(r * (1.0 - eps));
    all.push_back(r);
    all.push_back(r * (1.0 + eps));
  }
  all.insert(all.end(), order_radii.begin(), order_radii.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  auto index_of = [&](double r) {
    return static_cast<std::size_t>(std::lower_bound(all.begin(), all.end(), r) - all.begin());
  };

  const auto& dirs = grid.sphere();
  const std::size_t nd = dirs.size(), nr = radii.size();
  DifferenceReport rep;
  rep.a = a.name;
  rep.b = b.name;
  rep.points = nd * nr;
  const std::size_t usize = CurvatureState(n).size();
  const std::size_t vsize = FrameState(n).packed_size();
  rep.du.assign(nd * nr * usize, 0.0);
  rep.dv.assign(nd * nr * vsize, 0.0);
  std::vector<double> pde(nd, 0.0), ode(nd, 0.0);
  std::vector<std::vector<double>> sup_order(nd, std::vector<double>(order_radii.size(), 0.0));
  std::vector<std::vector<double>> block_u(nd, std::vector<double>(4, 0.0));
  std::vector<std::vector<double>> block_v(nd, std::vector<double>(FrameState::kBlocks, 0.0));

  parallel_for(nd, opt.jobs, [&](std::size_t d) {
    const auto& w = dirs[d].first;
    const auto fa = integrate_frame(ca, w, all);
    const auto fb = integrate_frame(cb, w, all);
    auto packed = [&](const FrameState& s) {
      std::vector<double> v(vsize);
      s.pack(v);
      return v;
    };
    auto dv_at = [&](std::size_t i) {
      std::vector<double> va = packed(fa[i].state), vb = packed(fb[i].state);
      for (std::size_t c = 0; c < vsize; ++c) va[c] -= vb[c];
      return va;
    };
    for (std::size_t j = 0; j < nr; ++j) {
      const double r = radii[j];
      const auto sa = frame_field_sample(ca, a.field, w, r, 2);
      const auto sb = frame_field_sample(cb, b.field, w, r, 2);
      std::vector<double> du = sa.u.flatten(), ub = sb.u.flatten();
      for (std::size_t c = 0; c < usize; ++c) du[c] -= ub[c];
      std::vector<double> lap = sa.laplacian.flatten(), lb = sb.laplacian.flatten();
      for (std::size_t c = 0; c < usize; ++c) lap[c] -= lb[c];
      double dgrad = 0.0;
      auto blocks_a = {&sa.du.riemann, &sa.du.phi, &sa.du.grad, &sa.du.hess};
      auto blocks_b = {&sb.du.riemann, &sb.du.phi, &sb.du.grad, &sb.du.hess};
      for (auto ia = blocks_a.begin(), ib = blocks_b.begin(); ia != blocks_a.end(); ++ia, ++ib) {
        for (std::size_t c = 0; c < (*ia)->size(); ++c) dgrad = std::max(dgrad, std::abs((**ia)[c] - (**ib)[c]));
      }
      const std::size_t i0 = index_of(r * (1.0 - eps)), i1 = index_of(r), i2 = index_of(r * (1.0 + eps));
      const std::vector<double> dv = dv_at(i1), dm = dv_at(i0), dp = dv_at(i2);
      double ydv = 0.0;
      for (std::size_t c = 0; c < vsize; ++c) ydv = std::max(ydv, std::abs(r * (dp[c] - dm[c]) / (all[i2] - all[i0])));

      std::copy(du.begin(), du.end(), rep.du.begin() + (d * nr + j) * usize);
      std::copy(dv.begin(), dv.end(), rep.dv.begin() + (d * nr + j) * vsize);
      const std::size_t nr4 = static_cast<std::size_t>(n * n * n * n);
      const std::size_t offs[5] = {0, nr4, nr4 + 1, nr4 + 1 + n, usize};
      for (int blk = 0; blk < 4; ++blk) {
        for (std::size_t c = offs[blk]; c < offs[blk + 1]; ++c) {
          block_u[d][blk] = std::max(block_u[d][blk], std::abs(du[c]));
        }
      }
      const auto dev = block_deviation(fa[i1].state, fb[i1].state);
      for (int blk = 0; blk < FrameState::kBlocks; ++blk) block_v[d][blk] = std::max(block_v[d][blk], dev[blk]);
      const double size = sup_abs(du) + dgrad + sup_abs(dv);
      if (size > opt.noise_floor) {
        pde[d] = std::max(pde[d], sup_abs(lap) / size);
        ode[d] = std::max(ode[d], ydv / size);
      }
    }
    for (std::size_t j = 0; j < order_radii.size(); ++j) {
      const double r = order_radii[j];
      const auto sa = frame_field_sample(ca, a.field, w, r, 1);
      const auto sb = frame_field_sample(cb, b.field, w, r, 1);
      std::vector<double> du = sa.u.flatten(), ub = sb.u.flatten();
      for (std::size_t c = 0; c < usize; ++c) du[c] -= ub[c];
      sup_order[d][j] = std::max(sup_abs(du), sup_abs(dv_at(index_of(r))));
    }
  });

  rep.max_du_block.assign(4, 0.0);
  rep.max_dv_block.assign(FrameState::kBlocks, 0.0);
  for (std::size_t d = 0; d < nd; ++d) {
    for (int blk = 0; blk < 4; ++blk) rep.max_du_block[blk] = std::max(rep.max_du_block[blk], block_u[d][blk]);
    for (int blk = 0; blk < FrameState::kBlocks; ++blk) {
      rep.max_dv_block[blk] = std::max(rep.max_dv_block[blk], block_v[d][blk]);
    }
    rep.measured_constant_pde = std::max(rep.measured_constant_pde, pde[d]);
    rep.measured_constant_ode = std::max(rep.measured_constant_ode, ode[d]);
  }
  rep.max_du = sup_abs(rep.max_du_block);
  rep.max_dv = sup_abs(rep.max_dv_block);

  const CurvatureState ua = assemble_u(a.metric, a.field, ca.frame(), a.base);
  const CurvatureState ub = assemble_u(b.metric, b.field, cb.frame(), b.base);
  rep.riemann_difference_at_base.resize(ua.riemann.size());
  for (std::size_t c = 0; c < ua.riemann.size(); ++c) rep.riemann_difference_at_base[c] = ua.riemann[c] - ub.riemann[c];

  std::vector<double> sup(order_radii.size(), 0.0);
  for (std::size_t j = 0; j < order_radii.size(); ++j) {
    for (std::size_t d = 0; d < nd; ++d) sup[j] = std::max(sup[j], sup_order[d][j]);
  }
  rep.order = fit_order(order_radii, sup, opt.noise_floor);
  const std::vector<double> base_u = [&] {
    std::vector<double> x = ua.flatten(), y = ub.flatten();
    for (std::size_t c = 0; c < x.size(); ++c) x[c] -= y[c];
    return x;
  }();
  if (sup_abs(base_u) > opt.noise_floor) {
    rep.first_disagreement_order = 0;
  } else if (!rep.order.infinite) {
    const int k = static_cast<int>(std::lround(rep.order.slope));
    if (k <= opt.checked_order) rep.first_disagreement_order = std::max(0, k);
  }
  rep.hypothesis_holds = rep.first_disagreement_order < 0;
  return rep;
}

}  // namespace uc
