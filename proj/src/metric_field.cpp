#include "uc/metric_field.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <random>

namespace uc {

namespace {


std::vector<Jet> taylor_fd(const FieldFn& fn, std::span<const double> p, int order, const DiffBackend& b) {
  const int n = static_cast<int>(p.size());
  const JetLayout& layout = JetLayout::get(n, order);
  const JetLayout& scalar = JetLayout::get(n, 0);
  std::map<std::vector<int>, std::vector<double>> cache;
  auto eval = [&](double h, const std::vector<int>& m) -> const std::vector<double>& {
    std::vector<int> key(m);
    key.push_back(h == b.h ? 0 : 1);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<Jet> x;
    x.reserve(n);
    for (int i = 0; i < n; ++i) x.emplace_back(scalar, p[i] + h * m[i]);
    std::vector<Jet> out = fn(x);
    std::vector<double> vals(out.size());
    for (std::size_t k = 0; k < out.size(); ++k) vals[k] = out[k].value();
    return cache.emplace(std::move(key), std::move(vals)).first->second;
  };
  const std::vector<double>& f0 = eval(b.h, std::vector<int>(n, 0));
  std::vector<Jet> res(f0.size(), Jet(layout));
  for (std::size_t k = 0; k < f0.size(); ++k) res[k][0] = f0[k];
  for (std::size_t m = 1; m < layout.size(); ++m) {
    const int d = layout.degree(m);
    const double h = d <= 2 ? b.h : b.h_high;
    std::vector<int> vars;
    for (int v = 0; v < n; ++v) {
      for (int c = 0; c < layout.exponents(m)[v]; ++c) vars.push_back(v);
    }
    std::vector<double> acc(f0.size(), 0.0);
    for (int mask = 0; mask < (1 << d); ++mask) {
      std::vector<int> off(n, 0);
      double sign = 1.0;
      for (int i = 0; i < d; ++i) {
        const int s = (mask >> i) & 1 ? -1 : 1;
        off[vars[i]] += s;
        sign *= s;
      }
      const std::vector<double>& f = eval(h, off);
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += sign * f[k];
    }
    const double scale = 1.0 / (std::pow(2.0 * h, d) * layout.factorial_weight(m));
    for (std::size_t k = 0; k < acc.size(); ++k) res[k][m] = acc[k] * scale;
  }
  return res;
}

}  // namespace

std::vector<Jet> taylor_expand(const FieldFn& fn, std::span<const double> p, int order, const DiffBackend& backend) {
  if (backend.is_analytic()) {
    std::vector<Jet> x = variables(p, order);
    return fn(x);
  }
  return taylor_fd(fn, p, order, backend);
}

Jet taylor_expand(const ScalarFn& fn, std::span<const double> p, int order, const DiffBackend& backend) {
  FieldFn wrapped = [&fn](std::span<const Jet> x) { return std::vector<Jet>{fn(x)}; };
  return taylor_expand(wrapped, p, order, backend).front();
}

std::vector<Jet> evaluate_on_jets(const FieldFn& fn, std::span<const Jet> y, const DiffBackend& backend) {
  if (backend.is_analytic()) return fn(y);
  std::vector<double> y0(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) y0[i] = y[i].value();
  std::vector<Jet> local = taylor_fd(fn, y0, y.front().order(), backend);
  return compose(local, y);
}

std::string to_string(MetricPreset p) {
  switch (p) {
    case MetricPreset::euclidean: return "euclidean";
    case MetricPreset::sphere: return "sphere";
    case MetricPreset::hyperbolic: return "hyperbolic";
    case MetricPreset::custom: return "custom";
  }
  return "custom";
}

MetricField::MetricField(int dim, FieldFn g, MetricPreset preset, std::function<bool(std::span<const double>)> domain)
    : dim_(dim),
      g_(std::move(g)),
      preset_(preset),
      domain_(std::move(domain)),
      curvature_(std::numeric_limits<double>::quiet_NaN()) {
  if (dim < 2) throw DomainError("metric dimension must be at least 2");
  if (!domain_) domain_ = [](std::span<const double>) { return true; };
}

MetricField MetricField::euclidean(int dim) {
  MetricField f = constant_curvature(dim, 0.0);
  return f;
}

MetricField MetricField::constant_curvature(int dim, double k) {
  FieldFn g = [dim, k](std::span<const Jet> x) {
    Jet s = x[0] * x[0];
    for (int i = 1; i < dim; ++i) s.add_product(x[i], x[i]);
    Jet f = k == 0.0 ? Jet(x[0].layout(), 1.0) : pow(1.0 + (0.25 * k) * s, -2.0);
    std::vector<Jet> out(dim * dim, Jet(x[0].layout()));
    for (int i = 0; i < dim; ++i) out[i * dim + i] = f;
    return out;
  };
  std::function<bool(std::span<const double>)> domain = [](std::span<const double>) { return true; };
  MetricPreset preset = MetricPreset::euclidean;
  if (k > 0) preset = MetricPreset::sphere;
  if (k < 0) {
    preset = MetricPreset::hyperbolic;
    const double rho = 2.0 / std::sqrt(-k);
    domain = [rho](std::span<const double> p) {
      double s = 0;
      for (double v : p) s += v * v;
      return std::sqrt(s) < rho;
    };
  }
  MetricField f(dim, std::move(g), preset, std::move(domain));
  f.curvature_ = k;
  return f;
}

MetricField MetricField::random_perturbation(int dim, double eps, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = dim;
  const int pairs = n * n;
  // Coefficients symmetric in (i, j).
  std::vector<double> lin(pairs * n), quad(pairs * n * n), cub(pairs * n * n * n), trig(pairs), w(n);
  auto sym = [&](std::vector<double>& c, int per) {
    for (double& v : c) v = u(rng);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j)
        for (int k = 0; k < per; ++k) c[(i * n + j) * per + k] = c[(j * n + i) * per + k];
  };
  sym(lin, n);
  sym(quad, n * n);
  sym(cub, n * n * n);
  sym(trig, 1);
  for (double& v : w) v = u(rng);
  FieldFn g = [=](std::span<const Jet> x) {
    const JetLayout& l = x[0].layout();
    Jet phase(l, 0.0);
    for (int k = 0; k < n; ++k) phase.axpy(w[k], x[k]);
    Jet s = sin(phase);
    std::vector<Jet> xx, xxx;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) xx.push_back(x[a] * x[b]);
    for (int a = 0; a < n; ++a)
      for (int bc = 0; bc < n * n; ++bc) xxx.push_back(x[a] * xx[bc]);
    std::vector<Jet> out(n * n, Jet(l));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= i; ++j) {
        const int ij = i * n + j;
        Jet v(l, i == j ? 1.0 : 0.0);
        Jet p(l, 0.0);
        for (int a = 0; a < n; ++a) p.axpy(lin[ij * n + a], x[a]);
        for (int a = 0; a < n * n; ++a) p.axpy(quad[ij * n * n + a], xx[a]);
        for (int a = 0; a < n * n * n; ++a) p.axpy(cub[ij * n * n * n + a], xxx[a]);
        p.axpy(trig[ij], s);
        v.axpy(eps, p);
        out[ij] = v;
        out[j * n + i] = v;
      }
    }
    return out;
  };
  auto domain = [](std::span<const double> p) {
    double s = 0;
    for (double v : p) s += v * v;
    return s < 1.0;
  };
  return MetricField(dim, std::move(g), MetricPreset::custom, domain);
}

MetricField MetricField::pulled_back(const std::vector<double>& q) const {
  const int n = dim_;
  if (static_cast<int>(q.size()) != n * n) throw ShapeError("pullback matrix size mismatch");
  FieldFn base = g_;
  FieldFn g = [n, q, base](std::span<const Jet> y) {
    const JetLayout& l = y[0].layout();
    std::vector<Jet> x(n, Jet(l));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) x[a].axpy(q[a * n + b], y[b]);
    std::vector<Jet> ga = base(x);
    std::vector<Jet> out(n * n, Jet(l));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int m = 0; m < n; ++m) {
            const double c = q[k * n + i] * q[m * n + j];
            if (c != 0.0) out[i * n + j].axpy(c, ga[k * n + m]);
          }
    return out;
  };
  auto dom = domain_;
  auto domain = [n, q, dom](std::span<const double> y) {
    std::vector<double> x(n, 0.0);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) x[a] += q[a * n + b] * y[b];
    return dom(x);
  };
  MetricField f(n, std::move(g), preset_, domain);
  f.backend_ = backend_;
  f.curvature_ = curvature_;
  return f;
}

MetricField MetricField::with_backend(const DiffBackend& b) const {
  MetricField f(*this);
  f.backend_ = b;
  return f;
}

void MetricField::check_point(std::span<const double> p) const {
  if (static_cast<int>(p.size()) != dim_) throw ShapeError("point dimension mismatch");
  if (!domain_(p)) throw DomainError("point outside the metric's domain");
}

MetricAtPoint MetricField::at(std::span<const double> p) const {
  check_point(p);
  const JetLayout& l = JetLayout::get(dim_, 0);
  std::vector<Jet> x;
  for (double v : p) x.emplace_back(l, v);
  std::vector<Jet> g = g_(x);
  Tensor t(dim_, lower_slots(2));
  for (int i = 0; i < dim_ * dim_; ++i) t.data()[i] = g[i].value();
  return MetricAtPoint(std::move(t));
}

std::vector<Jet> MetricField::jet(std::span<const double> p, int order) const {
  check_point(p);
  return taylor_expand(g_, p, order, backend_);
}

std::vector<Jet> MetricField::evaluate(std::span<const Jet> y) const {
  if (static_cast<int>(y.size()) != dim_) throw ShapeError("point dimension mismatch");
  std::vector<double> y0(dim_);
  for (int i = 0; i < dim_; ++i) y0[i] = y[i].value();
  check_point(y0);
  return evaluate_on_jets(g_, y, backend_);
}

Tensor MetricField::partials(std::span<const double> p, int order) const {
  if (order < 0 || order > 4) throw DomainError("partials are provided up to order 4");
  std::vector<Jet> g = jet(p, order);
  Tensor t(dim_, lower_slots(2 + order));
  std::vector<int> idx(2 + order), alpha(dim_);
  for (std::size_t o = 0; o < t.size(); ++o) {
    unflatten(o, dim_, idx);
    std::fill(alpha.begin(), alpha.end(), 0);
    for (int s = 2; s < 2 + order; ++s) alpha[idx[s]] += 1;
    t.data()[o] = g[idx[0] * dim_ + idx[1]].partial(alpha);
  }
  return t;
}

double MetricField::distance_from_origin(std::span<const double> p) const {
  check_point(p);
  if (std::isnan(curvature_)) throw DomainError("distance is only available for constant-curvature presets");
  double s = 0;
  for (double v : p) s += v * v;
  const double rho = std::sqrt(s);
  const double k = curvature_;
  if (k > 0) return 2.0 / std::sqrt(k) * std::atan(std::sqrt(k) * rho / 2.0);
  if (k < 0) return 2.0 / std::sqrt(-k) * std::atanh(std::sqrt(-k) * rho / 2.0);
  return rho;
}

}  // namespace uc
