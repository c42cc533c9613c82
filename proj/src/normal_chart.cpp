#include "uc/normal_chart.hpp"

#include "uc/geodesic.hpp"

#include <cmath>

namespace uc {

Frame gram_schmidt_frame(const MetricField& f, std::span<const double> p) {
  const int n = f.dim();
  MetricAtPoint g = f.at(p);
  Frame e;
  for (int i = 0; i < n; ++i) {
    std::vector<double> v(n, 0.0);
    v[i] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& w : e) {
        const double c = g.inner(v, w);
        for (int a = 0; a < n; ++a) v[a] -= c * w[a];
      }
    }
    const double nv = std::sqrt(g.inner(v, v));
    for (double& x : v) x /= nv;
    e.push_back(std::move(v));
  }
  return e;
}

NormalChart::NormalChart(MetricField f, Point p0, Frame frame)
    : f_(std::move(f)), p0_(std::move(p0)), frame_(std::move(frame)), shoot_opt_(tight_options()) {
  const int n = f_.dim();
  if (static_cast<int>(p0_.size()) != n) throw ShapeError("base point dimension mismatch");
  if (frame_.empty()) frame_ = gram_schmidt_frame(f_, p0_);
  if (static_cast<int>(frame_.size()) != n) throw ShapeError("frame size mismatch");
  MetricAtPoint g = f_.at(p0_);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (std::abs(g.inner(frame_[i], frame_[j]) - (i == j)) > 1e-10) {
        throw DomainError("frame at the base point is not orthonormal");
      }
    }
}

OdeOptions NormalChart::tight_options() {
  OdeOptions o;
  o.rel_tol = 1e-13;
  o.abs_tol = 1e-14;
  o.initial_step = 0.05;
  return o;
}

NormalChart::Shot NormalChart::shoot(std::span<const double> x) const {
  const int n = dim();
  if (static_cast<int>(x.size()) != n) throw ShapeError("normal point dimension mismatch");
  OdeState s(2 * n + n * n, 0.0);
  std::copy(p0_.begin(), p0_.end(), s.begin());
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < n; ++a) {
      s[n + a] += frame_[i][a] * x[i];
      s[2 * n + i * n + a] = frame_[i][a];
    }
  const double one = 1.0;
  auto rhs = [this, n](const OdeState& st, OdeState& ds, double) { geodesic_transport_rhs(f_, n, st, ds); };
  auto check = [this, n](double, const OdeState& st) {
    if (!f_.in_domain(std::span<const double>(st.data(), n))) throw DomainError("geodesic left the domain");
  };
  integrate(rhs, s, 0.0, std::span<const double>(&one, 1), shoot_opt_, {}, check);
  Shot shot;
  shot.position.assign(s.begin(), s.begin() + n);
  shot.radial.assign(s.begin() + n, s.begin() + 2 * n);
  for (int i = 0; i < n; ++i) shot.frame.emplace_back(s.begin() + 2 * n + i * n, s.begin() + 2 * n + (i + 1) * n);
  return shot;
}

Jet JetRayState::get(const OdeState& s, std::size_t j) const {
  Jet v(*layout);
  const std::size_t m = layout->size();
  for (std::size_t c = 0; c < m; ++c) v[c] = s[j * m + c];
  return v;
}

void JetRayState::put(OdeState& s, std::size_t j, const Jet& v) const {
  const std::size_t m = layout->size();
  for (std::size_t c = 0; c < m; ++c) s[j * m + c] = v[c];
}

LocalGeometry jet_ray_rhs(const MetricField& f, const JetRayState& st, const OdeState& s, OdeState& ds,
                          int extra_order) {
  const int n = st.dim;
  std::vector<Jet> x(n), v(n);
  Point x0(n);
  for (int a = 0; a < n; ++a) {
    x[a] = st.get(s, a);
    v[a] = st.get(s, n + a);
    x0[a] = x[a].value();
  }
  const int order = st.layout->order();
  LocalGeometry geo = LocalGeometry::at(f, x0, order + 1 + extra_order, order + 1 + extra_order >= 2);
  std::vector<Jet> gam = compose(geo.christoffel.data(), x);
  auto G = [&](int a, int b, int c) -> const Jet& { return gam[(a * n + b) * n + c]; };
  for (int a = 0; a < n; ++a) {
    st.put(ds, a, v[a]);
    Jet acc(*st.layout);
    for (int b = 0; b < n; ++b) {
      Jet w(*st.layout);
      for (int c = 0; c < n; ++c) w.add_product(G(a, b, c), v[c]);
      acc.add_product(w, v[b]);
    }
    st.put(ds, n + a, -acc);
  }
  for (int i = 0; i < st.frames; ++i) {
    std::vector<Jet> e(n);
    for (int a = 0; a < n; ++a) e[a] = st.get(s, 2 * n + i * n + a);
    for (int a = 0; a < n; ++a) {
      Jet acc(*st.layout);
      for (int b = 0; b < n; ++b) {
        Jet w(*st.layout);
        for (int c = 0; c < n; ++c) w.add_product(G(a, b, c), e[c]);
        acc.add_product(w, v[b]);
      }
      st.put(ds, 2 * n + i * n + a, -acc);
    }
  }
  return geo;
}

NormalChart::RayJet NormalChart::ray_jet(std::span<const double> v, double r, int order, bool with_frame) const {
  const int n = dim();
  if (!(r > 0.0)) throw DomainError("ray jets need a positive radius");
  if (static_cast<int>(v.size()) != n) throw ShapeError("direction dimension mismatch");
  JetRayState st{n, with_frame ? n : 0, &JetLayout::get(n, order)};
  OdeState s(st.doubles(), 0.0);
  for (int a = 0; a < n; ++a) {
    Jet xa(*st.layout, p0_[a]);
    st.put(s, a, xa);
    Jet va(*st.layout, 0.0);
    for (int i = 0; i < n; ++i) {
      va[0] += frame_[i][a] * v[i];
      if (order >= 1) va[1 + i] = frame_[i][a];
    }
    st.put(s, n + a, va);
    if (with_frame) {
      for (int i = 0; i < n; ++i) st.put(s, 2 * n + i * n + a, Jet(*st.layout, frame_[i][a]));
    }
  }
  auto rhs = [this, &st](const OdeState& x, OdeState& dx, double) { jet_ray_rhs(f_, st, x, dx); };
  OdeOptions opt;
  opt.rel_tol = 1e-12;
  opt.abs_tol = 1e-13;
  opt.initial_step = 0.05;
  integrate(rhs, s, 0.0, std::span<const double>(&r, 1), opt, {});
  RayJet out;
  for (int a = 0; a < n; ++a) out.position.push_back(st.get(s, a).rescaled(1.0 / r));
  if (with_frame) {
    for (int i = 0; i < n; ++i) {
      std::vector<Jet> e;
      for (int a = 0; a < n; ++a) e.push_back(st.get(s, 2 * n + i * n + a).rescaled(1.0 / r));
      out.frame.push_back(std::move(e));
    }
  }
  return out;
}

NormalCurvature normal_curvature(const JetRayState& st, const OdeState& s, double r, const LocalGeometry& geo) {
  const int n = st.dim;
  if (st.layout->order() < 2) throw ShapeError("normal curvature needs ray jets of order >= 2");
  if (geo.riemann.size() == 0) throw ShapeError("normal curvature needs curvature jets");
  const JetLayout& l1 = JetLayout::get(n, 1);
  std::vector<Jet> p(n);
  NormalCurvature out;
  for (int a = 0; a < n; ++a) {
    p[a] = st.get(s, a).rescaled(1.0 / r);
    out.position.push_back(p[a].value());
  }
  std::vector<Jet> jac(n * n);  // [alpha beta]
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) jac[a * n + b] = p[a].derivative(b).truncated(1);
  std::vector<Jet> pt(n);
  for (int a = 0; a < n; ++a) pt[a] = p[a].truncated(1);
  std::vector<Jet> rc = compose(geo.riemann.data(), pt);
  for (Jet& j : rc) j = j.truncated(1);
  // Contract one slot at a time: slot s of rc goes from chart to normal index.
  const int n2 = n * n, n3 = n2 * n;
  std::vector<Jet> cur = rc, next(n3 * n, Jet(l1));
  const int stride[4] = {n3, n2, n, 1};
  for (int slot = 0; slot < 4; ++slot) {
    for (int o = 0; o < n3 * n; ++o) {
      const int idx = (o / stride[slot]) % n;
      const int base = o - idx * stride[slot];
      Jet acc(l1);
      for (int al = 0; al < n; ++al) acc.add_product(cur[base + al * stride[slot]], jac[al * n + idx]);
      next[o] = std::move(acc);
    }
    std::swap(cur, next);
  }
  out.riemann.resize(n3 * n);
  out.driemann.resize(n3 * n2);
  for (int o = 0; o < n3 * n; ++o) {
    out.riemann[o] = cur[o].value();
    for (int e = 0; e < n; ++e) out.driemann[e * n3 * n + o] = cur[o].d(e);
  }
  out.jacobian.resize(n2);
  for (int i = 0; i < n2; ++i) out.jacobian[i] = jac[i].value();
  out.metric.assign(n2, 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double acc = 0.0;
      for (int al = 0; al < n; ++al)
        for (int be = 0; be < n; ++be) acc += jac[al * n + a].value() * geo.g[al * n + be].value() * jac[be * n + b].value();
      out.metric[a * n + b] = acc;
    }
  return out;
}

}  // namespace uc
