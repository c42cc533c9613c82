#include "uc/curvature.hpp"

namespace uc {

LocalGeometry LocalGeometry::from_metric_jets(std::vector<Jet> g, int dim, bool with_riemann) {
  const int n = dim;
  if (static_cast<int>(g.size()) != n * n) throw ShapeError("metric jet size mismatch");
  LocalGeometry geo;
  geo.dim = n;
  geo.order = g[0].order();
  if (geo.order < 1) throw ShapeError("local geometry needs metric jets of order >= 1");
  geo.g_inv = invert_matrix(g, n);
  geo.g = std::move(g);

  const JetLayout& l1 = JetLayout::get(geo.g[0].nvars(), geo.order - 1);
  std::vector<Jet> dg(n * n * n, Jet(l1));  // dg[(c*n + a)*n + b] = d_c g_ab
  for (int c = 0; c < n; ++c)
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) {
        dg[(c * n + a) * n + b] = geo.g[a * n + b].derivative(c);
        dg[(c * n + b) * n + a] = dg[(c * n + a) * n + b];
      }
  std::vector<Jet> first(n * n * n, Jet(l1));  // Gamma_{l i j}
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Jet v = dg[(i * n + j) * n + l] + dg[(j * n + i) * n + l] - dg[(l * n + i) * n + j];
        v *= 0.5;
        first[(l * n + i) * n + j] = v;
        first[(l * n + j) * n + i] = v;
      }
  geo.christoffel = BasicTensor<Jet>(n, {Variance::upper, Variance::lower, Variance::lower}, Jet(l1));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Jet acc(l1);
        for (int l = 0; l < n; ++l) acc.add_product(geo.g_inv[k * n + l], first[(l * n + i) * n + j]);
        geo.christoffel(k, i, j) = acc;
        geo.christoffel(k, j, i) = acc;
      }

  if (with_riemann && geo.order >= 2) {
    const JetLayout& l2 = JetLayout::get(geo.g[0].nvars(), geo.order - 2);
    auto& gam = geo.christoffel.data();
    auto G = [&](int k, int i, int j) -> const Jet& { return gam[(k * n + i) * n + j]; };
    std::vector<Jet> dgam(n * n * n * n, Jet(l2));  // [(a, e, b, c)] = d_a Gamma^e_bc
    for (int a = 0; a < n; ++a)
      for (int e = 0; e < n; ++e)
        for (int b = 0; b < n; ++b)
          for (int c = b; c < n; ++c) {
            dgam[((a * n + e) * n + b) * n + c] = G(e, b, c).derivative(a);
            dgam[((a * n + e) * n + c) * n + b] = dgam[((a * n + e) * n + b) * n + c];
          }
    geo.riemann = BasicTensor<Jet>(n, lower_slots(4), Jet(l2));
    std::vector<Jet> up(n, Jet(l2));
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          for (int e = 0; e < n; ++e) {
            Jet v = dgam[((a * n + e) * n + b) * n + c] - dgam[((b * n + e) * n + a) * n + c];
            for (int f = 0; f < n; ++f) {
              v.add_product(G(e, a, f), G(f, b, c));
              v -= G(e, b, f) * G(f, a, c);
            }
            up[e] = std::move(v);
          }
          for (int d = 0; d < n; ++d) {
            Jet acc(l2);
            for (int e = 0; e < n; ++e) acc.add_product(up[e], geo.g[e * n + d]);
            geo.riemann(b, a, c, d) = -acc;
            geo.riemann(a, b, c, d) = std::move(acc);
          }
        }
  }
  return geo;
}

LocalGeometry LocalGeometry::at(const MetricField& f, std::span<const double> p, int order, bool with_riemann) {
  return from_metric_jets(f.jet(p, order), f.dim(), with_riemann);
}

BasicTensor<Jet> LocalGeometry::metric_tensor() const {
  BasicTensor<Jet> t(dim, lower_slots(2), g[0]);
  t.data() = g;
  return t;
}

BasicTensor<Jet> LocalGeometry::inverse_metric_tensor() const {
  BasicTensor<Jet> t(dim, {Variance::upper, Variance::upper}, g_inv[0]);
  t.data() = g_inv;
  return t;
}

BasicTensor<Jet> LocalGeometry::ricci() const {
  if (riemann.size() == 0) throw ShapeError("local geometry has no curvature");
  const int n = dim;
  const Jet zero = zero_like(riemann.data()[0]);
  BasicTensor<Jet> r(n, lower_slots(2), zero);
  for (int b = 0; b < n; ++b)
    for (int c = 0; c < n; ++c) {
      Jet acc = zero;
      for (int a = 0; a < n; ++a)
        for (int d = 0; d < n; ++d) acc.add_product(g_inv[a * n + d], riemann(a, b, c, d));
      r(b, c) = acc;
    }
  return r;
}

Jet LocalGeometry::scalar_curvature() const {
  BasicTensor<Jet> ric = ricci();
  Jet acc = zero_like(ric.data()[0]);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) acc.add_product(g_inv[a * dim + b], ric(a, b));
  return acc;
}

Tensor christoffel(const MetricField& f, std::span<const double> p) {
  return values(LocalGeometry::at(f, p, 1, false).christoffel);
}

Tensor riemann(const MetricField& f, std::span<const double> p) {
  return values(LocalGeometry::at(f, p, 2).riemann);
}

Tensor ricci(const MetricField& f, std::span<const double> p) {
  return values(LocalGeometry::at(f, p, 2).ricci());
}

double scalar_curvature(const MetricField& f, std::span<const double> p) {
  return LocalGeometry::at(f, p, 2).scalar_curvature().value();
}

void christoffel_values(const MetricField& f, std::span<const double> x, std::span<double> out) {
  const int n = f.dim();
  std::vector<Jet> g = f.jet(x, 1);
  std::vector<double> gv(n * n);
  for (int i = 0; i < n * n; ++i) gv[i] = g[i].value();
  std::vector<double> inv = invert_matrix(gv, n);
  std::vector<double> first(n * n * n);
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        first[(l * n + i) * n + j] = 0.5 * (g[j * n + l].d(i) + g[i * n + l].d(j) - g[i * n + j].d(l));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += inv[k * n + l] * first[(l * n + i) * n + j];
        out[(k * n + i) * n + j] = s;
      }
}

BasicTensor<Jet> covariant_derivative(const BasicTensor<Jet>& t, const LocalGeometry& geo) {
  const int n = t.dim();
  if (n != geo.dim) throw ShapeError("dimension mismatch in covariant derivative");
  const int order = t.data()[0].order();
  if (order < 1) throw ShapeError("covariant derivative needs a jet of order >= 1");
  if (geo.order - 1 < order - 1) throw ShapeError("connection jets are of too low order");
  const JetLayout& lo = JetLayout::get(t.data()[0].nvars(), order - 1);
  std::vector<Variance> v{Variance::lower};
  v.insert(v.end(), t.variance().begin(), t.variance().end());
  BasicTensor<Jet> r(n, v, Jet(lo));
  const int rank = t.rank();
  const std::size_t block = t.size();
  std::vector<int> idx(rank);
  std::vector<Jet> gam(geo.christoffel.size(), Jet(lo));
  for (std::size_t i = 0; i < gam.size(); ++i) gam[i] = geo.christoffel.data()[i].truncated(order - 1);
  auto G = [&](int k, int i, int j) -> const Jet& { return gam[(k * n + i) * n + j]; };
  std::vector<std::size_t> stride(rank, 1);
  for (int s = rank - 2; s >= 0; --s) stride[s] = stride[s + 1] * n;
  for (int a = 0; a < n; ++a) {
    for (std::size_t o = 0; o < block; ++o) {
      Jet acc = t.data()[o].derivative(a);
      unflatten(o, n, idx);
      for (int s = 0; s < rank; ++s) {
        const std::size_t base = o - idx[s] * stride[s];
        for (int m = 0; m < n; ++m) {
          const Jet& tm = t.data()[base + m * stride[s]];
          if (t.variance()[s] == Variance::lower) {
            acc -= G(m, a, idx[s]) * tm;
          } else {
            acc.add_product(G(idx[s], a, m), tm);
          }
        }
      }
      r.data()[a * block + o] = std::move(acc);
    }
  }
  return r;
}

BasicTensor<Jet> metric_trace01(const BasicTensor<Jet>& t, const LocalGeometry& geo) {
  const int n = t.dim();
  if (t.rank() < 2) throw ShapeError("trace needs rank >= 2");
  if (t.variance()[0] != Variance::lower || t.variance()[1] != Variance::lower) {
    throw ShapeError("metric trace needs two lower slots");
  }
  std::vector<Variance> v(t.variance().begin() + 2, t.variance().end());
  const Jet zero = zero_like(t.data()[0]);
  BasicTensor<Jet> r(n, v, zero);
  const std::size_t block = r.size();
  for (std::size_t o = 0; o < block; ++o) {
    Jet acc = zero;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) acc.add_product(geo.g_inv[a * n + b], t.data()[(a * n + b) * block + o]);
    r.data()[o] = std::move(acc);
  }
  return r;
}

BasicTensor<Jet> laplacian(const BasicTensor<Jet>& t, const LocalGeometry& geo) {
  return metric_trace01(covariant_derivative(covariant_derivative(t, geo), geo), geo);
}

BasicTensor<Jet> TensorField::jet(std::span<const double> p, int order) const {
  std::vector<Jet> c = taylor_expand(components, p, order, backend);
  if (c.size() != BasicTensor<double>(dim, variance).size()) throw ShapeError("tensor field component count mismatch");
  BasicTensor<Jet> t(dim, variance, c[0]);
  t.data() = std::move(c);
  return t;
}

Tensor covariant_derivative(const TensorField& t, const MetricField& f, std::span<const double> p) {
  LocalGeometry geo = LocalGeometry::at(f, p, 1, false);
  return values(covariant_derivative(t.jet(p, 1), geo));
}

Tensor laplace_beltrami(const TensorField& t, const MetricField& f, std::span<const double> p) {
  LocalGeometry geo = LocalGeometry::at(f, p, 2, false);
  return values(laplacian(t.jet(p, 2), geo));
}

}  // namespace uc
