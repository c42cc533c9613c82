#include "uc/geodesic.hpp"

#include "uc/curvature.hpp"

#include <cmath>

namespace uc {

void geodesic_transport_rhs(const MetricField& f, int frame_count, const OdeState& s, OdeState& ds) {
  const int n = f.dim();
  std::vector<double> gam(n * n * n);
  christoffel_values(f, std::span<const double>(s.data(), n), gam);
  const double* v = s.data() + n;
  for (int a = 0; a < n; ++a) {
    ds[a] = v[a];
    double acc = 0.0;
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) acc += gam[(a * n + b) * n + c] * v[b] * v[c];
    ds[n + a] = -acc;
  }
  for (int i = 0; i < frame_count; ++i) {
    const double* e = s.data() + 2 * n + i * n;
    for (int a = 0; a < n; ++a) {
      double acc = 0.0;
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) acc += gam[(a * n + b) * n + c] * v[b] * e[c];
      ds[2 * n + i * n + a] = -acc;
    }
  }
}

namespace {

void check_start(const MetricField& f, std::span<const double> p, std::span<const double> v) {
  const int n = f.dim();
  if (static_cast<int>(p.size()) != n || static_cast<int>(v.size()) != n) throw ShapeError("dimension mismatch");
  MetricAtPoint g = f.at(p);
  const double speed = std::sqrt(g.inner(v, v));
  if (std::abs(speed - 1.0) > 1e-8) throw DomainError("initial velocity must have unit length");
}

std::function<void(double, const OdeState&)> domain_check(const MetricField& f) {
  const int n = f.dim();
  return [&f, n](double, const OdeState& s) {
    if (!f.in_domain(std::span<const double>(s.data(), n))) throw DomainError("geodesic left the domain");
  };
}

}  // namespace

GeodesicArc geodesic(const MetricField& f, std::span<const double> p, std::span<const double> v,
                     std::span<const double> times, const OdeOptions& opt) {
  check_start(f, p, v);
  const int n = f.dim();
  GeodesicArc arc;
  arc.start.assign(p.begin(), p.end());
  arc.velocity.assign(v.begin(), v.end());
  OdeState s(2 * n);
  std::copy(p.begin(), p.end(), s.begin());
  std::copy(v.begin(), v.end(), s.begin() + n);
  auto rhs = [&f](const OdeState& x, OdeState& dx, double) { geodesic_transport_rhs(f, 0, x, dx); };
  integrate(rhs, s, 0.0, times, opt,
            [&](std::size_t, double t, const OdeState& x) {
              arc.samples.push_back({t, Point(x.begin(), x.begin() + n), std::vector<double>(x.begin() + n, x.end())});
            },
            domain_check(f));
  return arc;
}

GeodesicArc geodesic(const MetricField& f, std::span<const double> p, std::span<const double> v, double length,
                     int samples, const OdeOptions& opt) {
  if (samples < 2) throw DomainError("need at least two samples");
  std::vector<double> times(samples);
  for (int i = 0; i < samples; ++i) times[i] = length * i / (samples - 1);
  return geodesic(f, p, v, times, opt);
}

std::vector<Tensor> parallel_transport(const MetricField& f, const GeodesicArc& arc, const Tensor& t0,
                                       const OdeOptions& opt) {
  const int n = f.dim();
  if (t0.dim() != n) throw ShapeError("tensor dimension mismatch");
  const int rank = t0.rank();
  const std::size_t m = t0.size();
  OdeState s(2 * n + m);
  std::copy(arc.start.begin(), arc.start.end(), s.begin());
  std::copy(arc.velocity.begin(), arc.velocity.end(), s.begin() + n);
  std::copy(t0.data().begin(), t0.data().end(), s.begin() + 2 * n);
  std::vector<std::size_t> stride(rank, 1);
  for (int k = rank - 2; k >= 0; --k) stride[k] = stride[k + 1] * n;
  auto rhs = [&](const OdeState& x, OdeState& dx, double) {
    geodesic_transport_rhs(f, 0, x, dx);
    std::vector<double> gam(n * n * n);
    christoffel_values(f, std::span<const double>(x.data(), n), gam);
    const double* v = x.data() + n;
    const double* t = x.data() + 2 * n;
    std::vector<int> idx(rank);
    for (std::size_t o = 0; o < m; ++o) {
      unflatten(o, n, idx);
      double acc = 0.0;
      for (int k = 0; k < rank; ++k) {
        const std::size_t base = o - idx[k] * stride[k];
        for (int mm = 0; mm < n; ++mm) {
          double c = 0.0;
          for (int a = 0; a < n; ++a) {
            c += (t0.variance()[k] == Variance::lower ? gam[(mm * n + a) * n + idx[k]] : -gam[(idx[k] * n + a) * n + mm]) * v[a];
          }
          acc += c * t[base + mm * stride[k]];
        }
      }
      dx[2 * n + o] = acc;
    }
  };
  std::vector<double> times;
  for (const auto& smp : arc.samples) times.push_back(smp.t);
  std::vector<Tensor> out;
  integrate(rhs, s, 0.0, times, opt,
            [&](std::size_t, double, const OdeState& x) {
              Tensor t(n, t0.variance());
              std::copy(x.begin() + 2 * n, x.end(), t.data().begin());
              out.push_back(std::move(t));
            },
            domain_check(f));
  return out;
}

}  // namespace uc
