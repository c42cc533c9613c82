#include "uc/curvature.hpp"
#include "uc/geodesic.hpp"
#include "uc/metric_field.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace {

using uc::MetricField;
using uc::Point;

Point random_point(std::mt19937_64& rng, int n, double radius) {
  std::uniform_real_distribution<double> u(-radius, radius);
  Point p(n);
  for (double& v : p) v = u(rng);
  return p;
}

// Conformal factor of the constant-curvature preset, g = exp(2 f) delta.
double conformal_f(const Point& x, double k) {
  double s = 0;
  for (double v : x) s += v * v;
  return -std::log1p(0.25 * k * s);
}

TEST(Geometry, ChristoffelOfConformalMetricMatchesClosedForm) {
  std::mt19937_64 rng(11);
  for (double k : {1.0, -1.0, 0.3}) {
    MetricField f = MetricField::constant_curvature(3, k);
    for (int t = 0; t < 10; ++t) {
      Point x = random_point(rng, 3, 0.6);
      double s = 0;
      for (double v : x) s += v * v;
      std::vector<double> df(3);
      for (int i = 0; i < 3; ++i) df[i] = -0.5 * k * x[i] / (1 + 0.25 * k * s);
      uc::Tensor gam = uc::christoffel(f, x);
      for (int a = 0; a < 3; ++a)
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) {
            double expect = (a == i) * df[j] + (a == j) * df[i] - (i == j) * df[a];
            EXPECT_NEAR(gam(a, i, j), expect, 1e-13);
          }
    }
  }
}

TEST(Geometry, ConstantCurvatureRiemann) {
  std::mt19937_64 rng(12);
  for (int n : {2, 3, 4}) {
    for (double k : {1.0, -1.0, 0.5}) {
      MetricField f = MetricField::constant_curvature(n, k);
      for (int t = 0; t < 5; ++t) {
        Point x = random_point(rng, n, 0.5);
        const double c = std::exp(2 * conformal_f(x, k));
        uc::Tensor r = uc::riemann(f, x);
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            for (int cc = 0; cc < n; ++cc)
              for (int d = 0; d < n; ++d) {
                double expect = k * c * c * ((a == d) * (b == cc) - (a == cc) * (b == d));
                EXPECT_NEAR(r(a, b, cc, d), expect, 1e-12);
              }
        uc::Tensor ric = uc::ricci(f, x);
        for (int a = 0; a < n; ++a) EXPECT_NEAR(ric(a, a), (n - 1) * k * c, 1e-12);
        EXPECT_NEAR(uc::scalar_curvature(f, x), n * (n - 1) * k, 1e-11);
      }
    }
  }
}

TEST(Geometry, RandomMetricSymmetriesAndSecondBianchi) {
  std::mt19937_64 rng(13);
  for (int n : {3, 4}) {
    MetricField f = MetricField::random_perturbation(n, 0.1, 7 + n);
    for (int t = 0; t < 4; ++t) {
      Point x = random_point(rng, n, 0.4);
      auto geo = uc::LocalGeometry::at(f, x, 3);
      uc::Tensor r = uc::values(geo.riemann);
      EXPECT_LT(uc::riemann_symmetry_defects(r).max(), 1e-12);
      auto dr = uc::values(uc::covariant_derivative(geo.riemann, geo));
      double worst = 0;
      for (int e = 0; e < n; ++e)
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
              for (int d = 0; d < n; ++d)
                worst = std::max(worst, std::abs(dr(e, a, b, c, d) + dr(a, b, e, c, d) + dr(b, e, a, c, d)));
      EXPECT_LT(worst, 1e-11);
    }
  }
}

TEST(Geometry, FiniteDifferenceBackendAgreesWithAnalytic) {
  MetricField f = MetricField::random_perturbation(3, 0.1, 5);
  MetricField fd = f.with_backend(uc::DiffBackend::finite_difference());
  Point x{0.1, -0.2, 0.15};
  uc::Tensor ra = uc::riemann(f, x), rf = uc::riemann(fd, x);
  EXPECT_LT(uc::sup_norm(ra - rf), 1e-6);
  uc::Tensor ga = uc::christoffel(f, x), gf = uc::christoffel(fd, x);
  EXPECT_LT(uc::sup_norm(ga - gf), 1e-7);
}

TEST(Geometry, PartialsAreSymmetricInDerivativeSlots) {
  MetricField f = MetricField::random_perturbation(3, 0.1, 6);
  Point x{0.05, 0.1, -0.1};
  uc::Tensor d2 = f.partials(x, 2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          EXPECT_DOUBLE_EQ(d2(i, j, a, b), d2(i, j, b, a));
          EXPECT_DOUBLE_EQ(d2(i, j, a, b), d2(j, i, a, b));
        }
  EXPECT_THROW(f.partials(x, 5), uc::DomainError);
}

TEST(Geometry, LaplaceBeltramiOfConformalMetric) {
  // For g = exp(2f) delta: Lap u = exp(-2f) (Lap0 u + (n-2) grad f . grad u).
  const int n = 3;
  const double k = 0.7;
  MetricField f = MetricField::constant_curvature(n, k);
  uc::TensorField u{n, {}, [](std::span<const uc::Jet> x) { return std::vector<uc::Jet>{uc::sin(x[0]) * x[1]}; },
                    uc::DiffBackend::analytic()};
  Point x{0.2, 0.3, -0.1};
  double s = 0;
  for (double v : x) s += v * v;
  std::vector<double> df(n), du{std::cos(x[0]) * x[1], std::sin(x[0]), 0.0};
  for (int i = 0; i < n; ++i) df[i] = -0.5 * k * x[i] / (1 + 0.25 * k * s);
  const double lap0 = -std::sin(x[0]) * x[1];
  double dot = 0;
  for (int i = 0; i < n; ++i) dot += df[i] * du[i];
  const double expect = std::exp(-2 * conformal_f(x, k)) * (lap0 + (n - 2) * dot);
  uc::Tensor lap = uc::laplace_beltrami(u, f, x);
  EXPECT_NEAR(lap.data()[0], expect, 1e-13);
}

TEST(Geometry, SphereGeodesicIsGreatCircle) {
  // Stereographic chart of the unit sphere: X = (4x, 4 - |x|^2) / (4 + |x|^2).
  MetricField f = MetricField::constant_curvature(3, 1.0);
  Point p{0.3, -0.2, 0.1};
  auto embed = [](const Point& x) {
    double s = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    return std::vector<double>{4 * x[0] / (4 + s), 4 * x[1] / (4 + s), 4 * x[2] / (4 + s), (4 - s) / (4 + s)};
  };
  auto g = f.at(p);
  std::vector<double> v{0.5, 0.7, -0.2};
  double nv = std::sqrt(g.inner(v, v));
  for (double& c : v) c /= nv;
  const double eps = 1e-6;
  Point pp(p), pm(p);
  for (int i = 0; i < 3; ++i) {
    pp[i] += eps * v[i];
    pm[i] -= eps * v[i];
  }
  auto xp = embed(pp), xm = embed(pm), x0 = embed(p);
  std::vector<double> dx(4);
  for (int i = 0; i < 4; ++i) dx[i] = (xp[i] - xm[i]) / (2 * eps);
  auto arc = uc::geodesic(f, p, v, 2.0, 9);
  for (const auto& smp : arc.samples) {
    auto xe = embed(smp.x);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(xe[i], std::cos(smp.t) * x0[i] + std::sin(smp.t) * dx[i], 1e-8);
    auto gs = f.at(smp.x);
    EXPECT_NEAR(gs.inner(smp.v, smp.v), 1.0, 1e-10);
  }
}

TEST(Geometry, RadialGeodesicDistance) {
  for (double k : {1.0, -1.0, 0.0}) {
    MetricField f = MetricField::constant_curvature(3, k);
    Point o{0, 0, 0};
    std::vector<double> v{0.6, 0.0, 0.8};
    auto arc = uc::geodesic(f, o, v, 1.2, 5);
    for (const auto& smp : arc.samples) EXPECT_NEAR(f.distance_from_origin(smp.x), smp.t, 1e-10);
  }
}

TEST(Geometry, ParallelTransportPreservesInnerProducts) {
  MetricField f = MetricField::random_perturbation(3, 0.1, 9);
  Point p{0.1, 0.0, -0.1};
  auto g0 = f.at(p);
  std::vector<double> v{1.0, 0.2, 0.1};
  double nv = std::sqrt(g0.inner(v, v));
  for (double& c : v) c /= nv;
  auto arc = uc::geodesic(f, p, v, 0.5, 6);
  uc::Tensor frame(3, {uc::Variance::upper, uc::Variance::upper});  // two vectors side by side
  uc::Tensor w(3, {uc::Variance::upper});
  w(0) = 0.3;
  w(1) = -1.0;
  w(2) = 0.5;
  auto tw = uc::parallel_transport(f, arc, w);
  uc::Tensor vel(3, {uc::Variance::upper});
  for (int i = 0; i < 3; ++i) vel(i) = v[i];
  auto tv = uc::parallel_transport(f, arc, vel);
  const double ww = g0.inner(w.data(), w.data()), wv = g0.inner(w.data(), v);
  for (std::size_t s = 0; s < arc.samples.size(); ++s) {
    auto g = f.at(arc.samples[s].x);
    EXPECT_NEAR(g.inner(tw[s].data(), tw[s].data()), ww, 1e-10);
    EXPECT_NEAR(g.inner(tw[s].data(), arc.samples[s].v), wv, 1e-10);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(tv[s](i), arc.samples[s].v[i], 1e-10);
  }
  // Transport of a covector pairs with the transported vector to a constant.
  uc::Tensor c(3, {uc::Variance::lower});
  c(0) = 1.0;
  c(2) = 2.0;
  auto tc = uc::parallel_transport(f, arc, c);
  for (std::size_t s = 0; s < arc.samples.size(); ++s) {
    double pair = 0;
    for (int i = 0; i < 3; ++i) pair += tc[s](i) * tw[s](i);
    EXPECT_NEAR(pair, w(0) + 2 * w(2), 1e-10);
  }
}

TEST(Geometry, DomainAndSpeedErrors) {
  MetricField h = MetricField::constant_curvature(3, -1.0);
  Point outside{2.5, 0, 0};
  EXPECT_THROW(h.at(outside), uc::DomainError);
  Point p{0, 0, 0};
  std::vector<double> slow{0.5, 0, 0};
  EXPECT_THROW(uc::geodesic(h, p, slow, 1.0, 3), uc::DomainError);
  MetricField c = MetricField::random_perturbation(3, 0.01, 3);
  std::vector<double> v{1.0, 0, 0};
  auto g = c.at(p);
  for (double& x : v) x /= std::sqrt(g.inner(std::vector<double>{1.0, 0, 0}, std::vector<double>{1.0, 0, 0}));
  EXPECT_THROW(uc::geodesic(c, p, v, 3.0, 3), uc::DomainError);
}

}  // namespace
