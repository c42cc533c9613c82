#include "uc/einstein.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

using uc::CosmologicalConstant;
using uc::Jet;
using uc::MetricField;
using uc::Potential;
using uc::ResidualOptions;
using uc::ScalarSolution;

ScalarSolution wavy_field(int n) {
  return {[n](std::span<const Jet> x) {
            Jet s = uc::sin(0.7 * x[0] + 0.4 * x[n - 1]) + 0.3 * x[0] * x[1];
            return s + 0.2 * x[1] * x[1] * x[n - 1];
          },
          uc::DiffBackend::analytic()};
}

TEST(Potential, DerivativesMatchDifferences) {
  Potential v = Potential::quartic(0.8, 0.5);
  const double x = 0.37, h = 1e-5;
  for (int k = 0; k < 4; ++k) {
    const double fd = (v(k, x + h) - v(k, x - h)) / (2 * h);
    EXPECT_NEAR(fd, v(k + 1, x), 1e-8) << k;
  }
  Jet p = uc::variables(std::vector<double>{x}, 3)[0];
  Jet vp = v.apply(1, p);
  EXPECT_NEAR(vp.value(), v(1, x), 1e-14);
  EXPECT_NEAR(vp.partial({3}), v(4, x), 1e-12);
}

TEST(EinsteinScalar, ExactSolutionsAreOnShell) {
  for (int n : {3, 4}) {
    for (const auto& s : uc::exact_solution_presets(n)) {
      const auto& p = s.sample_point;
      SCOPED_TRACE(s.name + " n=" + std::to_string(n));
      auto e = uc::einstein_residual(s.metric, s.field, s.potential, s.lambda, p);
      EXPECT_LE(e.norm, 1e-10);
      EXPECT_FALSE(e.off_shell);
      EXPECT_LE(uc::scalar_residual(s.metric, s.field, s.potential, p).norm, 1e-10);
      EXPECT_LE(uc::contracted_bianchi_residual(s.metric, s.field, s.potential, s.lambda, p).norm, 1e-9);
      EXPECT_LE(uc::curvature_laplacian_residual(s.metric, s.field, s.potential, s.lambda, p).norm, 1e-8);
      EXPECT_LE(uc::prolonged_scalar_residual_1(s.metric, s.field, s.potential, s.lambda, p).norm, 1e-9);
      EXPECT_LE(uc::prolonged_scalar_residual_2(s.metric, s.field, s.potential, s.lambda, p).norm, 1e-8);
    }
  }
}

TEST(EinsteinScalar, SecondBianchiOnRandomMetric) {
  MetricField f = MetricField::random_perturbation(4, 0.15, 21);
  const std::vector<double> p{0.1, -0.2, 0.05, 0.15};
  EXPECT_LE(uc::bianchi2_residual(f, p).norm, 1e-11);
}

TEST(EinsteinScalar, ManufacturedForcingClosesAllIdentities) {
  for (int n : {3, 4}) {
    MetricField f = MetricField::random_perturbation(n, 0.12, 5 + n);
    ScalarSolution phi = wavy_field(n);
    Potential v = Potential::quartic(0.9, 0.4);
    CosmologicalConstant lambda(0.25);
    std::vector<double> p(n);
    for (int a = 0; a < n; ++a) p[a] = 0.1 - 0.07 * a;
    uc::Forcing forcing = uc::manufacture_forcing(f, phi, v, lambda, p);
    ResidualOptions with{1e-6, &forcing};

    auto off = uc::curvature_laplacian_residual(f, phi, v, lambda, p);
    EXPECT_TRUE(off.off_shell);
    EXPECT_GT(off.norm, 1e-3);

    EXPECT_LE(uc::einstein_residual(f, phi, v, lambda, p, with).norm, 1e-12);
    EXPECT_LE(uc::scalar_residual(f, phi, v, p, with).norm, 1e-12);
    auto c = uc::contracted_bianchi_residual(f, phi, v, lambda, p, with);
    EXPECT_FALSE(c.off_shell);
    EXPECT_LE(c.norm, 1e-10);
    EXPECT_LE(uc::curvature_laplacian_residual(f, phi, v, lambda, p, with).norm, 1e-9);
    EXPECT_LE(uc::prolonged_scalar_residual_1(f, phi, v, lambda, p, with).norm, 1e-10);
    EXPECT_LE(uc::prolonged_scalar_residual_2(f, phi, v, lambda, p, with).norm, 1e-9);
  }
}

TEST(EinsteinScalar, FiniteDifferenceResidualConvergesAtSecondOrder) {
  const int n = 3;
  MetricField exact = MetricField::constant_curvature(n, 1.0);
  Potential v = Potential::quadratic(1.0);
  const std::vector<double> p{0.2, -0.1, 0.3};
  std::vector<double> err;
  for (double h : {2e-2, 1e-2, 5e-3}) {
    MetricField fd = exact.with_backend(uc::DiffBackend::finite_difference(h, h));
    err.push_back(uc::einstein_residual(fd, ScalarSolution::constant(0.0), v, CosmologicalConstant(2.0), p).norm);
  }
  for (int i = 0; i + 1 < 3; ++i) {
    const double order = std::log2(err[i] / err[i + 1]);
    EXPECT_GE(order, 1.8);
    EXPECT_LE(order, 2.2);
  }
}

TEST(MainSystem, VanishesForFlatVacuum) {
  const int n = 3;
  uc::CurvatureState u(n);
  uc::CurvatureStateDerivative du(n);
  uc::ConnectionData conn{n, std::vector<double>(27, 0.0), std::vector<double>(81, 0.0)};
  uc::CurvatureState l = uc::main_system_rhs(u, du, conn, Potential::quadratic(1.3), CosmologicalConstant(0.0));
  for (double x : l.flatten()) EXPECT_EQ(x, 0.0);
}

class FrameFieldTest : public ::testing::Test {
 protected:
  static std::vector<double> unit(std::vector<double> v) {
    double s = 0;
    for (double x : v) s += x * x;
    for (double& x : v) x /= std::sqrt(s);
    return v;
  }
};

TEST_F(FrameFieldTest, ExpansionIdentityHoldsOffShell) {
  const int n = 3;
  MetricField f = MetricField::random_perturbation(n, 0.1, 17);
  ScalarSolution phi = wavy_field(n);
  uc::NormalChart chart(f, {0.05, -0.05, 0.1});
  const std::vector<double> v = unit({0.3, -0.5, 0.8});
  const double r = 0.35;
  const std::vector<double> radii{r};
  auto samples = uc::integrate_frame(chart, v, radii);
  uc::ConnectionData conn = uc::ConnectionData::from_frame_state(samples.back().state);
  uc::FrameFieldSample s = uc::frame_field_sample(chart, phi, v, r);
  for (int a = 0; a < n; ++a) EXPECT_NEAR(s.position[a], samples.back().position[a], 1e-9);

  uc::CurvatureState u = uc::assemble_u(f, phi, s.frame, s.position);
  uc::CurvatureStateDerivative du = uc::assemble_du(f, phi, s.frame, conn, s.position);
  auto close = [](const std::vector<double>& a, const std::vector<double>& b, double tol) {
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], tol) << i;
  };
  close(u.flatten(), s.u.flatten(), 1e-10);
  close(du.riemann, s.du.riemann, 1e-7);
  close(du.grad, s.du.grad, 1e-7);
  close(du.hess, s.du.hess, 1e-7);

  uc::CurvatureState lap = uc::tensor_laplacians(f, phi, s.frame, s.position);
  uc::CurvatureState expanded = uc::frame_laplacian_expansion(s.u, s.du, conn, lap);
  close(expanded.flatten(), s.laplacian.flatten(), 1e-6);
}

TEST_F(FrameFieldTest, MainSystemMatchesLaplaciansOnShell) {
  const int n = 4;
  uc::ExactSolution sol = uc::exact_solution_presets(n).back();
  ASSERT_EQ(sol.name, "product_linear_field");
  uc::NormalChart chart(sol.metric, {0.1, 0.2, -0.1, 0.15});
  const std::vector<double> v = unit({0.2, 0.6, -0.3, 0.5});
  const double r = 0.3;
  const std::vector<double> radii{r};
  auto samples = uc::integrate_frame(chart, v, radii);
  uc::ConnectionData conn = uc::ConnectionData::from_frame_state(samples.back().state);
  uc::FrameFieldSample s = uc::frame_field_sample(chart, sol.field, v, r);
  uc::CurvatureState rhs = uc::main_system_rhs(s.u, s.du, conn, sol.potential, sol.lambda);
  const auto a = rhs.flatten(), b = s.laplacian.flatten();
  double scale = 0.0;
  for (double x : b) scale = std::max(scale, std::abs(x));
  // A locally symmetric solution: every component is harmonic.
  EXPECT_LE(scale, 1e-8);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-6) << i;
}

TEST_F(FrameFieldTest, ForcedMainSystemMatchesLaplacians) {
  const int n = 3;
  MetricField f = MetricField::random_perturbation(n, 0.1, 29);
  ScalarSolution phi = wavy_field(n);
  Potential pot = Potential::quartic(0.7, 0.3);
  CosmologicalConstant lambda(-0.4);
  uc::NormalChart chart(f, {-0.05, 0.1, 0.0});
  const std::vector<double> v = unit({-0.4, 0.1, 0.9});
  const double r = 0.3;
  const std::vector<double> radii{r};
  auto samples = uc::integrate_frame(chart, v, radii);
  uc::ConnectionData conn = uc::ConnectionData::from_frame_state(samples.back().state);
  uc::FrameFieldSample s = uc::frame_field_sample(chart, phi, v, r);
  uc::Forcing forcing = uc::manufacture_forcing(f, phi, pot, lambda, s.position);
  uc::FrameForcing ff = uc::frame_forcing(f, forcing, s.frame, s.position);
  uc::CurvatureState rhs = uc::main_system_rhs(s.u, s.du, conn, pot, lambda, &ff);
  const auto a = rhs.flatten(), b = s.laplacian.flatten();
  double scale = 0.0;
  for (double x : b) scale = std::max(scale, std::abs(x));
  EXPECT_GT(scale, 1e-2);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-6) << i;
  uc::CurvatureState bare = uc::main_system_rhs(s.u, s.du, conn, pot, lambda);
  double gap = 0.0;
  const auto c = bare.flatten();
  for (std::size_t i = 0; i < c.size(); ++i) gap = std::max(gap, std::abs(c[i] - b[i]));
  EXPECT_GT(gap, 1e-3);
}

}  // namespace
