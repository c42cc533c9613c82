#include "uc/frame.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>

namespace {

using uc::FrameState;
using uc::MetricField;
using uc::NormalChart;

std::vector<double> random_direction(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  double s = 0;
  for (double& c : v) {
    c = g(rng);
    s += c * c;
  }
  for (double& c : v) c /= std::sqrt(s);
  return v;
}

double max_block(const std::array<double, FrameState::kBlocks>& d) { return *std::max_element(d.begin(), d.end()); }

TEST(FrameOde, FlatStateIsStationary) {
  for (int n : {2, 3, 4}) {
    FrameState v = FrameState::flat(n);
    std::vector<double> x(n, 0.0);
    x[0] = 0.3;
    x[n - 1] = -0.2;
    uc::CurvatureData zero{std::vector<double>(n * n * n * n, 0.0), std::vector<double>(n * n * n * n * n, 0.0)};
    FrameState d = uc::frame_ode_rhs(v, uc::RadialData::normal(x), zero);
    for (const auto* b : d.blocks())
      for (double c : *b) EXPECT_LE(std::abs(c), 1e-12);
  }
}

TEST(FrameOde, EuclideanIntegrationStaysFlat) {
  NormalChart chart(MetricField::euclidean(3), {0.1, 0.2, -0.3});
  std::vector<double> v{0.6, 0.0, 0.8};
  std::vector<double> radii{0.1, 0.5};
  auto samples = uc::integrate_frame(chart, v, radii);
  ASSERT_EQ(samples.size(), 2u);
  for (const auto& s : samples) {
    FrameState flat = FrameState::flat(3);
    EXPECT_LE(max_block(uc::block_deviation(s.state, flat)), 1e-10);
  }
}

TEST(FrameOde, SphereJacobiClosedForm) {
  // In the frame at the base point, Gamma_iY^j = v v^T + (I - v v^T) r cot r.
  NormalChart chart(MetricField::constant_curvature(3, 1.0), {0.3, 0.0, 0.0});
  std::mt19937_64 rng(3);
  std::vector<double> radii{0.1, 0.3, 0.5};
  for (int t = 0; t < 3; ++t) {
    auto v = random_direction(rng, 3);
    auto samples = uc::integrate_frame(chart, v, radii);
    for (const auto& s : samples) {
      const double r = s.state.radius;
      const double c = r / std::tan(r);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          const double expect = v[i] * v[j] + ((i == j) - v[i] * v[j]) * c;
          EXPECT_NEAR(s.state.gamma_y[i * 3 + j], expect, 1e-9);
        }
      EXPECT_LE(s.defects.max(), 1e-9);
    }
  }
}

TEST(FrameOde, ShootMatchesRadialDistance) {
  MetricField f = MetricField::constant_curvature(3, -1.0);
  NormalChart chart(f, {0.0, 0.0, 0.0});
  std::vector<double> x{0.3, -0.4, 0.2};
  auto shot = chart.shoot(x);
  const double d = std::sqrt(0.09 + 0.16 + 0.04);
  EXPECT_NEAR(f.distance_from_origin(shot.position), d, 1e-12);
  for (int a = 0; a < 3; ++a) EXPECT_NEAR(shot.position[a] * d, x[a] * std::sqrt(shot.position[0] * shot.position[0] + shot.position[1] * shot.position[1] + shot.position[2] * shot.position[2]), 1e-12);
}

TEST(FrameOde, AgreesWithOracleOnPresets) {
  std::mt19937_64 rng(7);
  std::vector<std::pair<MetricField, uc::Point>> cases = {
      {MetricField::constant_curvature(3, 1.0), {0.2, -0.1, 0.15}},
      {MetricField::constant_curvature(3, -1.0), {0.2, -0.1, 0.15}},
      {MetricField::random_perturbation(3, 0.1, 21), {0.05, 0.1, -0.05}},
  };
  for (auto& [f, p0] : cases) {
    NormalChart chart(f, p0);
    for (int t = 0; t < 2; ++t) {
      auto v = random_direction(rng, 3);
      std::vector<double> radii{0.25, 0.5};
      auto samples = uc::integrate_frame(chart, v, radii);
      for (const auto& s : samples) {
        auto o = uc::direct_frame_oracle(chart, v, s.state.radius);
        auto dev = uc::block_deviation(s.state, o.state);
        for (int k = 0; k < FrameState::kBlocks; ++k) {
          EXPECT_LE(dev[k], 1e-5) << FrameState::block_names()[k] << " at r=" << s.state.radius;
        }
        EXPECT_LE(s.defects.max(), 1e-7);
      }
    }
  }
}

TEST(FrameOde, SeedVariantsAgree) {
  NormalChart chart(MetricField::random_perturbation(3, 0.1, 5), {0.0, 0.1, 0.0});
  std::vector<double> v{0.0, 0.6, 0.8};
  std::vector<double> radii{0.4};
  uc::FrameIntegrationOptions a, b;
  b.seed = uc::FrameIntegrationOptions::Seed::taylor;
  auto sa = uc::integrate_frame(chart, v, radii, a);
  auto sb = uc::integrate_frame(chart, v, radii, b);
  EXPECT_LE(max_block(uc::block_deviation(sa[0].state, sb[0].state)), 1e-6);
}

TEST(FrameOde, GammaYDeviationIsQuadraticInRadius) {
  NormalChart chart(MetricField::random_perturbation(3, 0.1, 8), {0.0, 0.0, 0.1});
  std::vector<double> v{0.0, 0.0, 1.0};
  std::vector<double> radii{0.02, 0.04, 0.08, 0.16};
  auto samples = uc::integrate_frame(chart, v, radii);
  std::vector<double> dev;
  for (const auto& s : samples) {
    double m = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m = std::max(m, std::abs(s.state.gamma_y[i * 3 + j] - (i == j)));
    dev.push_back(m);
  }
  const double slope = std::log(dev.back() / dev.front()) / std::log(radii.back() / radii.front());
  EXPECT_GE(slope, 1.9);
}

TEST(FrameOde, RejectsTinySeedRadius) {
  NormalChart chart(MetricField::euclidean(3), {0, 0, 0});
  std::vector<double> v{1, 0, 0};
  std::vector<double> radii{0.1};
  uc::FrameIntegrationOptions o;
  o.r0 = 1e-9;
  EXPECT_THROW(uc::integrate_frame(chart, v, radii, o), uc::DomainError);
}

}  // namespace
