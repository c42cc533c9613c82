#include "uc/jet.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

namespace {

constexpr double kTol = 1e-12;

TEST(JetLayout, CountsAndPrefixes) {
  const auto& l = uc::JetLayout::get(3, 4);
  EXPECT_EQ(l.size(), 35u);
  EXPECT_EQ(l.prefix(0), 1u);
  EXPECT_EQ(l.prefix(1), 4u);
  EXPECT_EQ(l.prefix(2), 10u);
  const auto& low = uc::JetLayout::get(3, 2);
  for (std::size_t m = 0; m < low.size(); ++m) {
    for (int v = 0; v < 3; ++v) EXPECT_EQ(low.exponents(m)[v], l.exponents(m)[v]);
  }
  std::vector<int> e{1, 0, 2};
  long idx = l.index_of(e);
  ASSERT_GE(idx, 0);
  EXPECT_EQ(l.degree(idx), 3);
  EXPECT_DOUBLE_EQ(l.factorial_weight(idx), 2.0);
}

TEST(Jet, ExponentialPartialsMatchClosedForm) {
  // f = exp(x + 2y): d^{i+j} f / dx^i dy^j = 2^j f.
  const std::vector<double> p{0.3, -0.2};
  auto x = uc::variables(p, 4);
  uc::Jet f = uc::exp(x[0] + 2.0 * x[1]);
  const double f0 = std::exp(p[0] + 2 * p[1]);
  for (int i = 0; i <= 4; ++i) {
    for (int j = 0; i + j <= 4; ++j) {
      EXPECT_NEAR(f.partial({i, j}), std::pow(2.0, j) * f0, kTol * 20);
    }
  }
}

TEST(Jet, ElementaryIdentities) {
  const std::vector<double> p{0.7, 0.4, -0.1};
  auto x = uc::variables(p, 4);
  uc::Jet a = x[0] * x[0] + 0.5 * x[1] - x[0] * x[2] + 2.0;
  uc::Jet one = uc::sin(a) * uc::sin(a) + uc::cos(a) * uc::cos(a);
  EXPECT_NEAR(one.value(), 1.0, kTol);
  for (std::size_t i = 1; i < one.size(); ++i) EXPECT_NEAR(one[i], 0.0, kTol);
  uc::Jet back = uc::exp(uc::log(a)) - a;
  EXPECT_LT(back.max_abs(), 1e-11);
  uc::Jet sq = uc::sqrt(a) * uc::sqrt(a) - a;
  EXPECT_LT(sq.max_abs(), 1e-11);
  uc::Jet r = uc::reciprocal(a) * a - 1.0;
  EXPECT_LT(r.max_abs(), 1e-12);
  uc::Jet pw = uc::pow(a, 3.0) - a * a * a;
  EXPECT_LT(pw.max_abs(), 1e-10);
}

TEST(Jet, UnivariateTaylorCoefficients) {
  // 1/(1-x) around 0: coefficients all equal one.
  auto x = uc::variables(std::vector<double>{0.0}, 6);
  uc::Jet g = 1.0 / (1.0 - x[0]);
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_NEAR(g[k], 1.0, kTol);
}

TEST(Jet, DerivativeMatchesAnalytic) {
  const std::vector<double> p{0.2, 0.5};
  auto x = uc::variables(p, 3);
  uc::Jet f = uc::sin(x[0]) * x[1] * x[1];
  uc::Jet fx = f.derivative(0);
  uc::Jet fy = f.derivative(1);
  EXPECT_EQ(fx.order(), 2);
  EXPECT_NEAR(fx.value(), std::cos(p[0]) * p[1] * p[1], kTol);
  EXPECT_NEAR(fy.value(), 2 * std::sin(p[0]) * p[1], kTol);
  EXPECT_NEAR(fx.partial({1, 1}), -std::sin(p[0]) * 2 * p[1], kTol);
  EXPECT_NEAR(fy.partial({0, 2}), 0.0, kTol);
}

TEST(Jet, CompositionIsChainRule) {
  // h(x,y) = exp(u) with u = x*y + y, computed directly and by composing
  // the one-variable jet of exp at u0 with u - u0.
  const std::vector<double> p{0.4, -0.3};
  auto x = uc::variables(p, 4);
  uc::Jet u = x[0] * x[1] + x[1];
  auto t = uc::variables(std::vector<double>{u.value()}, 4);
  uc::Jet e1 = uc::exp(t[0]);
  std::vector<uc::Jet> z{u};
  uc::Jet composed = uc::compose(e1, z);
  uc::Jet direct = uc::exp(u);
  EXPECT_LT((composed - direct).max_abs(), 1e-13);
}

TEST(Jet, RescaleAndTruncate) {
  auto x = uc::variables(std::vector<double>{1.0}, 3);
  uc::Jet f = x[0] * x[0] * x[0];  // (1+h)^3 = 1 + 3h + 3h^2 + h^3
  uc::Jet g = f.rescaled(2.0);
  EXPECT_NEAR(g[1], 6.0, kTol);
  EXPECT_NEAR(g[2], 12.0, kTol);
  EXPECT_NEAR(g[3], 8.0, kTol);
  uc::Jet t = f.truncated(1);
  EXPECT_EQ(t.size(), 2u);
  uc::Jet mixed = f + t;
  EXPECT_EQ(mixed.order(), 1);
  EXPECT_NEAR(mixed[1], 6.0, kTol);
}

TEST(Jet, DomainErrors) {
  auto x = uc::variables(std::vector<double>{-1.0}, 2);
  EXPECT_THROW(uc::log(x[0]), std::runtime_error);
  EXPECT_THROW(uc::sqrt(x[0]), std::runtime_error);
}

}  // namespace
