#include "uc/carleman.hpp"
#include "uc/error.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace {

using namespace uc;

TEST(CarlemanParamsTest, HatRMatchesClosedForm) {
  EXPECT_NEAR(hat_r(0.25, 0.05), 0.25 * (1.0 - std::pow(0.25, 0.05)), 1e-15);
  EXPECT_EQ(hat_r(0.0, 0.1), 0.0);
  EXPECT_THROW(hat_r(1.0, 0.1), DomainError);
  EXPECT_THROW(hat_r(-0.1, 0.1), DomainError);
}

TEST(CarlemanParamsTest, HatRIncreasesUpToItsMaximum) {
  for (double d : {0.05, 0.1, 0.5}) {
    const double limit = hat_r_monotone_limit(d);
    // derivative 1 - (1 + d) r^d vanishes at the limit
    EXPECT_NEAR(1.0 - (1.0 + d) * std::pow(limit, d), 0.0, 1e-13);
    double prev = 0.0;
    for (int i = 1; i <= 400; ++i) {
      const double r = limit * i / 400.0;
      const double h = hat_r(r, d);
      EXPECT_GT(h, prev);
      prev = h;
    }
    EXPECT_LT(hat_r(std::min(0.99, limit * 1.5), d), prev);
  }
  // r-hat already decreases before r = 0.5 for delta = 0.1.
  EXPECT_LT(hat_r(0.5, 0.1), hat_r(0.4, 0.1));
}

TEST(CarlemanParamsTest, AbsorptionFactor) {
  CarlemanParams cp;
  EXPECT_NEAR(cp.absorption_factor(), std::pow(0.25, 0.05) / (1.0 - std::pow(0.25, 0.05)), 1e-14);
  EXPECT_FALSE(cp.absorption_factor_bounded());
  cp.R = 1e-7;
  cp.R0 = 0.2;
  EXPECT_TRUE(cp.absorption_factor_bounded());
}

TEST(CarlemanParamsTest, ValidateRejectsBadParameters) {
  CarlemanParams cp;
  EXPECT_NO_THROW(cp.validate());
  CarlemanParams bad = cp;
  bad.delta = 0.7;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = cp;
  bad.R = 0.4;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = cp;
  bad.n = 2;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = cp;
  bad.R0 = 0.45;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(CarlemanParamsTest, AdmissibleLambdas) {
  // n = 3: the lattice is k + 1/2, so the admissible values are the integers.
  EXPECT_TRUE(lambda_admissible(10.0, 3));
  EXPECT_FALSE(lambda_admissible(10.5, 3));
  EXPECT_FALSE(lambda_admissible(10.3, 3));
  // n = 4: lattice k + 1.
  EXPECT_TRUE(lambda_admissible(10.5, 4));
  EXPECT_FALSE(lambda_admissible(10.0, 4));
  for (int n : {3, 4, 5}) {
    for (double l = 0.25; l < 40.0; l += 0.125) {
      double dist = 1e9;
      for (int k = 1; k < 60; ++k) dist = std::min(dist, std::abs(l - (k + 0.5 * (n - 2))));
      EXPECT_EQ(lambda_admissible(l, n), dist >= 0.5 - 1e-12) << "n = " << n << " lambda = " << l;
    }
  }
}

TEST(CarlemanParamsTest, LebesgueExponentsAreDual) {
  for (int n = 3; n < 8; ++n) {
    const auto e = lebesgue_exponents(n);
    EXPECT_NEAR(1.0 / e.p + 1.0 / e.q, 1.0, 1e-15);
    EXPECT_NEAR(1.0 / e.p - 1.0 / e.q, 2.0 / n, 1e-15);
  }
}

double chi_at(const Bump& phi, int k, std::vector<double> x) { return cutoff_chi(phi, k, std::span<const double>(x)); }

TEST(CutoffTest, ChiMatchesItsSupportAndJets) {
  const Bump phi(0.5);
  for (int k = 0; k < 5; ++k) {
    const double s = std::ldexp(1.0, -k);
    EXPECT_EQ(chi_at(phi, k, {0.4 * s, 0.0, 0.0}), 0.0);
    EXPECT_EQ(chi_at(phi, k, {0.0, s, 0.0}), 1.0);
    const std::vector<double> p = {0.3 * s, 0.4 * s, 0.2 * s};
    auto x = variables(p, 2);
    Jet j = cutoff_chi(phi, k, x);
    EXPECT_NEAR(j.value(), chi_at(phi, k, p), 1e-15);
  }
}

TEST(CutoffTest, SecondDerivativesScaleLikeFourToTheK) {
  // |D^2 chi_k| <= C 4^k with C from k = 0; derivatives checked against differences.
  const Bump phi(0.5);
  double c0 = 0.0;
  for (int k = 0; k < 6; ++k) {
    const double s = std::ldexp(1.0, -k);
    double mx = 0.0;
    for (int i = 1; i < 60; ++i) {
      const double rho = s * (0.5 + 0.5 * i / 60.0);
      const std::vector<double> p = {rho * 0.6, rho * 0.8, 0.0};
      Jet j = cutoff_chi(phi, k, variables(p, 2));
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          int alpha[3] = {0, 0, 0};
          ++alpha[a];
          ++alpha[b];
          mx = std::max(mx, std::abs(j.partial(std::span<const int>(alpha, 3))));
        }
      }
      const double h = 1e-4 * s;
      std::vector<double> pp = p, pm = p;
      pp[0] += h;
      pm[0] -= h;
      const double fd = (chi_at(phi, k, pp) - 2.0 * chi_at(phi, k, p) + chi_at(phi, k, pm)) / (h * h);
      EXPECT_NEAR(j.partial({2, 0, 0}), fd, 1e-5 * std::pow(4.0, k) + 1e-4 * std::abs(fd));
    }
    if (k == 0) c0 = mx;
    EXPECT_LE(mx, c0 * std::pow(4.0, k) * (1.0 + 1e-6));
    EXPECT_GE(mx, 0.5 * c0 * std::pow(4.0, k));
  }
}

TEST(QuadratureTest, BallVolumeAndMoments) {
  for (int n : {3, 4, 5}) {
    auto g = QuadratureGrid::ball(n, 0.25, 6, 16, 8);
    std::vector<double> one(g.size(), 1.0), r2(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) r2[i] = g.r(i) * g.r(i);
    double vol = 0.0, mom = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      vol += g.weight(i);
      mom += g.weight(i) * r2[i];
    }
    const double tol = 1e-11;
    EXPECT_NEAR(vol / ball_volume(n, 0.25), 1.0, tol);
    EXPECT_NEAR(mom / (sphere_area(n) * std::pow(0.25, n + 2) / (n + 2)), 1.0, tol);
  }
}

TEST(QuadratureTest, SphereRulesIntegratePolynomials) {
  for (int n : {3, 4}) {
    auto g = QuadratureGrid::ball(n, 0.5, 0, 8, 8);
    double area = 0.0, x0sq = 0.0, x0x1 = 0.0, x0q = 0.0;
    for (const auto& [p, w] : g.sphere()) {
      area += w;
      x0sq += w * p[0] * p[0];
      x0x1 += w * p[0] * p[1];
      x0q += w * std::pow(p[1], 4);
    }
    EXPECT_NEAR(area, sphere_area(n), 1e-12);
    EXPECT_NEAR(x0sq, sphere_area(n) / n, 1e-12);
    EXPECT_NEAR(x0x1, 0.0, 1e-12);
    EXPECT_NEAR(x0q, 3.0 * sphere_area(n) / (n * (n + 2.0)), 1e-12);
  }
  auto g5 = QuadratureGrid::ball(5, 0.5, 0, 8, 8);
  EXPECT_GT(g5.sphere_error(), 0.0);
  double x0sq = 0.0;
  for (const auto& [p, w] : g5.sphere()) x0sq += w * p[0] * p[0];
  EXPECT_NEAR(x0sq / (sphere_area(5) / 5.0), 1.0, 5.0 * g5.sphere_error());
}

TEST(WeightedNormTest, MatchesDirectSumAndScales) {
  auto fs = infinite_order_corpus(3, 0.25);
  auto g = QuadratureGrid::ball(3, 0.25, 10, 16, 8);
  auto s = sample(fs[1], g);
  WeightedNormOptions opt;
  const double lam = 5.0;
  double direct = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    direct += g.weight(i) * std::pow(std::pow(hat_r(g.r(i), opt.delta), -lam) * s.u[i], 2);
  }
  EXPECT_NEAR(weighted_norm(s.u, g, CarlemanLambda(lam), opt) / std::sqrt(direct), 1.0, 1e-12);
  std::vector<double> scaled(s.u);
  for (double& v : scaled) v *= -3.0;
  EXPECT_NEAR(weighted_norm(scaled, g, CarlemanLambda(lam), opt) / weighted_norm(s.u, g, CarlemanLambda(lam), opt),
              3.0, 1e-12);
  std::vector<double> zero(g.size(), 0.0);
  EXPECT_EQ(weighted_norm(zero, g, CarlemanLambda(lam), opt), 0.0);
}

TEST(WeightedNormTest, UnresolvedCoreThrows) {
  auto g = QuadratureGrid::ball(3, 0.25, 2, 8, 0);
  std::vector<double> one(g.size(), 1.0);
  WeightedNormOptions opt;
  EXPECT_THROW(weighted_norm(one, g, CarlemanLambda(30.0), opt), NumericalError);
}

TEST(WeightedNormTest, SelfConvergesUnderRefinement) {
  CarlemanParams cp;
  for (const auto& f : infinite_order_corpus(3, cp.R)) {
    const double lam = 8.0;
    const int lv = levels_for(f, cp, CarlemanLambda(lam));
    auto g = QuadratureGrid::ball(3, cp.R, lv, 16, f.radial ? 0 : 8);
    auto gr = g.refined();
    WeightedNormOptions opt;
    const double a = weighted_norm(sample(f, g).u, g, CarlemanLambda(lam), opt);
    const double b = weighted_norm(sample(f, gr).u, gr, CarlemanLambda(lam), opt);
    EXPECT_NEAR(a / b, 1.0, 1e-6) << f.name;
  }
}

TEST(SampleTest, DerivativesMatchClosedForm) {
  // u = r^3 phi(r/S): on the plateau, grad u = 3 r x, Lap u = 12 r, Y u = 3 u.
  auto f = finite_order_corpus(3, 0.25)[0];
  auto g = QuadratureGrid::ball(3, 0.1, 1, 4, 4);
  auto s = sample(f, g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = g.r(i);
    EXPECT_NEAR(s.u[i], r * r * r, 1e-15);
    EXPECT_NEAR(s.grad_norm[i], 3.0 * r * r, 1e-14);
    EXPECT_NEAR(s.y[i], 3.0 * s.u[i], 1e-14);
    EXPECT_NEAR(s.laplacian[i], 12.0 * r, 1e-12);
  }
}

TEST(Lemma2Test, ZeroFunctionIsVacuous) {
  CarlemanParams cp;
  std::vector<double> lambdas = {5.0, 10.0};
  auto rep = lemma2_verify(zero_function(3, cp.R), lambdas, cp, 1.0);
  for (const auto& row : rep.rows) {
    EXPECT_TRUE(row.vacuous);
    EXPECT_EQ(row.ratio, 0.0);
  }
  EXPECT_TRUE(rep.holds);
}

TEST(Lemma2Test, RejectsSmallLambdaAndLargeSupport) {
  CarlemanParams cp;
  std::vector<double> small = {2.0};
  EXPECT_THROW(lemma2_verify(zero_function(3, cp.R), small, cp, 1.0), DomainError);
  std::vector<double> ok = {5.0};
  EXPECT_THROW(lemma2_verify(zero_function(3, 0.3), ok, cp, 1.0), DomainError);
}

TEST(Lemma2Test, DivergentNormOfFiniteOrderFunctionIsDetected) {
  // r^8 has a finite weighted L2 norm only while 2 lambda < 2 m + n.
  CarlemanParams cp;
  auto f = finite_order_corpus(3, cp.R)[2];
  std::vector<double> small = {5.0};
  EXPECT_GT(lemma2_verify(f, small, cp, 100.0).rows[0].ratio, 0.0);
  std::vector<double> large = {40.0};
  EXPECT_THROW(lemma2_verify(f, large, cp, 100.0), NumericalError);
}

TEST(Lemma2Test, IntegrationByPartsIdentity) {
  CarlemanParams cp;
  for (const auto& f : infinite_order_corpus(3, cp.R)) {
    for (double lam : {4.0, 12.0}) {
      const int lv = levels_for(f, cp, CarlemanLambda(lam));
      auto c = lemma2_by_parts(f, CarlemanLambda(lam), cp, lv);
      EXPECT_LT(c.relative_error, 1e-6) << f.name << " lambda " << lam;
    }
  }
}

TEST(Lemma2Test, ParallelMatchesSerial) {
  CarlemanParams cp;
  auto f = infinite_order_corpus(3, cp.R)[3];
  std::vector<double> lambdas = {4.0, 8.0, 16.0};
  auto a = lemma2_verify(f, lambdas, cp, 10.0, 1);
  auto b = lemma2_verify(f, lambdas, cp, 10.0, 3);
  for (std::size_t i = 0; i < lambdas.size(); ++i) EXPECT_EQ(a.rows[i].ratio, b.rows[i].ratio);
}

TEST(SoggeTest, SkipsInadmissibleLambdas) {
  CarlemanParams cp;
  auto f = origin_excluded_corpus(3, cp.R)[0];
  std::vector<double> lambdas = {6.0, 6.5, 7.0};
  auto rep = sogge_probe(f, lambdas, cp);
  EXPECT_TRUE(rep.rows[0].admissible);
  EXPECT_FALSE(rep.rows[1].admissible);
  EXPECT_FALSE(rep.rows[1].skipped.empty());
  EXPECT_GT(rep.rows[2].ratio, 0.0);
}

TEST(SoggeTest, RequiresExcisedOrigin) {
  CarlemanParams cp;
  std::vector<double> lambdas = {6.0};
  EXPECT_THROW(sogge_probe(infinite_order_corpus(3, cp.R)[0], lambdas, cp), DomainError);
}

TEST(HolderTest, BoundsHoldForCorpus) {
  CarlemanParams cp;
  auto g = QuadratureGrid::ball(3, cp.R, 12, 16, 8);
  for (const auto& f : infinite_order_corpus(3, cp.R)) {
    auto s = sample(f, g);
    auto h = holder_step_check(s.u, g);
    EXPECT_TRUE(h.holds) << f.name;
    EXPECT_LE(h.lp, h.bound_p);
  }
  std::vector<double> one(g.size(), 1.0);
  auto h = holder_step_check(one, g);
  // constants are attained by constants
  EXPECT_NEAR(h.lp / h.bound_p, 1.0, 1e-10);
  EXPECT_NEAR(h.l2 / h.bound_2, 1.0, 1e-10);
}

TEST(CorpusTest, VanishingOrdersAndSupports) {
  for (const auto& f : finite_order_corpus(3, 0.25)) {
    ASSERT_TRUE(f.vanishing_order.has_value());
    const int m = *f.vanishing_order;
    const std::vector<double> a = {0.01, 0.0, 0.0}, b = {0.02, 0.0, 0.0};
    auto ja = taylor_expand(f.fn, a, 0, DiffBackend::analytic());
    auto jb = taylor_expand(f.fn, b, 0, DiffBackend::analytic());
    EXPECT_NEAR(jb.value() / ja.value(), std::pow(2.0, m), 1e-9);
  }
  for (const auto& f : origin_excluded_corpus(3, 0.25)) {
    const std::vector<double> in = {0.5 * f.inner_radius, 0.0, 0.0}, out = {f.support_radius * 1.01, 0.0, 0.0};
    EXPECT_EQ(taylor_expand(f.fn, in, 0, DiffBackend::analytic()).value(), 0.0) << f.name;
    EXPECT_EQ(taylor_expand(f.fn, out, 0, DiffBackend::analytic()).value(), 0.0) << f.name;
  }
}

}  // namespace

namespace {

using namespace uc;

TEST(CarlemanParamsTest, HatROverRIsOneMinusRToTheDelta) {
  for (double r : {1e-8, 1e-4, 0.1, 0.3}) {
    EXPECT_NEAR(hat_r(r, 0.05) / r, 1.0 - std::pow(r, 0.05), 1e-15);
    EXPECT_LE(hat_r(r, 0.05), r);
  }
  EXPECT_NEAR(hat_r(1e-8, 2.0) / 1e-8, 1.0, 1e-6);
}

TEST(WeightedNormTest, UnweightedConstantGivesVolume) {
  auto g = QuadratureGrid::ball(3, 0.25, 8, 16, 0);
  std::vector<double> one(g.size(), 1.0);
  WeightedNormOptions opt;
  EXPECT_NEAR(weighted_norm(one, g, CarlemanLambda(0.0), opt), std::sqrt(ball_volume(3, 0.25)), 1e-8);
}

TEST(WeightedNormTest, DoublingResolutionAtLambdaTwenty) {
  TestFunction f = infinite_order_corpus(3, 0.5)[0];
  CarlemanParams cp;
  cp.R = 0.5;
  const int lv = levels_for(f, cp, CarlemanLambda(20.0), 1e-10);
  auto g = QuadratureGrid::ball(3, 0.5, lv, 32, 0);
  auto gr = g.refined();
  WeightedNormOptions opt;
  const double a = weighted_norm(sample(f, g).u, g, CarlemanLambda(20.0), opt);
  const double b = weighted_norm(sample(f, gr).u, gr, CarlemanLambda(20.0), opt);
  EXPECT_NEAR(a / b, 1.0, 1e-8);
}

TEST(Lemma2Test, RatiosConfirmedAtDoubleResolution) {
  CarlemanParams cp;
  const auto f = infinite_order_corpus(3, cp.R)[0];
  const std::vector<double> lambdas = {4.0, 8.0, 16.0, 32.0, 64.0};
  auto rep = lemma2_verify(f, lambdas, cp, 1e9);
  WeightedNormOptions opt;
  for (const auto& row : rep.rows) {
    EXPECT_TRUE(std::isfinite(row.ratio));
    auto g = QuadratureGrid::ball(3, cp.R, row.levels + 4, 32, 0);
    auto s = sample(f, g);
    const double lam = row.lambda;
    const double ratio = lam * weighted_norm(s.u, g, CarlemanLambda(lam), opt) /
                         weighted_norm(s.y, g, CarlemanLambda(lam), opt);
    EXPECT_NEAR(row.ratio / ratio, 1.0, 5e-4) << lam;
  }
  EXPECT_NEAR(rep.measured_constant, 1.1 * rep.sup_ratio, 1e-15);
}

TEST(SoggeTest, RatioIsHomogeneous) {
  CarlemanParams cp;
  auto f = origin_excluded_corpus(3, cp.R)[1];
  TestFunction twice = f;
  twice.fn = [g = f.fn](std::span<const Jet> x) { return 2.0 * g(x); };
  std::vector<double> lambdas = {6.0, 12.0};
  auto a = sogge_probe(f, lambdas, cp);
  auto b = sogge_probe(twice, lambdas, cp);
  for (std::size_t i = 0; i < lambdas.size(); ++i) EXPECT_NEAR(a.rows[i].ratio / b.rows[i].ratio, 1.0, 1e-12);
}

TEST(SoggeTest, ZeroFunctionIsVacuous) {
  CarlemanParams cp;
  TestFunction z = zero_function(3, cp.R);
  z.inner_radius = 0.05;
  std::vector<double> lambdas = {6.0};
  auto rep = sogge_probe(z, lambdas, cp);
  EXPECT_TRUE(rep.rows[0].vacuous);
}

TEST(HolderTest, RandomSmoothFields) {
  auto g = QuadratureGrid::ball(3, 0.25, 6, 16, 8);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 100; ++trial) {
    double c[4];
    for (double& v : c) v = nd(rng);
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto p = g.point(i);
      f[i] = c[0] + c[1] * std::sin(9.0 * p[0]) + c[2] * p[1] * p[2] * 30.0 + c[3] * std::exp(-40.0 * g.r(i));
    }
    EXPECT_TRUE(holder_step_check(f, g).holds) << trial;
  }
}

TEST(HolderTest, SmallSupportScaling) {
  // For the indicator of B_s, ||1||_p / ||1||_q = |B_s|^{1/p - 1/q} = |B_s|^{2/n}.
  auto g = QuadratureGrid::ball(3, 0.25, 10, 16, 0);
  for (int j : {2, 4, 6}) {
    const double s = 0.25 * std::ldexp(1.0, -j);
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) f[i] = g.r(i) <= s ? 1.0 : 0.0;
    auto h = holder_step_check(f, g);
    EXPECT_NEAR(h.lp / h.lq / std::pow(ball_volume(3, s), 2.0 / 3.0), 1.0, 1e-10);
  }
}

}  // namespace
