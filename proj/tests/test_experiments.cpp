#include "uc/experiments.hpp"
#include "uc/error.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

using namespace uc;

double eval(const ScalarFn& f, std::vector<double> p) {
  return taylor_expand(f, p, 0, DiffBackend::analytic()).value();
}

TEST(ModelResidualsTest, ZeroPairHasZeroResiduals) {
  auto g = QuadratureGrid::ball(3, 0.25, 4, 4, 4);
  auto r = model_residuals(zero_pair(), g, {}, 1.0);
  EXPECT_EQ(r.max_res_u, 0.0);
  EXPECT_EQ(r.max_res_v, 0.0);
  EXPECT_EQ(r.max_slack_u, 0.0);
  EXPECT_EQ(r.max_slack_v, 0.0);
}

TEST(ModelResidualsTest, ManufacturedPairSolvesThePdeExactly) {
  ScalarFn u = [](std::span<const Jet> x) { return sin(x[0] + 0.5 * x[1]) * exp(0.3 * x[2]) + x[0] * x[1] * x[2]; };
  ModelCoefficients c{0.7, -1.3, 2.0};
  ModelPair pair = manufactured_pair("wavy", u, 0, c);
  auto g = QuadratureGrid::ball(3, 0.5, 3, 4, 4);
  auto r = model_residuals(pair, g, c, 1.0);
  EXPECT_LT(r.max_res_u, 1e-12);
  EXPECT_GT(r.max_res_v, 1e-3);  // the ODE is not manufactured
  // A budget covering |a_u| + |a_grad| + |a_v| bounds |Lap u| by the inequality form.
  auto covered = model_residuals(pair, g, c, 2.0);
  EXPECT_EQ(covered.max_slack_u, 0.0);
  auto tight = model_residuals(pair, g, c, 0.01);
  EXPECT_GT(tight.max_slack_u, 0.0);
}

TEST(ModelResidualsTest, DeclaredOrdersHold) {
  for (const auto& p : model_corpus()) EXPECT_TRUE(verify_declared_order(p, 3)) << p.name;
  ModelPair wrong = model_corpus()[1];
  wrong.vanishing_order = 8;
  EXPECT_FALSE(verify_declared_order(wrong, 3));
}

TEST(CutoffPairTest, SupportsMatchTheConstruction) {
  const double R = 0.25;
  ModelPair pair = model_corpus()[0];
  for (int k : {0, 2, 4}) {
    CutoffPair cp = assemble_cutoff_pair(pair, k, R);
    const double s = std::ldexp(1.0, -k);
    EXPECT_EQ(eval(cp.uk, {0.9 * s * R, 0.0, 0.0}), 0.0);
    EXPECT_EQ(eval(cp.uk, {0.0, 1.01, 0.0}), 0.0);
    EXPECT_EQ(eval(cp.vphi, {0.0, 0.0, 1.01}), 0.0);
    if (s < 0.2) {
      EXPECT_NEAR(eval(cp.uk, {0.0, 0.0, 0.2}), eval(pair.u, {0.0, 0.0, 0.2}), 1e-15);
    }
    // Leibniz terms live on B_{2^-k} minus B_{2^-k R}.
    double inside = 0.0;
    for (int i = 0; i < 40; ++i) {
      const double rho = s * (0.01 + 1.2 * i / 40.0);
      const double l = std::abs(eval(cp.leibniz, {rho * 0.6, rho * 0.8, 0.0}));
      if (rho <= s * R || rho >= s) {
        EXPECT_EQ(l, 0.0) << "k " << k << " rho " << rho;
      } else {
        inside = std::max(inside, l);
      }
    }
    EXPECT_GT(inside, 0.0);
  }
}

TEST(CutoffPairTest, LeibnizTermMatchesProductRule) {
  ScalarFn u = [](std::span<const Jet> x) { return 1.0 + x[0] + x[1] * x[2]; };
  ModelPair pair = manufactured_pair("poly", u, 0);
  const int k = 1;
  const double R = 0.25;
  CutoffPair cp = assemble_cutoff_pair(pair, k, R);
  const Bump phi(R);
  ScalarFn chi_u = [&](std::span<const Jet> x) { return cutoff_chi(phi, k, x) * u(x); };
  for (double rho : {0.2, 0.3, 0.4}) {
    std::vector<double> p = {rho * 0.48, rho * 0.6, rho * 0.64};
    Jet a = taylor_expand(chi_u, p, 2, DiffBackend::analytic());
    Jet b = taylor_expand(u, p, 2, DiffBackend::analytic());
    Jet c = taylor_expand([&](std::span<const Jet> x) { return cutoff_chi(phi, k, x); }, p, 2,
                          DiffBackend::analytic());
    double lap = 0.0, chilap = 0.0;
    for (int i = 0; i < 3; ++i) {
      int al[3] = {0, 0, 0};
      al[i] = 2;
      lap += a.partial(std::span<const int>(al, 3));
      chilap += c.value() * b.partial(std::span<const int>(al, 3));
    }
    EXPECT_NEAR(eval(cp.leibniz, p), lap - chilap, 1e-8 * (1.0 + std::abs(lap)));
  }
}

TEST(VanishingOrderTest, MonomialExponentialAndConstant) {
  const std::vector<double> p0 = {0.0, 0.0, 0.0};
  const auto radii = default_vanishing_radii();
  auto cubic = [](std::span<const double> x) {
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    return r * r * (x[0] + 0.5 * x[1]);
  };
  EXPECT_NEAR(vanishing_order_estimate(cubic, p0, radii).slope, 3.0, 0.1);
  auto flat = [](std::span<const double> x) {
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    return std::exp(-1.0 / r);
  };
  auto o = vanishing_order_estimate(flat, p0, radii);
  EXPECT_TRUE(o.infinite);
  EXPECT_GE(o.slope, kVanishingOrderCap);
  auto one = [](std::span<const double>) { return 2.5; };
  EXPECT_NEAR(vanishing_order_estimate(one, p0, radii).slope, 0.0, 0.05);
  auto zero = [](std::span<const double>) { return 0.0; };
  EXPECT_TRUE(vanishing_order_estimate(zero, p0, radii).all_zero);
}

TEST(ChainReportTest, ZeroPairGivesZeroTerms) {
  CarlemanParams cp;
  cp.R = 0.2;
  std::vector<double> lambdas = {10.0, 20.0};
  auto rep = chain_report(zero_pair(), lambdas, cp);
  for (const auto& row : rep.rows) {
    EXPECT_EQ(row.uk_q, 0.0);
    EXPECT_EQ(row.lap_uk_p, 0.0);
    EXPECT_EQ(row.lambda_v_2, 0.0);
    EXPECT_EQ(row.leibniz_bound, 0.0);
    EXPECT_EQ(row.final_constant, 0.0);
  }
}

TEST(ChainReportTest, AbsorptionFlagsFollowCoefficients) {
  CarlemanParams cp;
  cp.R = 0.2;
  std::vector<double> lambdas = {10.0, 60.0};
  ChainOptions opt;
  opt.carleman_constant = 10.0;
  auto rep = chain_report(model_corpus()[0], lambdas, cp, opt);
  EXPECT_TRUE(rep.absorption_consistent);
  for (const auto& row : rep.rows) {
    EXPECT_NEAR(row.coef_lambda, 10.0 / row.lambda, 1e-15);
    EXPECT_EQ(row.absorbed_lambda, row.coef_lambda < 0.5);
    EXPECT_TRUE(std::isfinite(row.final_constant));
    EXPECT_GT(row.uk_q, 0.0);
    // u_k = u on B_R away from the excised ball.
    EXPECT_NEAR(row.uk_q / row.chi_u_q, 1.0, 1e-12);
  }
  EXPECT_FALSE(rep.rows[0].absorbed_lambda);
  EXPECT_TRUE(rep.rows[1].absorbed_lambda);
}

TEST(ChainReportTest, RejectsInadmissibleOrSmallLambda) {
  CarlemanParams cp;
  cp.R = 0.2;
  std::vector<double> small = {2.0}, half = {10.5};
  EXPECT_THROW(chain_report(zero_pair(), small, cp), DomainError);
  EXPECT_THROW(chain_report(zero_pair(), half, cp), DomainError);
}

TEST(ContrastTest, FiniteOrderNormsDivergeAndSeparate) {
  CarlemanParams cp;
  cp.R = 0.2;
  std::vector<TestFunction> corpus = {infinite_order_corpus(3, cp.R)[3], finite_order_corpus(3, cp.R)[1]};
  std::vector<double> lambdas = {4.0, 10.0, 20.0};
  auto rep = mechanism_contrast(corpus, lambdas, cp);
  // r^5: the weighted L^q norm is finite iff lambda < 5 + n/q.
  EXPECT_FALSE(rep.values[1][0].divergent);
  EXPECT_TRUE(rep.values[1][1].divergent);
  EXPECT_TRUE(rep.finite_order_diverges);
  EXPECT_TRUE(rep.separated);
  for (const auto& v : rep.values[0]) EXPECT_TRUE(std::isfinite(v.value));
}

TEST(DecayTest, LeibnizTermVanishesForLargeK) {
  CarlemanParams cp;
  cp.R = 0.2;
  std::vector<int> ks = {6, 7, 8};
  auto rep = leibniz_decay(model_corpus()[0].u, CarlemanLambda(10.0), cp, ks);
  EXPECT_TRUE(rep.monotone);
  EXPECT_LT(rep.values.back(), 1e-50);
}

DifferenceOptions fast() {
  DifferenceOptions o;
  o.sphere_order = 2;
  o.levels = 1;
  return o;
}

TEST(DifferencePipelineTest, IdenticalSolutionsHaveNoDifference) {
  auto s = sphere_solution(3, 1.0, {0.1, -0.05, 0.08});
  auto rep = difference_pipeline(s, s, fast());
  EXPECT_LE(rep.max_du, 1e-10);
  EXPECT_LE(rep.max_dv, 1e-10);
  EXPECT_TRUE(rep.order.infinite);
  EXPECT_TRUE(rep.hypothesis_holds);
}

TEST(DifferencePipelineTest, RotatedChartsAgree) {
  const double t = 0.9;
  std::vector<double> q = {std::cos(t), 0.0, -std::sin(t), 0.0, 1.0, 0.0, std::sin(t), 0.0, std::cos(t)};
  auto s = sphere_solution(3, 1.0, {0.1, -0.05, 0.08});
  auto rep = difference_pipeline(s, rotated(s, q), fast());
  EXPECT_LE(rep.max_du, 1e-6);
  EXPECT_LE(rep.max_dv, 1e-6);
  EXPECT_TRUE(rep.hypothesis_holds);
  // a metric without rotational symmetry
  for (const auto& e : exact_solution_presets(3)) {
    if (e.name != "product_linear_field") continue;
    SolutionSpec p{e.name, e.metric, e.field, e.potential, e.lambda, e.sample_point, {}};
    auto r = difference_pipeline(p, rotated(p, q), fast());
    EXPECT_LE(r.max_du, 1e-6);
    EXPECT_LE(r.max_dv, 1e-6);
  }
}

TEST(DifferencePipelineTest, PerturbedCurvatureDisagreesAtOrderZero) {
  const Point base = {0.1, -0.05, 0.08};
  auto rep = difference_pipeline(sphere_solution(3, 1.0, base), sphere_solution(3, 1.1, base), fast());
  EXPECT_EQ(rep.first_disagreement_order, 0);
  EXPECT_FALSE(rep.hypothesis_holds);
  const int n = 3;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double expect = 0.1 * ((i == k) * (j == l) - (i == l) * (j == k));
          EXPECT_NEAR(rep.riemann_difference_at_base[((i * n + j) * n + k) * n + l], expect, 1e-6);
        }
}

TEST(DifferencePipelineTest, SwappingNegatesExactly) {
  const Point base = {0.1, -0.05, 0.08};
  auto a = sphere_solution(3, 1.0, base), b = sphere_solution(3, 1.1, base);
  auto ab = difference_pipeline(a, b, fast());
  auto ba = difference_pipeline(b, a, fast());
  ASSERT_EQ(ab.du.size(), ba.du.size());
  for (std::size_t i = 0; i < ab.du.size(); ++i) EXPECT_EQ(ab.du[i], -ba.du[i]);
  for (std::size_t i = 0; i < ab.dv.size(); ++i) EXPECT_EQ(ab.dv[i], -ba.dv[i]);
}

TEST(DifferencePipelineTest, ScalarFieldScalingInFlatSpace) {
  auto flat = [](std::string name, double c, std::vector<double> w) {
    ScalarSolution s;
    s.phi = [c, w](std::span<const Jet> x) { return c * (w[0] * x[0] + w[1] * x[1] + w[2] * x[2]); };
    return SolutionSpec{name, MetricField::euclidean(3), s, Potential::zero(), CosmologicalConstant(0.0),
                        {0.0, 0.0, 0.0}, {}};
  };
  DifferenceOptions o = fast();
  o.require_on_shell = false;
  const double c = 3.0;
  auto one = difference_pipeline(flat("a", 1.0, {0.3, 0.1, 0.0}), flat("b", 1.0, {0.2, 0.0, -0.4}), o);
  auto three = difference_pipeline(flat("a", c, {0.3, 0.1, 0.0}), flat("b", c, {0.2, 0.0, -0.4}), o);
  const std::size_t usize = CurvatureState(3).size();
  const std::size_t grad0 = 81 + 1;
  for (std::size_t node = 0; node < one.points; ++node) {
    for (std::size_t a = 0; a < 3; ++a) {
      const double x = one.du[node * usize + grad0 + a], y = three.du[node * usize + grad0 + a];
      EXPECT_NEAR(y, c * x, 1e-12);
    }
    for (std::size_t a = 0; a < 81; ++a) EXPECT_EQ(three.du[node * usize + a], 0.0);
  }
}

TEST(DifferencePipelineTest, OffShellInputIsRejected) {
  auto s = sphere_solution(3, 1.0, {0.1, 0.0, 0.0});
  auto bad = s;
  bad.lambda = CosmologicalConstant(1.0);
  EXPECT_THROW(difference_pipeline(s, bad, fast()), DomainError);
}

}  // namespace
