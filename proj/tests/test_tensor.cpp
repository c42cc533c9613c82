#include "uc/tensor.hpp"

#include <gtest/gtest.h>

#include <random>

namespace {

using uc::Tensor;
using uc::Variance;

Tensor random_tensor(int n, std::vector<Variance> v, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  Tensor t(n, std::move(v));
  for (double& x : t.data()) x = u(rng);
  return t;
}

Tensor spd(int n, std::mt19937_64& rng) {
  Tensor a = random_tensor(n, uc::lower_slots(2), rng);
  Tensor g(n, uc::lower_slots(2));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = (i == j) ? n : 0.0;
      for (int k = 0; k < n; ++k) s += a(i, k) * a(j, k);
      g(i, j) = s;
    }
  return g;
}

TEST(Tensor, ContractMatchesExplicitSum) {
  std::mt19937_64 rng(1);
  Tensor t = random_tensor(3, {Variance::upper, Variance::lower, Variance::lower}, rng);
  Tensor c = uc::contract(t, 0, 2);
  ASSERT_EQ(c.rank(), 1);
  for (int j = 0; j < 3; ++j) {
    double s = t(0, j, 0) + t(1, j, 1) + t(2, j, 2);
    EXPECT_NEAR(c(j), s, 1e-15);
  }
  EXPECT_THROW(uc::contract(t, 1, 2), uc::ShapeError);
}

TEST(Tensor, RaiseLowerRoundTrip) {
  std::mt19937_64 rng(2);
  uc::MetricAtPoint g(spd(4, rng));
  Tensor t = random_tensor(4, uc::lower_slots(3), rng);
  for (int slot = 0; slot < 3; ++slot) {
    Tensor back = uc::lower(uc::raise(t, slot, g.g_inv()), slot, g.g());
    EXPECT_LT(uc::sup_norm(back - t), 1e-12);
  }
  EXPECT_THROW(uc::lower(t, 0, g.g()), uc::ShapeError);
}

TEST(Tensor, MetricValidation) {
  Tensor bad(2, uc::lower_slots(2));
  bad(0, 0) = 1;
  bad(1, 1) = -1;
  EXPECT_THROW(uc::MetricAtPoint{bad}, uc::DomainError);
  Tensor asym(2, uc::lower_slots(2));
  asym(0, 0) = asym(1, 1) = 1;
  asym(0, 1) = 0.1;
  EXPECT_THROW(uc::MetricAtPoint{asym}, uc::DomainError);
}

TEST(Tensor, TensorProductAndPermute) {
  std::mt19937_64 rng(3);
  Tensor a = random_tensor(3, {Variance::lower}, rng);
  Tensor b = random_tensor(3, {Variance::upper}, rng);
  Tensor ab = uc::tensor_product(a, b);
  const int perm[] = {1, 0};
  Tensor ba = uc::permute(ab, perm);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      EXPECT_DOUBLE_EQ(ab(i, j), a(i) * b(j));
      EXPECT_DOUBLE_EQ(ba(j, i), ab(i, j));
    }
  EXPECT_EQ(ba.variance()[0], Variance::upper);
}

TEST(Tensor, FrameComponentsOfMetricIsIdentityForOrthonormalFrame) {
  std::mt19937_64 rng(4);
  Tensor g = spd(3, rng);
  uc::MetricAtPoint m(g);
  // Gram-Schmidt on coordinate vectors.
  std::vector<std::vector<double>> e;
  for (int i = 0; i < 3; ++i) {
    std::vector<double> v(3, 0.0);
    v[i] = 1.0;
    for (const auto& f : e) {
      double c = m.inner(v, f);
      for (int a = 0; a < 3; ++a) v[a] -= c * f[a];
    }
    double nv = std::sqrt(m.inner(v, v));
    for (double& x : v) x /= nv;
    e.push_back(v);
  }
  Tensor id = uc::frame_components(g, e);
  Tensor inv = uc::frame_components(m.g_inv(), e);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      EXPECT_NEAR(id(i, j), i == j ? 1.0 : 0.0, 1e-13);
      EXPECT_NEAR(inv(i, j), i == j ? 1.0 : 0.0, 1e-13);
    }
}

TEST(Tensor, JetInverseMatchesDoubleInverse) {
  std::mt19937_64 rng(5);
  Tensor g = spd(3, rng);
  std::vector<uc::Jet> a;
  auto x = uc::variables(std::vector<double>{0.0}, 2);
  for (double v : g.data()) a.push_back(x[0] * 0.1 + v);
  auto inv = uc::invert_matrix(a, 3);
  uc::MetricAtPoint m(g);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(inv[i * 3 + j].value(), m.g_inv()(i, j), 1e-13);
}

TEST(Tensor, SymmetryDefectsOfConstantCurvature) {
  const int n = 3;
  Tensor r(n, uc::lower_slots(4));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) r(a, b, c, d) = (a == d) * (b == c) - (a == c) * (b == d);
  EXPECT_LT(uc::riemann_symmetry_defects(r).max(), 1e-15);
}

}  // namespace
