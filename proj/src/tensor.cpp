#include "uc/tensor.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

namespace uc {

Tensor values(const BasicTensor<Jet>& t) {
  Tensor r(t.dim(), t.variance());
  for (std::size_t i = 0; i < t.size(); ++i) r.data()[i] = t.data()[i].value();
  return r;
}

MetricAtPoint::MetricAtPoint(Tensor g) : g_(std::move(g)) {
  if (g_.rank() != 2 || g_.variance() != lower_slots(2)) throw ShapeError("metric must be a (0,2) tensor");
  const int n = g_.dim();
  Eigen::MatrixXd m(n, n);
  double scale = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      m(i, j) = g_(i, j);
      scale = std::max(scale, std::abs(m(i, j)));
    }
  }
  if (!m.allFinite()) throw DomainError("metric has non-finite entries");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1.0)) {
    throw DomainError("metric is not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw DomainError("metric is not positive definite");
  Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(n, n));
  g_inv_ = Tensor(n, {Variance::upper, Variance::upper});
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g_inv_(i, j) = 0.5 * (inv(i, j) + inv(j, i));
  }
}

MetricAtPoint MetricAtPoint::euclidean(int dim) {
  Tensor g(dim, lower_slots(2));
  for (int i = 0; i < dim; ++i) g(i, i) = 1.0;
  return MetricAtPoint(std::move(g));
}

double MetricAtPoint::inner(std::span<const double> u, std::span<const double> v) const {
  const int n = dim();
  if (static_cast<int>(u.size()) != n || static_cast<int>(v.size()) != n) throw ShapeError("vector size mismatch");
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) s += g_(i, j) * u[i] * v[j];
  }
  return s;
}

Tensor frame_components(const Tensor& t, std::span<const std::vector<double>> frame) {
  const int n = t.dim();
  if (static_cast<int>(frame.size()) != n) throw ShapeError("frame size mismatch");
  Tensor e(n, {Variance::upper, Variance::lower});  // e(alpha, i) = e_i^alpha
  std::vector<double> mat(n * n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(frame[i].size()) != n) throw ShapeError("frame vector size mismatch");
    for (int a = 0; a < n; ++a) {
      e(a, i) = frame[i][a];
      mat[a * n + i] = frame[i][a];
    }
  }
  std::vector<double> inv = invert_matrix(mat, n);
  Tensor dual(n, {Variance::lower, Variance::upper});  // dual(alpha, i) = e^i_alpha
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < n; ++a) dual(a, i) = inv[i * n + a];
  }
  Tensor r = t;
  for (int s = 0; s < t.rank(); ++s) {
    if (t.variance()[s] == Variance::lower) {
      r = apply_matrix(r, s, e, Variance::lower);
    } else {
      r = apply_matrix(r, s, dual, Variance::upper);
    }
  }
  return r;
}

RiemannSymmetryDefects riemann_symmetry_defects(const Tensor& r) {
  if (r.rank() != 4) throw ShapeError("expected a rank-4 tensor");
  const int n = r.dim();
  RiemannSymmetryDefects d{0, 0, 0, 0};
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int e = 0; e < n; ++e) {
          const double v = r(a, b, c, e);
          d.antisym_first = std::max(d.antisym_first, std::abs(v + r(b, a, c, e)));
          d.antisym_second = std::max(d.antisym_second, std::abs(v + r(a, b, e, c)));
          d.pair = std::max(d.pair, std::abs(v - r(c, e, a, b)));
          d.bianchi = std::max(d.bianchi, std::abs(v + r(b, c, a, e) + r(c, a, b, e)));
        }
  return d;
}

}  // namespace uc
