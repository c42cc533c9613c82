#include "uc/frame.hpp"

#include "uc/curvature.hpp"

#include <map>

namespace uc {

namespace {

// Shots and first-level quantities on the lattice x + h m.
class ShotLattice {
 public:
  ShotLattice(const NormalChart& chart, std::vector<double> x, double h)
      : chart_(chart), x_(std::move(x)), h_(h), n_(chart.dim()) {}

  const NormalChart::Shot& shot(const std::vector<int>& m) {
    auto it = shots_.find(m);
    if (it != shots_.end()) return it->second;
    std::vector<double> y(n_);
    for (int a = 0; a < n_; ++a) y[a] = x_[a] + h_ * m[a];
    return shots_.emplace(m, chart_.shoot(y)).first->second;
  }

  // Fourth-order central difference along b of a vector quantity at m.
  template <class F>
  std::vector<double> diff(const std::vector<int>& m, int b, F&& quantity) {
    static const int off[4] = {2, 1, -1, -2};
    static const double w[4] = {-1.0, 8.0, -8.0, 1.0};
    std::vector<double> acc;
    for (int k = 0; k < 4; ++k) {
      std::vector<int> mm(m);
      mm[b] += off[k];
      std::vector<double> q = quantity(mm);
      if (acc.empty()) acc.assign(q.size(), 0.0);
      for (std::size_t i = 0; i < q.size(); ++i) acc[i] += w[k] * q[i];
    }
    for (double& v : acc) v /= 12.0 * h_;
    return acc;
  }

  struct Level1 {
    std::vector<double> jac;       // [alpha beta]
    std::vector<double> e;         // [i a] normal components
    std::vector<double> dual;      // [i a]
    std::vector<double> gamma;     // [i j k]
    std::vector<double> gamma_y;   // [i j]
    std::vector<double> metric_n;  // [a b]
  };

  const Level1& level1(const std::vector<int>& m) {
    auto it = level1_.find(m);
    if (it != level1_.end()) return it->second;
    const int n = n_;
    const NormalChart::Shot& s0 = shot(m);
    Level1 q;
    q.jac.assign(n * n, 0.0);
    std::vector<std::vector<double>> de_chart(n), dy_chart(n);  // per b: [i alpha], [alpha]
    for (int b = 0; b < n; ++b) {
      std::vector<double> dpos = diff(m, b, [&](const std::vector<int>& mm) { return shot(mm).position; });
      for (int a = 0; a < n; ++a) q.jac[a * n + b] = dpos[a];
      de_chart[b] = diff(m, b, [&](const std::vector<int>& mm) {
        std::vector<double> flat;
        for (const auto& v : shot(mm).frame) flat.insert(flat.end(), v.begin(), v.end());
        return flat;
      });
      dy_chart[b] = diff(m, b, [&](const std::vector<int>& mm) { return shot(mm).radial; });
    }
    std::vector<double> jinv = invert_matrix(q.jac, n);
    q.e.assign(n * n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < n; ++a)
        for (int al = 0; al < n; ++al) q.e[i * n + a] += jinv[a * n + al] * s0.frame[i][al];
    std::vector<double> emat(n * n);
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < n; ++a) emat[a * n + i] = q.e[i * n + a];
    q.dual = invert_matrix(emat, n);  // [i a]
    MetricAtPoint g = chart_.metric().at(s0.position);
    std::vector<double> gam(n * n * n);
    christoffel_values(chart_.metric(), s0.position, gam);
    auto cov = [&](int i, const std::vector<double>& w, const std::vector<std::vector<double>>& dw, int offset) {
      // nabla_{e_i} W in chart components, with W's partials along normal coordinates in dw.
      std::vector<double> out(n, 0.0);
      for (int c = 0; c < n; ++c) {
        for (int b = 0; b < n; ++b) out[c] += q.e[i * n + b] * dw[b][offset + c];
        for (int a = 0; a < n; ++a)
          for (int bb = 0; bb < n; ++bb) out[c] += gam[(c * n + a) * n + bb] * s0.frame[i][a] * w[bb];
      }
      return out;
    };
    q.gamma.assign(n * n * n, 0.0);
    q.gamma_y.assign(n * n, 0.0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        std::vector<double> nij = cov(i, s0.frame[j], de_chart, j * n);
        for (int k = 0; k < n; ++k) q.gamma[(i * n + j) * n + k] = g.inner(nij, s0.frame[k]);
      }
      std::vector<double> niy = cov(i, s0.radial, dy_chart, 0);
      for (int k = 0; k < n; ++k) q.gamma_y[i * n + k] = g.inner(niy, s0.frame[k]);
    }
    q.metric_n.assign(n * n, 0.0);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int al = 0; al < n; ++al)
          for (int be = 0; be < n; ++be) q.metric_n[a * n + b] += q.jac[al * n + a] * g.g()(al, be) * q.jac[be * n + b];
    return level1_.emplace(m, std::move(q)).first->second;
  }

 private:
  const NormalChart& chart_;
  std::vector<double> x_;
  double h_;
  int n_;
  std::map<std::vector<int>, NormalChart::Shot> shots_;
  std::map<std::vector<int>, Level1> level1_;
};

}  // namespace

FrameSample direct_frame_oracle(const NormalChart& chart, std::span<const double> v, double r,
                                const OracleOptions& opt) {
  const int n = chart.dim();
  if (static_cast<int>(v.size()) != n) throw ShapeError("direction dimension mismatch");
  std::vector<double> x(n);
  for (int a = 0; a < n; ++a) x[a] = r * v[a];
  ShotLattice lat(chart, x, opt.h);
  const std::vector<int> origin(n, 0);
  const auto& q0 = lat.level1(origin);
  FrameSample out;
  FrameState& s = out.state;
  s = FrameState(n);
  s.radius = r;
  s.direction.assign(v.begin(), v.end());
  s.e = q0.e;
  s.dual = q0.dual;
  s.gamma = q0.gamma;
  s.gamma_y = q0.gamma_y;
  for (int b = 0; b < n; ++b) {
    auto de = lat.diff(origin, b, [&](const std::vector<int>& m) { return lat.level1(m).e; });
    auto dd = lat.diff(origin, b, [&](const std::vector<int>& m) { return lat.level1(m).dual; });
    auto dg = lat.diff(origin, b, [&](const std::vector<int>& m) { return lat.level1(m).gamma; });
    auto dgy = lat.diff(origin, b, [&](const std::vector<int>& m) { return lat.level1(m).gamma_y; });
    std::copy(de.begin(), de.end(), s.de.begin() + b * n * n);
    std::copy(dd.begin(), dd.end(), s.ddual.begin() + b * n * n);
    std::copy(dg.begin(), dg.end(), s.dgamma.begin() + b * n * n * n);
    std::copy(dgy.begin(), dgy.end(), s.dgamma_y.begin() + b * n * n);
  }
  out.normal_metric = q0.metric_n;
  out.position = lat.shot(origin).position;
  out.defects = frame_invariants(s, out.normal_metric);
  return out;
}

}  // namespace uc
