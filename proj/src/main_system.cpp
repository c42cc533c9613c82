#include "uc/einstein.hpp"

#include "einstein_detail.hpp"

#include <cmath>

namespace uc {

namespace {

std::size_t ipow(int n, int r) {
  std::size_t s = 1;
  for (int i = 0; i < r; ++i) s *= static_cast<std::size_t>(n);
  return s;
}

// c[k][I] = sum_s sum_m Gamma_{k i_s}^m T_{I with slot s set to m}
std::vector<double> connection_term(int n, int rank, const std::vector<double>& t, const std::vector<double>& gamma) {
  const std::size_t block = ipow(n, rank);
  std::vector<double> out(n * block, 0.0);
  std::vector<int> idx(rank);
  std::vector<std::size_t> stride(rank, 1);
  for (int s = rank - 2; s >= 0; --s) stride[s] = stride[s + 1] * n;
  for (std::size_t o = 0; o < block; ++o) {
    unflatten(o, n, idx);
    for (int k = 0; k < n; ++k) {
      double acc = 0.0;
      for (int s = 0; s < rank; ++s) {
        const std::size_t base = o - idx[s] * stride[s];
        for (int m = 0; m < n; ++m) acc += gamma[(k * n + idx[s]) * n + m] * t[base + m * stride[s]];
      }
      out[k * block + o] = acc;
    }
  }
  return out;
}

std::vector<double> covariant_from_frame(int n, int rank, const std::vector<double>& t, const std::vector<double>& dt,
                                         const std::vector<double>& gamma) {
  std::vector<double> c = connection_term(n, rank, t, gamma);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = dt[i] - c[i];
  return c;
}

std::vector<double> expand_block(int n, int rank, const std::vector<double>& t, const std::vector<double>& dt,
                                 const std::vector<double>& lap, const ConnectionData& conn) {
  const std::size_t block = ipow(n, rank);
  const std::vector<double> ct = connection_term(n, rank, t, conn.gamma);
  std::vector<double> nab(dt.size());
  for (std::size_t i = 0; i < nab.size(); ++i) nab[i] = dt[i] - ct[i];
  auto G = [&](int i, int j, int k) { return conn.gamma[(i * n + j) * n + k]; };
  auto dG = [&](int a, int i, int j, int k) { return conn.dgamma[((a * n + i) * n + j) * n + k]; };
  std::vector<double> out(lap);
  std::vector<int> idx(rank);
  std::vector<std::size_t> stride(rank, 1);
  for (int s = rank - 2; s >= 0; --s) stride[s] = stride[s + 1] * n;
  for (std::size_t o = 0; o < block; ++o) {
    unflatten(o, n, idx);
    double acc = 0.0;
    for (int s = 0; s < rank; ++s) {
      const std::size_t base = o - idx[s] * stride[s];
      for (int a = 0; a < n; ++a)
        for (int k = 0; k < n; ++k) {
          const std::size_t j = base + k * stride[s];
          const double g = G(a, idx[s], k);
          acc += dG(a, a, idx[s], k) * t[j] + g * (dt[a * block + j] + nab[a * block + j]);
        }
    }
    for (int a = 0; a < n; ++a)
      for (int k = 0; k < n; ++k) acc -= G(a, a, k) * ct[k * block + o];
    out[o] += acc;
  }
  return out;
}

void check_sizes(const CurvatureState& u, const CurvatureStateDerivative& du, const ConnectionData& conn) {
  const int n = u.dim;
  if (du.dim != n || conn.dim != n) throw ShapeError("main system dimension mismatch");
  if (u.riemann.size() != ipow(n, 4) || du.riemann.size() != ipow(n, 5) || conn.gamma.size() != ipow(n, 3) ||
      conn.dgamma.size() != ipow(n, 4)) {
    throw ShapeError("main system block size mismatch");
  }
}

// Frame and chart data at p: local geometry with jets of `order` and the
// iterated covariant derivatives of phi.
struct ChartData {
  LocalGeometry geo;
  std::vector<BasicTensor<Jet>> dphi;
};

ChartData chart_data(const MetricField& f, const ScalarSolution& phi, std::span<const double> p, int order) {
  if (static_cast<int>(p.size()) != f.dim()) throw ShapeError("point dimension mismatch");
  ChartData c;
  c.geo = LocalGeometry::at(f, p, order, true);
  Jet ph = taylor_expand(phi.phi, p, order, phi.backend);
  c.dphi.emplace_back(f.dim(), std::vector<Variance>{}, ph);
  for (int k = 1; k <= order; ++k) c.dphi.push_back(covariant_derivative(c.dphi.back(), c.geo));
  return c;
}

std::vector<double> frame_values(const BasicTensor<Jet>& t, const Frame& frame) {
  return frame_components(values(t), frame).data();
}

}  // namespace

CurvatureState::CurvatureState(int n)
    : dim(n), riemann(ipow(n, 4), 0.0), grad(n, 0.0), hess(ipow(n, 2), 0.0) {}

std::size_t CurvatureState::size() const { return riemann.size() + 1 + grad.size() + hess.size(); }

std::vector<double> CurvatureState::flatten() const {
  std::vector<double> v(riemann);
  v.push_back(phi);
  v.insert(v.end(), grad.begin(), grad.end());
  v.insert(v.end(), hess.begin(), hess.end());
  return v;
}

CurvatureState CurvatureState::unflatten(int n, std::span<const double> v) {
  CurvatureState s(n);
  if (v.size() != s.size()) throw ShapeError("curvature state size mismatch");
  auto it = v.begin();
  std::copy(it, it + s.riemann.size(), s.riemann.begin());
  it += s.riemann.size();
  s.phi = *it++;
  std::copy(it, it + n, s.grad.begin());
  it += n;
  std::copy(it, it + s.hess.size(), s.hess.begin());
  return s;
}

CurvatureStateDerivative::CurvatureStateDerivative(int n)
    : dim(n), riemann(ipow(n, 5), 0.0), phi(n, 0.0), grad(ipow(n, 2), 0.0), hess(ipow(n, 3), 0.0) {}

ConnectionData ConnectionData::from_frame_state(const FrameState& v) {
  const int n = v.dim;
  ConnectionData c;
  c.dim = n;
  c.gamma = v.gamma;
  c.dgamma.assign(ipow(n, 4), 0.0);
  const std::size_t n3 = ipow(n, 3);
  for (int a = 0; a < n; ++a)
    for (int al = 0; al < n; ++al) {
      const double w = v.e[a * n + al];
      for (std::size_t o = 0; o < n3; ++o) c.dgamma[a * n3 + o] += w * v.dgamma[al * n3 + o];
    }
  return c;
}

CurvatureState assemble_u(const MetricField& f, const ScalarSolution& phi, const Frame& frame,
                          std::span<const double> p) {
  const int n = f.dim();
  ChartData c = chart_data(f, phi, p, 2);
  CurvatureState u(n);
  u.riemann = frame_values(c.geo.riemann, frame);
  u.phi = c.dphi[0].data()[0].value();
  u.grad = frame_values(c.dphi[1], frame);
  u.hess = frame_values(c.dphi[2], frame);
  return u;
}

CurvatureStateDerivative assemble_du(const MetricField& f, const ScalarSolution& phi, const Frame& frame,
                                     const ConnectionData& conn, std::span<const double> p) {
  const int n = f.dim();
  ChartData c = chart_data(f, phi, p, 3);
  CurvatureStateDerivative du(n);
  auto lift = [&](const BasicTensor<Jet>& t, const BasicTensor<Jet>& dt, int rank) {
    std::vector<double> tv = frame_values(t, frame);
    std::vector<double> d = frame_values(dt, frame);
    std::vector<double> ct = connection_term(n, rank, tv, conn.gamma);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += ct[i];
    return d;
  };
  du.riemann = lift(c.geo.riemann, covariant_derivative(c.geo.riemann, c.geo), 4);
  du.phi = frame_values(c.dphi[1], frame);
  du.grad = lift(c.dphi[1], c.dphi[2], 1);
  du.hess = lift(c.dphi[2], c.dphi[3], 2);
  return du;
}

CurvatureState frame_laplacian_expansion(const CurvatureState& u, const CurvatureStateDerivative& du,
                                         const ConnectionData& conn, const CurvatureState& lap) {
  check_sizes(u, du, conn);
  const int n = u.dim;
  CurvatureState out(n);
  out.riemann = expand_block(n, 4, u.riemann, du.riemann, lap.riemann, conn);
  out.phi = lap.phi;
  out.grad = expand_block(n, 1, u.grad, du.grad, lap.grad, conn);
  out.hess = expand_block(n, 2, u.hess, du.hess, lap.hess, conn);
  return out;
}

CurvatureState main_system_rhs(const CurvatureState& u, const CurvatureStateDerivative& du,
                               const ConnectionData& conn, const Potential& v, CosmologicalConstant,
                               const FrameForcing* forcing) {
  check_sizes(u, du, conn);
  const int n = u.dim;
  detail::Values val;
  val.n = n;
  val.g.assign(n * n, 0.0);
  for (int i = 0; i < n; ++i) val.g[i * n + i] = 1.0;
  val.gi = val.g;
  val.phi = u.phi;
  val.d1 = u.grad;
  val.d2 = u.hess;
  val.d3 = covariant_from_frame(n, 2, u.hess, du.hess, conn.gamma);
  val.R = u.riemann;
  val.dR = covariant_from_frame(n, 4, u.riemann, du.riemann, conn.gamma);
  val.ric = detail::ricci_from(val);
  val.clear_forcing();
  if (forcing) {
    if (forcing->dim != n) throw ShapeError("forcing dimension mismatch");
    val.S = forcing->stress;
    val.dS = forcing->dstress;
    val.ddS = forcing->ddstress;
    val.f0 = forcing->scalar;
    val.df = forcing->dscalar;
    val.ddf = forcing->ddscalar;
  }
  CurvatureState lap(n);
  lap.riemann = detail::curvature_laplacian_rhs(val, v);
  lap.phi = v(1, u.phi) + val.f0;
  lap.grad = detail::prolonged_rhs_1(val, v);
  lap.hess = detail::prolonged_rhs_2(val, v);
  return frame_laplacian_expansion(u, du, conn, lap);
}

CurvatureState tensor_laplacians(const MetricField& f, const ScalarSolution& phi, const Frame& frame,
                                 std::span<const double> p) {
  const int n = f.dim();
  ChartData c = chart_data(f, phi, p, 4);
  CurvatureState lap(n);
  lap.riemann = frame_values(metric_trace01(covariant_derivative(covariant_derivative(c.geo.riemann, c.geo), c.geo),
                                            c.geo),
                             frame);
  lap.phi = metric_trace01(c.dphi[2], c.geo).data()[0].value();
  lap.grad = frame_values(metric_trace01(c.dphi[3], c.geo), frame);
  lap.hess = frame_values(metric_trace01(c.dphi[4], c.geo), frame);
  return lap;
}

FrameFieldSample frame_field_sample(const NormalChart& chart, const ScalarSolution& phi, std::span<const double> v,
                                    double r, int order) {
  if (order < 1 || order > 2) throw DomainError("frame field samples support orders 1 and 2");
  const int n = chart.dim();
  const int D = order;
  NormalChart::RayJet rj = chart.ray_jet(v, r, D + 1, true);
  const JetLayout& ld = JetLayout::get(n, D);
  Point x0(n);
  std::vector<Jet> pos(n);
  for (int a = 0; a < n; ++a) {
    x0[a] = rj.position[a].value();
    pos[a] = rj.position[a].truncated(D);
  }
  // Chart tensors around Phi(r v), composed with Phi(r v + h).
  ChartData c = chart_data(chart.metric(), phi, x0, D + 2);
  auto pull = [&](const BasicTensor<Jet>& t) {
    std::vector<Jet> src(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) src[i] = t.data()[i].truncated(D);
    return compose(src, pos);
  };
  std::vector<Jet> rc = pull(c.geo.riemann);
  std::vector<Jet> gc = pull(c.dphi[1]);
  std::vector<Jet> hc = pull(c.dphi[2]);
  Jet phc = pull(c.dphi[0]).front();
  std::vector<Jet> e(n * n);  // [i alpha]
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < n; ++a) e[i * n + a] = rj.frame[i][a].truncated(D);
  // Contract chart slots with the frame, one slot at a time.
  auto to_frame = [&](std::vector<Jet> cur, int rank) {
    const std::size_t total = ipow(n, rank);
    std::vector<std::size_t> stride(rank, 1);
    for (int s = rank - 2; s >= 0; --s) stride[s] = stride[s + 1] * n;
    std::vector<Jet> next(total, Jet(ld));
    for (int slot = 0; slot < rank; ++slot) {
      for (std::size_t o = 0; o < total; ++o) {
        const int idx = static_cast<int>((o / stride[slot]) % n);
        const std::size_t base = o - idx * stride[slot];
        Jet acc(ld);
        for (int al = 0; al < n; ++al) acc.add_product(cur[base + al * stride[slot]], e[idx * n + al]);
        next[o] = std::move(acc);
      }
      std::swap(cur, next);
    }
    return cur;
  };
  std::vector<Jet> ur = to_frame(rc, 4), ug = to_frame(gc, 1), uh = to_frame(hc, 2);

  // Normal-coordinate metric jets g_N = J^T g(Phi) J.
  std::vector<Jet> gchart(n * n);
  for (int i = 0; i < n * n; ++i) gchart[i] = c.geo.g[i].truncated(D);
  gchart = compose(gchart, pos);
  std::vector<Jet> jac(n * n);  // [alpha beta]
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) jac[a * n + b] = rj.position[a].derivative(b).truncated(D);
  std::vector<Jet> gn(n * n, Jet(ld));
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      Jet acc(ld);
      for (int al = 0; al < n; ++al) {
        Jet w(ld);
        for (int be = 0; be < n; ++be) w.add_product(gchart[al * n + be], jac[be * n + b]);
        acc.add_product(jac[al * n + a], w);
      }
      gn[a * n + b] = acc;
      gn[b * n + a] = acc;
    }

  FrameFieldSample out;
  out.position = x0;
  out.frame.assign(n, std::vector<double>(n));
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < n; ++a) out.frame[i][a] = rj.frame[i][a].value();
  // Frame vectors in normal components: e_N = J^-1 e_chart.
  std::vector<double> jv(n * n);
  for (int i = 0; i < n * n; ++i) jv[i] = jac[i].value();
  std::vector<double> jinv = invert_matrix(jv, n);
  std::vector<double> en(n * n, 0.0);  // [i a]
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < n; ++a)
      for (int al = 0; al < n; ++al) en[i * n + a] += jinv[a * n + al] * out.frame[i][al];

  out.u = CurvatureState(n);
  out.du = CurvatureStateDerivative(n);
  out.laplacian = CurvatureState(n);
  LocalGeometry gnorm;
  if (D >= 2) gnorm = LocalGeometry::from_metric_jets(gn, n, false);
  auto fill = [&](const std::vector<Jet>& jets, std::vector<double>& u, std::vector<double>* du,
                  std::vector<double>* lap) {
    const std::size_t block = jets.size();
    for (std::size_t o = 0; o < block; ++o) {
      u[o] = jets[o].value();
      if (du) {
        for (int a = 0; a < n; ++a) {
          double s = 0.0;
          for (int b = 0; b < n; ++b) s += en[a * n + b] * jets[o].d(b);
          (*du)[a * block + o] = s;
        }
      }
    }
    if (lap && D >= 2) {
      for (std::size_t o = 0; o < block; ++o) {
        double s = 0.0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            int alpha[JetLayout::kMaxVars] = {};
            alpha[a] += 1;
            alpha[b] += 1;
            double h = jets[o].partial(std::span<const int>(alpha, n));
            for (int k = 0; k < n; ++k) h -= gnorm.christoffel(k, a, b).value() * jets[o].d(k);
            s += gnorm.g_inv[a * n + b].value() * h;
          }
        (*lap)[o] = s;
      }
    }
  };
  fill(ur, out.u.riemann, &out.du.riemann, &out.laplacian.riemann);
  std::vector<double> ph{0.0}, dph(n), lph{0.0};
  fill({phc}, ph, &dph, &lph);
  out.u.phi = ph[0];
  out.du.phi = dph;
  out.laplacian.phi = lph[0];
  fill(ug, out.u.grad, &out.du.grad, &out.laplacian.grad);
  fill(uh, out.u.hess, &out.du.hess, &out.laplacian.hess);
  return out;
}

}  // namespace uc
