#include "uc/frame.hpp"

#include "uc/error.hpp"

#include <algorithm>
#include <cmath>

namespace uc {

FrameState::FrameState(int n) : dim(n) {
  const int n2 = n * n, n3 = n2 * n;
  e.assign(n2, 0.0);
  dual.assign(n2, 0.0);
  de.assign(n3, 0.0);
  ddual.assign(n3, 0.0);
  gamma.assign(n3, 0.0);
  gamma_y.assign(n2, 0.0);
  dgamma.assign(n3 * n, 0.0);
  dgamma_y.assign(n3, 0.0);
}

FrameState FrameState::flat(int n) {
  FrameState s(n);
  for (int i = 0; i < n; ++i) {
    s.e[i * n + i] = 1.0;
    s.dual[i * n + i] = 1.0;
    s.gamma_y[i * n + i] = 1.0;
  }
  return s;
}

const std::array<const char*, FrameState::kBlocks>& FrameState::block_names() {
  static const std::array<const char*, kBlocks> names{"e", "dual", "de", "ddual", "gamma", "gamma_y", "dgamma", "dgamma_y"};
  return names;
}

std::array<std::vector<double>*, FrameState::kBlocks> FrameState::blocks() {
  return {&e, &dual, &de, &ddual, &gamma, &gamma_y, &dgamma, &dgamma_y};
}

std::array<const std::vector<double>*, FrameState::kBlocks> FrameState::blocks() const {
  return {&e, &dual, &de, &ddual, &gamma, &gamma_y, &dgamma, &dgamma_y};
}

std::size_t FrameState::packed_size() const {
  std::size_t s = 0;
  for (const auto* b : blocks()) s += b->size();
  return s;
}

void FrameState::pack(std::span<double> out) const {
  std::size_t k = 0;
  for (const auto* b : blocks()) {
    std::copy(b->begin(), b->end(), out.begin() + k);
    k += b->size();
  }
}

void FrameState::unpack(std::span<const double> in) {
  std::size_t k = 0;
  for (auto* b : blocks()) {
    std::copy(in.begin() + k, in.begin() + k + b->size(), b->begin());
    k += b->size();
  }
}

std::array<double, FrameState::kBlocks> block_deviation(const FrameState& a, const FrameState& b) {
  if (a.dim != b.dim) throw ShapeError("frame state dimension mismatch");
  std::array<double, FrameState::kBlocks> d{};
  auto ba = a.blocks();
  auto bb = b.blocks();
  for (int k = 0; k < FrameState::kBlocks; ++k) {
    for (std::size_t i = 0; i < ba[k]->size(); ++i) d[k] = std::max(d[k], std::abs((*ba[k])[i] - (*bb[k])[i]));
  }
  return d;
}

RadialData RadialData::normal(std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  RadialData rd;
  rd.y.assign(x.begin(), x.end());
  rd.dy.assign(n * n, 0.0);
  for (int a = 0; a < n; ++a) rd.dy[a * n + a] = 1.0;
  rd.ddy.assign(n * n * n, 0.0);
  return rd;
}

FrameInvariantDefects frame_invariants(const FrameState& v, std::span<const double> g) {
  const int n = v.dim;
  FrameInvariantDefects d;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += v.dual[i * n + a] * v.e[i * n + b];
      d.duality = std::max(d.duality, std::abs(s - (a == b)));
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) s += g[a * n + b] * v.e[i * n + a] * v.e[j * n + b];
      d.orthonormality = std::max(d.orthonormality, std::abs(s - (i == j)));
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        d.antisymmetry = std::max(d.antisymmetry, std::abs(v.gamma[(i * n + j) * n + k] + v.gamma[(i * n + k) * n + j]));
      }
  return d;
}

FrameState frame_ode_rhs(const FrameState& v, const RadialData& rd, const CurvatureData& curv) {
  const int n = v.dim;
  const int n2 = n * n, n3 = n2 * n, n4 = n3 * n;
  if (static_cast<int>(rd.y.size()) != n || static_cast<int>(curv.riemann.size()) != n4 ||
      static_cast<int>(curv.driemann.size()) != n4 * n) {
    throw ShapeError("frame right-hand side inputs have inconsistent sizes");
  }
  const auto& e = v.e;
  const auto& du = v.dual;
  const auto& de = v.de;
  const auto& ddu = v.ddual;
  const auto& G = v.gamma;
  const auto& GY = v.gamma_y;
  const auto& dG = v.dgamma;
  const auto& dGY = v.dgamma_y;
  const auto& Y = rd.y;
  const auto& dY = rd.dy;
  const auto& ddY = rd.ddy;

  // Frame components of the curvature and their coordinate partials.
  auto contract4 = [&](const double* r, const double* e0, const double* e1, const double* e2, const double* e3,
                       std::vector<double>& out, double scale) {
    std::vector<double> t1(n4), t2(n4), t3(n4);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int k = 0; k < n; ++k) {
            double s = 0;
            for (int d = 0; d < n; ++d) s += r[((a * n + b) * n + c) * n + d] * e3[k * n + d];
            t1[((a * n + b) * n + c) * n + k] = s;
          }
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            double s = 0;
            for (int c = 0; c < n; ++c) s += t1[((a * n + b) * n + c) * n + k] * e2[j * n + c];
            t2[((a * n + b) * n + j) * n + k] = s;
          }
    for (int a = 0; a < n; ++a)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            double s = 0;
            for (int b = 0; b < n; ++b) s += t2[((a * n + b) * n + j) * n + k] * e1[i * n + b];
            t3[((a * n + i) * n + j) * n + k] = s;
          }
    for (int l = 0; l < n; ++l)
      for (int ijk = 0; ijk < n3; ++ijk) {
        double s = 0;
        for (int a = 0; a < n; ++a) s += t3[a * n3 + ijk] * e0[l * n + a];
        out[l * n3 + ijk] += scale * s;
      }
  };
  std::vector<double> Rf(n4, 0.0), dRf(n4 * n, 0.0);
  contract4(curv.riemann.data(), e.data(), e.data(), e.data(), e.data(), Rf, 1.0);
  for (int al = 0; al < n; ++al) {
    std::vector<double> acc(n4, 0.0);
    const double* dea = de.data() + al * n2;
    contract4(curv.driemann.data() + al * n4, e.data(), e.data(), e.data(), e.data(), acc, 1.0);
    contract4(curv.riemann.data(), dea, e.data(), e.data(), e.data(), acc, 1.0);
    contract4(curv.riemann.data(), e.data(), dea, e.data(), e.data(), acc, 1.0);
    contract4(curv.riemann.data(), e.data(), e.data(), dea, e.data(), acc, 1.0);
    contract4(curv.riemann.data(), e.data(), e.data(), e.data(), dea, acc, 1.0);
    std::copy(acc.begin(), acc.end(), dRf.begin() + al * n4);
  }
  // Y in the frame and its partials.
  std::vector<double> Yf(n, 0.0), dYf(n2, 0.0);  // dYf[a l] = d_a Yf[l]
  for (int l = 0; l < n; ++l)
    for (int g = 0; g < n; ++g) Yf[l] += Y[g] * du[l * n + g];
  for (int a = 0; a < n; ++a)
    for (int l = 0; l < n; ++l) {
      double s = 0;
      for (int g = 0; g < n; ++g) s += dY[g * n + a] * du[l * n + g] + Y[g] * ddu[(a * n + l) * n + g];
      dYf[a * n + l] = s;
    }

  FrameState out(n);
  out.radius = v.radius;
  out.direction = v.direction;
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < n; ++a) {
      double s = 0;
      for (int b = 0; b < n; ++b) s += dY[a * n + b] * e[i * n + b];
      for (int k = 0; k < n; ++k) s -= GY[i * n + k] * e[k * n + a];
      out.e[i * n + a] = s;
      double t = 0;
      for (int b = 0; b < n; ++b) t -= dY[b * n + a] * du[i * n + b];
      for (int j = 0; j < n; ++j) t += du[j * n + a] * GY[j * n + i];
      out.dual[i * n + a] = t;
    }
  for (int b = 0; b < n; ++b)
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < n; ++a) {
        double s = 0, t = 0;
        for (int g = 0; g < n; ++g) {
          s += -dY[g * n + b] * de[(g * n + i) * n + a] + ddY[(a * n + b) * n + g] * e[i * n + g] +
               dY[a * n + g] * de[(b * n + i) * n + g];
          t += -dY[g * n + b] * ddu[(g * n + i) * n + a] - ddY[(g * n + a) * n + b] * du[i * n + g] -
               dY[g * n + a] * ddu[(b * n + i) * n + g];
        }
        for (int k = 0; k < n; ++k) {
          s -= dGY[(b * n + i) * n + k] * e[k * n + a] + GY[i * n + k] * de[(b * n + k) * n + a];
          t += ddu[(b * n + k) * n + a] * GY[k * n + i] + du[k * n + a] * dGY[(b * n + k) * n + i];
        }
        out.de[(b * n + i) * n + a] = s;
        out.ddual[(b * n + i) * n + a] = t;
      }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double s = 0;
        for (int l = 0; l < n; ++l) s += Yf[l] * Rf[((l * n + i) * n + j) * n + k];
        for (int p = 0; p < n; ++p) s -= GY[i * n + p] * G[(p * n + j) * n + k];
        out.gamma[(i * n + j) * n + k] = s;
      }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = GY[i * n + j];
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) s += Yf[k] * Yf[l] * Rf[((k * n + i) * n + l) * n + j];
      for (int p = 0; p < n; ++p) s -= GY[i * n + p] * GY[p * n + j];
      out.gamma_y[i * n + j] = s;
    }
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          double s = 0;
          for (int b = 0; b < n; ++b) s -= dY[b * n + a] * dG[((b * n + i) * n + j) * n + k];
          for (int l = 0; l < n; ++l) {
            s += dYf[a * n + l] * Rf[((l * n + i) * n + j) * n + k];
            s += Yf[l] * dRf[a * n4 + ((l * n + i) * n + j) * n + k];
          }
          for (int p = 0; p < n; ++p) {
            s -= dGY[(a * n + i) * n + p] * G[(p * n + j) * n + k];
            s -= GY[i * n + p] * dG[((a * n + p) * n + j) * n + k];
          }
          out.dgamma[((a * n + i) * n + j) * n + k] = s;
        }
        double s = dGY[(a * n + i) * n + j];
        for (int b = 0; b < n; ++b) s -= dY[b * n + a] * dGY[(b * n + i) * n + j];
        for (int p = 0; p < n; ++p) {
          s -= dGY[(a * n + i) * n + p] * GY[p * n + j];
          s -= GY[i * n + p] * dGY[(a * n + p) * n + j];
        }
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            const int idx = ((k * n + i) * n + l) * n + j;
            s += (dYf[a * n + k] * Yf[l] + Yf[k] * dYf[a * n + l]) * Rf[idx];
            s += Yf[k] * Yf[l] * dRf[a * n4 + idx];
          }
        out.dgamma_y[(a * n + i) * n + j] = s;
      }
  return out;
}

FrameState seed_state(const NormalChart& chart, std::span<const double> v, double r, bool oracle_derivatives) {
  const int n = chart.dim();
  const int n2 = n * n, n3 = n2 * n;
  Tensor rc = riemann(chart.metric(), chart.base());
  Tensor r0 = frame_components(rc, chart.frame());
  auto R = [&](int a, int b, int c, int d) { return r0.data()[((a * n + b) * n + c) * n + d]; };
  std::vector<double> x(n);
  for (int a = 0; a < n; ++a) x[a] = r * v[a];
  // Contractions with x in the first and third slots.
  std::vector<double> rx(n3, 0.0), rxx(n2, 0.0), rx3(n3, 0.0);  // R(x,i,j,k), R(x,i,x,k), R(b,i,x,k)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int a = 0; a < n; ++a) {
          rx[(i * n + j) * n + k] += x[a] * R(a, i, j, k);
          rx3[(i * n + j) * n + k] += x[a] * R(i, j, a, k);
        }
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int b = 0; b < n; ++b) rxx[i * n + k] += x[b] * rx[(i * n + b) * n + k];

  FrameState s = FrameState::flat(n);
  s.radius = r;
  s.direction.assign(v.begin(), v.end());
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < n; ++a) {
      s.e[i * n + a] -= rxx[i * n + a] / 6.0;
      s.dual[i * n + a] += rxx[i * n + a] / 6.0;
      s.gamma_y[i * n + a] += rxx[i * n + a] / 3.0;
    }
  for (int i = 0; i < n3; ++i) s.gamma[i] = 0.5 * rx[i];
  for (int b = 0; b < n; ++b)
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < n; ++a) {
        const double t = (rx3[(b * n + i) * n + a] + rx[(i * n + b) * n + a]) / 6.0;
        s.de[(b * n + i) * n + a] = -t;
        s.ddual[(b * n + i) * n + a] = t;
        s.dgamma_y[(b * n + i) * n + a] = 2.0 * t;
      }
  for (int i = 0; i < n3 * n; ++i) s.dgamma[i] = 0.5 * r0.data()[i];
  if (oracle_derivatives) {
    FrameSample o = direct_frame_oracle(chart, v, r);
    s.de = o.state.de;
    s.ddual = o.state.ddual;
    s.dgamma = o.state.dgamma;
    s.dgamma_y = o.state.dgamma_y;
  }
  return s;
}

std::vector<FrameSample> integrate_frame(const NormalChart& chart, std::span<const double> v,
                                         std::span<const double> radii, const FrameIntegrationOptions& opt) {
  const int n = chart.dim();
  if (static_cast<int>(v.size()) != n) throw ShapeError("direction dimension mismatch");
  double nv = 0;
  for (double c : v) nv += c * c;
  if (std::abs(std::sqrt(nv) - 1.0) > 1e-12) throw DomainError("ray direction must be a unit vector");
  if (!(opt.r0 >= 1e-5)) throw DomainError("seed radius too small: the 1/r factor is ill-conditioned");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (radii[i] < opt.r0 || (i > 0 && radii[i] < radii[i - 1])) {
      throw DomainError("output radii must be increasing and not below the seed radius");
    }
  }
  const MetricField& f = chart.metric();
  JetRayState st{n, 0, &JetLayout::get(n, 2)};
  OdeState ray(st.doubles(), 0.0);
  for (int a = 0; a < n; ++a) {
    st.put(ray, a, Jet(*st.layout, chart.base()[a]));
    Jet va(*st.layout, 0.0);
    for (int i = 0; i < n; ++i) {
      va[0] += chart.frame()[i][a] * v[i];
      va[1 + i] = chart.frame()[i][a];
    }
    st.put(ray, n + a, va);
  }
  OdeOptions ray_opt;
  ray_opt.rel_tol = 1e-13;
  ray_opt.abs_tol = 1e-15;
  ray_opt.initial_step = opt.r0 / 4;
  {
    auto rhs = [&](const OdeState& x, OdeState& dx, double) { jet_ray_rhs(f, st, x, dx); };
    const double r0 = opt.r0;
    integrate(rhs, ray, 0.0, std::span<const double>(&r0, 1), ray_opt, {});
  }
  FrameState seed = seed_state(chart, v, opt.r0, opt.seed == FrameIntegrationOptions::Seed::oracle_derivatives);
  const std::size_t nray = st.doubles();
  OdeState s(nray + seed.packed_size());
  std::copy(ray.begin(), ray.end(), s.begin());
  seed.pack(std::span<double>(s.data() + nray, seed.packed_size()));

  FrameState work(n);
  work.direction.assign(v.begin(), v.end());
  auto curvature_at = [&](const OdeState& x, OdeState* dx, double r) {
    OdeState tmp;
    OdeState& d = dx ? *dx : tmp;
    if (!dx) d.resize(x.size());
    LocalGeometry geo = jet_ray_rhs(f, st, x, d);
    return normal_curvature(st, x, r, geo);
  };
  auto rhs = [&](const OdeState& x, OdeState& dx, double r) {
    NormalCurvature nc = curvature_at(x, &dx, r);
    work.unpack(std::span<const double>(x.data() + nray, x.size() - nray));
    work.radius = r;
    std::vector<double> xn(n);
    for (int a = 0; a < n; ++a) xn[a] = r * v[a];
    FrameState d = frame_ode_rhs(work, RadialData::normal(xn), {nc.riemann, nc.driemann});
    d.pack(std::span<double>(dx.data() + nray, x.size() - nray));
    for (std::size_t k = nray; k < x.size(); ++k) dx[k] /= r;
  };
  std::vector<FrameSample> out;
  auto observe = [&](std::size_t, double r, const OdeState& x) {
    NormalCurvature nc = curvature_at(x, nullptr, r);
    FrameSample smp;
    smp.state = FrameState(n);
    smp.state.unpack(std::span<const double>(x.data() + nray, x.size() - nray));
    smp.state.radius = r;
    smp.state.direction.assign(v.begin(), v.end());
    smp.normal_metric = nc.metric;
    smp.position = nc.position;
    smp.defects = frame_invariants(smp.state, smp.normal_metric);
    if (smp.defects.max() > opt.invariant_tol) {
      throw NumericalError("frame invariants drifted beyond tolerance at r = " + std::to_string(r) +
                           " (duality " + std::to_string(smp.defects.duality) + ", orthonormality " +
                           std::to_string(smp.defects.orthonormality) + ", antisymmetry " +
                           std::to_string(smp.defects.antisymmetry) + ")");
    }
    out.push_back(std::move(smp));
  };
  OdeOptions fopt;
  fopt.rel_tol = opt.rel_tol;
  fopt.abs_tol = opt.abs_tol;
  fopt.initial_step = opt.r0 / 4;
  integrate(rhs, s, opt.r0, radii, fopt, observe);
  return out;
}

}  // namespace uc
