#pragma once

#include "uc/curvature.hpp"
#include "uc/metric_field.hpp"
#include "uc/ode.hpp"

#include <span>
#include <vector>

namespace uc {

using Frame = std::vector<std::vector<double>>;  // frame[i] = chart components of e_i

// Orthonormal frame at p by Gram-Schmidt on the coordinate basis.
Frame gram_schmidt_frame(const MetricField& f, std::span<const double> p);

// Geodesic normal coordinates x_N around p0 with respect to an orthonormal
// frame E at p0: Phi(x_N) = exp_{p0}(E x_N).
class NormalChart {
 public:
  NormalChart(MetricField f, Point p0, Frame frame = {});

  int dim() const { return f_.dim(); }
  const MetricField& metric() const { return f_; }
  const Point& base() const { return p0_; }
  const Frame& frame() const { return frame_; }

  struct Shot {
    Point position;                // Phi(x_N)
    std::vector<double> radial;    // Y = r d/dr at Phi(x_N), chart components
    Frame frame;                   // radially parallel frame at Phi(x_N), chart components
  };
  Shot shoot(std::span<const double> x_normal) const;

  static OdeOptions tight_options();

  // Taylor data around the normal point r*v in the offset h (n variables):
  // Phi(r v + h) and, when requested, the radially parallel frame there.
  struct RayJet {
    std::vector<Jet> position;
    std::vector<std::vector<Jet>> frame;
  };
  RayJet ray_jet(std::span<const double> v, double r, int order, bool with_frame) const;

 private:
  MetricField f_;
  Point p0_;
  Frame frame_;
  OdeOptions shoot_opt_;
};

// Jet-valued geodesic (and transported frame) along a ray. The state holds
// X(t), V(t) and optionally frame vectors as jets in the direction
// perturbation k; packed as [X_0..X_{n-1}, V_0.., E_00..] with `size`
// coefficients each.
struct JetRayState {
  int dim;
  int frames;
  const JetLayout* layout;

  std::size_t jets() const { return static_cast<std::size_t>(2 * dim + frames * dim); }
  std::size_t doubles() const { return jets() * layout->size(); }
  Jet get(const OdeState& s, std::size_t j) const;
  void put(OdeState& s, std::size_t j, const Jet& v) const;
};

// Derivative of the jet ray state; returns the local geometry at X(t) used
// to evaluate it (metric jets of order layout.order + 1 + extra_order).
LocalGeometry jet_ray_rhs(const MetricField& f, const JetRayState& st, const OdeState& s, OdeState& ds,
                          int extra_order = 0);

// Normal-coordinate curvature from a jet ray state at radius r (layout
// order >= 2 and geometry with curvature of order >= 1): R_N at r v and its
// first partials, plus the normal-coordinate metric there.
struct NormalCurvature {
  std::vector<double> riemann;   // [a b c d]
  std::vector<double> driemann;  // [e a b c d] = d_e R_abcd
  std::vector<double> metric;    // g_N at r v, [a b]
  std::vector<double> jacobian;  // d Phi^alpha / d x_N^beta, [alpha beta]
  Point position;
};
NormalCurvature normal_curvature(const JetRayState& st, const OdeState& s, double r, const LocalGeometry& geo);

}  // namespace uc
