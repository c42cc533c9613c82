#pragma once

#include "uc/normal_chart.hpp"

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace uc {

// Radially parallel orthonormal frame along a ray in normal coordinates,
// with its connection coefficients and their coordinate partials.
struct FrameState {
  int dim = 0;
  double radius = 0.0;
  std::vector<double> direction;
  std::vector<double> e;         // [i a]      e_i^a
  std::vector<double> dual;      // [i a]      e^i_a
  std::vector<double> de;        // [b i a]    d_b e_i^a
  std::vector<double> ddual;     // [b i a]    d_b e^i_a
  std::vector<double> gamma;     // [i j k]    Gamma_ij^k = g(nabla_{e_i} e_j, e_k)
  std::vector<double> gamma_y;   // [i j]      Gamma_iY^j = g(nabla_{e_i} Y, e_j)
  std::vector<double> dgamma;    // [a i j k]  d_a Gamma_ij^k
  std::vector<double> dgamma_y;  // [a i j]    d_a Gamma_iY^j

  static constexpr int kBlocks = 8;
  static const std::array<const char*, kBlocks>& block_names();

  explicit FrameState(int n = 0);
  // The state of Euclidean space: e = delta, Gamma = 0, Gamma_Y = delta.
  static FrameState flat(int n);

  std::array<std::vector<double>*, kBlocks> blocks();
  std::array<const std::vector<double>*, kBlocks> blocks() const;
  std::size_t packed_size() const;
  void pack(std::span<double> out) const;
  void unpack(std::span<const double> in);
};

// Max |a - b| per block.
std::array<double, FrameState::kBlocks> block_deviation(const FrameState& a, const FrameState& b);

// Y = r d/dr in the chart along the ray; normal coordinates give Y = x,
// dY = identity and ddY = 0.
struct RadialData {
  std::vector<double> y;    // [a]
  std::vector<double> dy;   // [a b] = d_b Y^a
  std::vector<double> ddy;  // [a b c] = d_b d_c Y^a
  static RadialData normal(std::span<const double> x);
};

// Curvature of the normal chart at the ray point: R_abcd and d_e R_abcd in
// normal-coordinate components.
struct CurvatureData {
  std::vector<double> riemann;
  std::vector<double> driemann;
};
using CurvatureProvider = std::function<CurvatureData(std::span<const double> x_normal)>;

struct FrameInvariantDefects {
  double duality = 0.0;
  double orthonormality = 0.0;
  double antisymmetry = 0.0;
  double max() const { return std::max({duality, orthonormality, antisymmetry}); }
};
// g_normal is the normal-coordinate metric at the ray point, [a b].
FrameInvariantDefects frame_invariants(const FrameState& v, std::span<const double> g_normal);

// Y-derivative of every block.
FrameState frame_ode_rhs(const FrameState& v, const RadialData& rd, const CurvatureData& curv);

struct FrameSample {
  FrameState state;
  std::vector<double> normal_metric;  // g_N at r v
  Point position;                     // chart point Phi(r v)
  FrameInvariantDefects defects;
};

struct FrameIntegrationOptions {
  double r0 = 1e-3;
  double rel_tol = 1e-11;
  double abs_tol = 1e-12;
  double invariant_tol = 1e-6;
  enum class Seed { oracle_derivatives, taylor } seed = Seed::oracle_derivatives;
};

// Integrates dv/dr = frame_ode_rhs / r from r0 through `radii` along the unit
// normal direction v.
std::vector<FrameSample> integrate_frame(const NormalChart& chart, std::span<const double> v,
                                         std::span<const double> radii, const FrameIntegrationOptions& opt = {});

// State at small radius r from the leading curvature terms of its expansion;
// the partial-derivative blocks come from the oracle if requested.
FrameState seed_state(const NormalChart& chart, std::span<const double> v, double r, bool oracle_derivatives);

struct OracleOptions {
  double h = 4e-3;
};
// Brute-force FrameState at r v: shoots with transport and finite
// differences of the shots for the partial-derivative blocks.
FrameSample direct_frame_oracle(const NormalChart& chart, std::span<const double> v, double r,
                                const OracleOptions& opt = {});

}  // namespace uc
