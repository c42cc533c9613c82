#pragma once

#include "uc/curvature.hpp"
#include "uc/frame.hpp"
#include "uc/metric_field.hpp"
#include "uc/tensor.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace uc {

struct CosmologicalConstant {
  double value = 0.0;
  explicit CosmologicalConstant(double v = 0.0) : value(v) {}
};

// Potential V with derivatives; `derivative(k, x)` returns V^(k)(x).
class Potential {
 public:
  Potential(std::string name, std::function<double(int, double)> derivative, int max_order, double lipschitz);

  static Potential zero();
  static Potential constant(double v0);
  // m^2 phi^2 / 2
  static Potential quadratic(double m);
  // m^2 phi^2 / 2 + g phi^4 / 4
  static Potential quartic(double m, double g);

  const std::string& name() const { return name_; }
  double operator()(int k, double x) const;
  // V^(k) composed with a jet.
  Jet apply(int k, const Jet& phi) const;
  double lipschitz() const { return lipschitz_; }

 private:
  std::string name_;
  std::function<double(int, double)> d_;
  int max_order_;
  double lipschitz_;
};

struct ScalarSolution {
  ScalarFn phi;
  DiffBackend backend;
  static ScalarSolution constant(double c);
};

// Sources added to the right-hand sides so that arbitrary (metric, field)
// pairs become solutions: Ric = dphi dphi + (V + lambda) g + S and
// Lap phi = V'(phi) + f. Jets around the evaluation point.
struct Forcing {
  BasicTensor<Jet> stress;  // S_ij
  Jet scalar;               // f
};

// Manufactured forcing for (f, phi) at p, computed with analytic jets of
// order `order` (stress of order `order` - 2).
Forcing manufacture_forcing(const MetricField& f, const ScalarSolution& phi, const Potential& v,
                            CosmologicalConstant lambda, std::span<const double> p, int order = 5);

struct Residual {
  Tensor value;
  double norm = 0.0;       // sup norm
  bool off_shell = false;  // the pair fails the field equations at p
  double on_shell_defect = 0.0;
};

struct ResidualOptions {
  double on_shell_tol = 1e-6;
  const Forcing* forcing = nullptr;
};

// Ric - dphi dphi - (V + lambda) g - S
Residual einstein_residual(const MetricField& f, const ScalarSolution& phi, const Potential& v,
                           CosmologicalConstant lambda, std::span<const double> p, const ResidualOptions& opt = {});
// Lap phi - V'(phi) - f
Residual scalar_residual(const MetricField& f, const ScalarSolution& phi, const Potential& v,
                         std::span<const double> p, const ResidualOptions& opt = {});
// Cyclic sum nabla_i R_jklm + nabla_j R_kilm + nabla_k R_ijlm.
Residual bianchi2_residual(const MetricField& f, std::span<const double> p);
// nabla^i R_jkim minus its on-shell expression in phi.
Residual contracted_bianchi_residual(const MetricField& f, const ScalarSolution& phi, const Potential& v,
                                     CosmologicalConstant lambda, std::span<const double> p,
                                     const ResidualOptions& opt = {});
// Lap R_jklm minus the commutator and on-shell divergence expansion.
Residual curvature_laplacian_residual(const MetricField& f, const ScalarSolution& phi, const Potential& v,
                                      CosmologicalConstant lambda, std::span<const double> p,
                                      const ResidualOptions& opt = {});
// Lap nabla_j phi - V'' nabla_j phi - Ric_jd nabla^d phi - nabla_j f
Residual prolonged_scalar_residual_1(const MetricField& f, const ScalarSolution& phi, const Potential& v,
                                     CosmologicalConstant lambda, std::span<const double> p,
                                     const ResidualOptions& opt = {});
// Lap nabla_k nabla_j phi minus its commuted expansion.
Residual prolonged_scalar_residual_2(const MetricField& f, const ScalarSolution& phi, const Potential& v,
                                     CosmologicalConstant lambda, std::span<const double> p,
                                     const ResidualOptions& opt = {});

// Frame components of (R, phi, nabla phi, nabla nabla phi) at one point.
struct CurvatureState {
  int dim = 0;
  std::vector<double> riemann;  // [i j k l]
  double phi = 0.0;
  std::vector<double> grad;     // [i]
  std::vector<double> hess;     // [i j]

  explicit CurvatureState(int n = 0);
  std::vector<double> flatten() const;
  static CurvatureState unflatten(int n, std::span<const double> v);
  std::size_t size() const;
};

// Frame derivatives e_a of each component: the same blocks with a leading
// derivative index.
struct CurvatureStateDerivative {
  int dim = 0;
  std::vector<double> riemann;  // [a i j k l]
  std::vector<double> phi;      // [a]
  std::vector<double> grad;     // [a i]
  std::vector<double> hess;     // [a i j]
  explicit CurvatureStateDerivative(int n = 0);
};

// frame[i] are chart components of an orthonormal frame at p.
CurvatureState assemble_u(const MetricField& f, const ScalarSolution& phi, const Frame& frame, std::span<const double> p);

// Connection data of the frame at one point: Gamma_ij^k and e_a(Gamma_ij^k).
struct ConnectionData {
  int dim = 0;
  std::vector<double> gamma;   // [i j k]
  std::vector<double> dgamma;  // [a i j k]
  static ConnectionData from_frame_state(const FrameState& v);
};

// Frame derivatives of u from chart covariant derivatives at p and the
// frame's connection coefficients.
CurvatureStateDerivative assemble_du(const MetricField& f, const ScalarSolution& phi, const Frame& frame,
                                     const ConnectionData& conn, std::span<const double> p);

// Frame components of a forcing and its first two covariant derivatives.
struct FrameForcing {
  int dim = 0;
  std::vector<double> stress, dstress, ddstress;  // [i j], [a i j], [a b i j]
  double scalar = 0.0;
  std::vector<double> dscalar, ddscalar;  // [a], [a b]
};
FrameForcing frame_forcing(const MetricField& f, const Forcing& forcing, const Frame& frame,
                           std::span<const double> p);

// The scalar Laplacians Lap_g(u_I) of all frame components, written through
// the field equations as a function of (u, e(u), Gamma, e(Gamma)).
CurvatureState main_system_rhs(const CurvatureState& u, const CurvatureStateDerivative& du,
                               const ConnectionData& conn, const Potential& v, CosmologicalConstant lambda,
                               const FrameForcing* forcing = nullptr);

// The same frame expansion with the tensor Laplacians supplied directly
// (no field equations used): an identity valid for any metric and field.
CurvatureState frame_laplacian_expansion(const CurvatureState& u, const CurvatureStateDerivative& du,
                                         const ConnectionData& conn, const CurvatureState& tensor_laplacian);

// Frame components of the tensor Laplacians of (R, phi, dphi, ddphi) at p.
CurvatureState tensor_laplacians(const MetricField& f, const ScalarSolution& phi, const Frame& frame,
                                 std::span<const double> p);

// Exact solutions used for on-shell checks.
struct ExactSolution {
  std::string name;
  MetricField metric;
  ScalarSolution field;
  Potential potential;
  CosmologicalConstant lambda;
  Point sample_point;
};
std::vector<ExactSolution> exact_solution_presets(int n);

}  // namespace uc

namespace uc {

// u, its frame derivatives and the scalar Laplacians of its components at
// the normal point r v, all computed from Taylor data of the radially
// parallel frame field (order 1 skips the Laplacians).
struct FrameFieldSample {
  CurvatureState u;
  CurvatureStateDerivative du;
  CurvatureState laplacian;
  Frame frame;  // chart components at the point
  Point position;
};
FrameFieldSample frame_field_sample(const NormalChart& chart, const ScalarSolution& phi, std::span<const double> v,
                                    double r, int order = 2);

}  // namespace uc
