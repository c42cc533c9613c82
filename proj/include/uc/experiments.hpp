#pragma once

#include "uc/carleman.hpp"
#include "uc/einstein.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace uc {

// Coefficients of the model system
//   Lap u = a_u u + a_grad d_r u + a_v v,  Y v = a_v v + a_u u + a_grad d_r u,
// where the gradient enters through the radial derivative.
struct ModelCoefficients {
  double u = 1.0;
  double grad = 1.0;
  double v = 1.0;
};

struct ModelPair {
  std::string name;
  ScalarFn u;
  ScalarFn v;
  std::optional<int> vanishing_order;  // nullopt: infinite order
};

// v = (Lap u - a_u u - a_grad d_r u) / a_v, so that the first equation holds exactly.
ModelPair manufactured_pair(std::string name, ScalarFn u, std::optional<int> vanishing_order,
                            const ModelCoefficients& c = {});
ModelPair zero_pair();
// exp(-1/r) and r^5 with their manufactured partners.
std::vector<ModelPair> model_corpus();

// Slope of log(sup over the sphere of radius r) against log r. Values at or
// below `floor` count as zero; decay faster than any sampled power is
// reported as infinite.
struct VanishingOrder {
  double slope = 0.0;
  bool infinite = false;  // >= cap, or zero on all radii
  bool all_zero = false;
  std::vector<double> radii, sup;
};
constexpr double kVanishingOrderCap = 20.0;
// Radii 2^{-j} * 0.1 for j = 0..10.
std::vector<double> default_vanishing_radii();
VanishingOrder vanishing_order_estimate(const std::function<double(std::span<const double>)>& field,
                                        std::span<const double> p0, std::span<const double> radii,
                                        double floor = 0.0, int sphere_order = 4);
bool verify_declared_order(const ModelPair& pair, int n);

struct ModelResiduals {
  std::vector<double> res_u, res_v, slack_u, slack_v;
  double max_res_u = 0.0, max_res_v = 0.0, max_slack_u = 0.0, max_slack_v = 0.0;
};
// |Lap u - (...)|, |Y v - (...)| and the inequality slack
// max(0, |Lap u| - C(|u| + |grad u| + |v|)) (likewise for Y v) at each node.
ModelResiduals model_residuals(const ModelPair& pair, const QuadratureGrid& grid, const ModelCoefficients& c,
                               double budget);

// u_k = chi_k phi u and v_phi = phi v, with phi = Bump(R) (1 on B_R, 0 off B_1).
struct CutoffPair {
  int k = 0;
  double R = 0.0;
  ScalarFn uk, vphi;
  ScalarFn phi_u;    // phi u, whose Laplacian enters outside B_R
  ScalarFn leibniz;  // 2 grad chi_k . grad u + u Lap chi_k
};
CutoffPair assemble_cutoff_pair(const ModelPair& pair, int k, double R);

// max over |alpha| <= 2 of sup |D^alpha phi| on R^n.
double bump_c2_norm(const Bump& phi, int n);

struct ChainOptions {
  int k = 6;
  double carleman_constant = 25.0;  // C in front of the Carleman right-hand sides
  int jobs = 1;
};

// Terms of the three chains at one lambda; all norms on B_R unless noted.
struct SweepRow {
  double lambda = 0.0;
  // Carleman estimate applied to u_k.
  double uk_q = 0.0;           // ||r-hat^-l u_k||_q
  double uk_grad_q = 0.0;      // l^{1/n} ||r-hat^-l r^{-1+d/2} grad u_k||_q
  double lap_uk_p = 0.0;       // ||r-hat^-l Lap u_k||_p
  double lap_phi_u_out = 0.0;  // ||r-hat^-l Lap(phi u)||_p on B_1 \ B_R
  // Leibniz error R^-l 2^{(l+2)k} ||phi||_C2 ||u||_{W^{1,p}(B_{2^-k})}.
  double leibniz_bound = 0.0;
  // Right-hand side of the u estimate after Hoelder.
  double chi_u_q = 0.0, chi_grad_q = 0.0, chi_v_2 = 0.0;
  // v estimate.
  double lambda_v_2 = 0.0;  // l ||r-hat^-l v||_2
  double v_2 = 0.0, u_q = 0.0, grad_q = 0.0;
  double y_phi_v_out = 0.0;  // ||r-hat^-l Y(phi v)||_2 on B_1 \ B_R
  // Absorption coefficients and flags (absorbed iff coefficient < 1/2).
  double coef_r2 = 0.0, coef_r = 0.0, coef_lambda = 0.0;
  bool absorbed_r2 = false, absorbed_r = false, absorbed_lambda = false;
  // Smallest C' with lhs <= C' R-hat^-l, and the final bounded quantity.
  double final_constant = 0.0;
  double bounded_u = 0.0;  // ||(R-hat / r-hat)^l u||_q
};
struct SweepReport {
  std::string pair;
  CarlemanParams params;
  ChainOptions options;
  std::string grid;
  std::vector<SweepRow> rows;
  bool absorption_consistent = true;  // every flag agrees with its coefficient
  double final_constant_spread = 0.0; // max / min of C' over the sweep
};
SweepReport chain_report(const ModelPair& pair, std::span<const double> lambdas, const CarlemanParams& cp,
                         const ChainOptions& opt = {});

// ||(R-hat / r-hat)^l u||_{L^q(B_R)}; +inf when the weighted norm diverges at the origin.
struct BoundedQuantity {
  double value = 0.0;
  bool divergent = false;
};
BoundedQuantity bounded_quantity(const ScalarFn& u, CarlemanLambda lambda, const CarlemanParams& cp);

struct ContrastReport {
  std::vector<double> lambdas;
  std::vector<std::string> names;
  std::vector<std::vector<BoundedQuantity>> values;  // [function][lambda]
  std::vector<std::optional<int>> orders;
  // ratio of the last to the first lambda, +inf once divergent
  std::vector<double> growth;
  bool infinite_order_bounded = false;  // every infinite-order growth <= 2
  bool finite_order_diverges = false;   // every finite-order growth >= 1e3
  bool separated = false;               // infinite < finite at every lambda >= 2m
};
ContrastReport mechanism_contrast(const std::vector<TestFunction>& corpus, std::span<const double> lambdas,
                                  const CarlemanParams& cp, int jobs = 1);

// The o_k(1) Leibniz term for k in ks at a fixed lambda.
struct DecayReport {
  std::vector<int> ks;
  std::vector<double> values;
  bool monotone = false;  // non-increasing and last < first
};
DecayReport leibniz_decay(const ScalarFn& u, CarlemanLambda lambda, const CarlemanParams& cp,
                          std::span<const int> ks);

// One side of the two-solution comparison.
struct SolutionSpec {
  std::string name;
  MetricField metric;
  ScalarSolution field;
  Potential potential;
  CosmologicalConstant lambda;
  Point base;
  Frame frame;  // orthonormal at base; empty: Gram-Schmidt
};

struct DifferenceOptions {
  double radius = 0.4;
  int levels = 2;
  int radial_nodes = 2;
  int sphere_order = 4;
  int checked_order = 2;
  double on_shell_tol = 1e-6;
  bool require_on_shell = true;
  double noise_floor = 1e-7;
  int jobs = 1;
};

struct DifferenceReport {
  std::string a, b;
  std::size_t points = 0;
  double max_du = 0.0;  // over u blocks and nodes
  double max_dv = 0.0;  // over frame-state blocks and nodes
  std::vector<double> max_du_block;  // riemann, phi, grad, hess
  std::vector<double> max_dv_block;  // FrameState blocks
  std::vector<double> riemann_difference_at_base;  // frame components [i j k l]
  double measured_constant_pde = 0.0;
  double measured_constant_ode = 0.0;
  VanishingOrder order;
  int first_disagreement_order = -1;  // -1: none up to checked_order
  bool hypothesis_holds = false;      // differences vanish to checked_order
  // Flattened per-node differences, node-major, for symmetry checks.
  std::vector<double> du, dv;
};
DifferenceReport difference_pipeline(const SolutionSpec& a, const SolutionSpec& b, const DifferenceOptions& opt = {});

// Configurations used by the pipeline demos.
SolutionSpec sphere_solution(int n, double k, Point base);
// The same solution presented in the chart y -> Q y.
SolutionSpec rotated(const SolutionSpec& s, const std::vector<double>& q);

}  // namespace uc
