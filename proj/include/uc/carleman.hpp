#pragma once

#include "uc/metric_field.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace uc {

// The large parameter of the weighted estimates. Unrelated to CosmologicalConstant.
struct CarlemanLambda {
  double value = 0.0;
  explicit CarlemanLambda(double v = 0.0) : value(v) {}
};

struct CarlemanParams {
  int n = 3;
  double delta = 0.05;
  double R = 0.25;
  double R0 = 0.35;

  // Throws ConfigError unless n >= 3, 0 < delta < 2/n and 0 < R < R0, with
  // R0 inside the range where r-hat is increasing.
  void validate() const;
  // R^delta / (1 - R^delta), the factor the absorption step wants <= 1.
  double absorption_factor() const;
  bool absorption_factor_bounded() const { return absorption_factor() <= 1.0; }
};

// r (1 - r^delta), for 0 <= r < 1.
double hat_r(double r, double delta);
// (1 + delta)^{-1/delta}: r-hat increases on [0, this] and decreases after.
double hat_r_monotone_limit(double delta);

// |lambda - (k + (n-2)/2)| >= 1/2 for every k >= 1.
bool lambda_admissible(double lambda, int n);

struct LebesgueExponents {
  double p;  // 2n / (n + 2)
  double q;  // 2n / (n - 2)
};
LebesgueExponents lebesgue_exponents(int n);

// phi(x) = 1 on |x| <= inner, exp(1 - 1/(1 - t^2)) with t = (|x| - inner)/(1 - inner)
// on inner < |x| < 1, and 0 beyond.
class Bump {
 public:
  explicit Bump(double inner);
  double inner() const { return inner_; }
  double profile(double rho) const;
  Jet operator()(std::span<const Jet> x) const;
  // Same bump rescaled to the ball of radius s: phi(x / s).
  Jet scaled(std::span<const Jet> x, double s) const;

 private:
  double inner_;
};

// chi_k(x) = 1 - phi(2^k x)
Jet cutoff_chi(const Bump& phi, int k, std::span<const Jet> x);
double cutoff_chi(const Bump& phi, int k, std::span<const double> x);

// Radial nodes on (0, R] graded by halving, times a rule on S^{n-1}.
class QuadratureGrid {
 public:
  // Ball B_R: shells [2^{-j-1} R, 2^{-j} R] for j < levels and the core
  // [0, 2^{-levels} R], each with `radial_nodes` Gauss points. sphere_order 0
  // gives a single direction carrying the whole sphere (radial integrands only).
  static QuadratureGrid ball(int n, double R, int levels, int radial_nodes = 16, int sphere_order = 16,
                             std::uint64_t seed = 1);
  // Annulus a < |x| < b split into `pieces` equal radial intervals.
  static QuadratureGrid annulus(int n, double a, double b, int pieces = 8, int radial_nodes = 16,
                                int sphere_order = 16, std::uint64_t seed = 1);

  int dim() const { return n_; }
  double radius() const { return outer_; }
  int shells() const { return shells_; }
  int core_shell() const { return shells_ - 1; }
  bool has_core() const { return has_core_; }
  // Nodes: point, radius, weight (r^{n-1} dr dsigma included) and shell index;
  // shell 0 is outermost and the core, when present, is last.
  std::size_t size() const { return r_.size(); }
  std::span<const double> point(std::size_t i) const { return {x_.data() + i * n_, static_cast<std::size_t>(n_)}; }
  double r(std::size_t i) const { return r_[i]; }
  double weight(std::size_t i) const { return w_[i]; }
  int shell(std::size_t i) const { return shell_[i]; }

  // Radial rule alone: (r, w) with sum w f(r) ~ int f(r) dr.
  const std::vector<std::pair<double, double>>& radial() const { return radial_; }
  // Spherical rule alone: unit vectors and weights summing to |S^{n-1}|.
  const std::vector<std::pair<Point, double>>& sphere() const { return sphere_; }
  // Standard error of the spherical weights for the Monte Carlo rule, 0 otherwise.
  double sphere_error() const { return sphere_error_; }

  // The same grid with twice the Gauss nodes per interval and twice the spherical order.
  QuadratureGrid refined() const;

 private:
  QuadratureGrid() = default;
  void build();
  int n_ = 0;
  double inner_ = 0.0, outer_ = 0.0;
  int levels_ = 0, pieces_ = 0, radial_nodes_ = 0, sphere_order_ = 0;
  std::uint64_t seed_ = 1;
  bool has_core_ = false;
  int shells_ = 0;
  double sphere_error_ = 0.0;
  std::vector<std::pair<double, double>> radial_;
  std::vector<int> radial_shell_;
  std::vector<std::pair<Point, double>> sphere_;
  std::vector<double> x_, r_, w_;
  std::vector<int> shell_;
};

double sphere_area(int n);
double ball_volume(int n, double R);

// Test function on R^n given through jets (orders <= 2 are used).
struct TestFunction {
  std::string name;
  ScalarFn fn;
  double support_radius = 1.0;
  std::optional<int> vanishing_order;  // nullopt: infinite order at the origin
  bool radial = false;
  double inner_radius = 0.0;  // vanishes identically on B_inner
};

// Samples of a function and the derivatives the estimates use.
struct FieldSamples {
  std::vector<double> u;
  std::vector<double> grad_norm;  // |grad u|
  std::vector<double> radial;     // d_r u
  std::vector<double> y;          // Y(u) = r d_r u
  std::vector<double> laplacian;  // flat Laplacian
};
FieldSamples sample(const TestFunction& f, const QuadratureGrid& grid);

struct WeightedNormOptions {
  double delta = 0.05;
  double exponent = 2.0;
  double extra_power = 0.0;    // multiplies by r^extra_power, e.g. -1 + delta/2
  double weight_base = 1.0;    // multiplies by weight_base^lambda, e.g. R-hat
  double core_fraction = 0.1;  // max share of the core shell before failing
};

// ( sum_w |r-hat^{-lambda} base^lambda r^e u|^s )^{1/s}, computed in the log domain.
// Throws NumericalError when the core shell carries more than core_fraction of the total.
double weighted_norm(std::span<const double> values, const QuadratureGrid& grid, CarlemanLambda lambda,
                     const WeightedNormOptions& opt);
// Log of the same norm, -inf for a zero field.
double log_weighted_norm(std::span<const double> values, const QuadratureGrid& grid, CarlemanLambda lambda,
                         const WeightedNormOptions& opt);
// Share of the s-th power of the norm carried by the core shell.
double core_share(std::span<const double> values, const QuadratureGrid& grid, CarlemanLambda lambda,
                  const WeightedNormOptions& opt);

// Smallest number of halving levels (at least `min_levels`) for which the
// core shell carries less than `target` of the norms of u and Y u at the
// given lambda and exponent; `max_levels` if none does.
int levels_for(const TestFunction& f, const CarlemanParams& cp, CarlemanLambda lambda, double target = 1e-3,
               int min_levels = 4, int max_levels = 48, double exponent = 2.0);

struct Lemma2Row {
  double lambda = 0.0;
  double lhs = 0.0;    // ||r-hat^{-lambda} u||_2
  double rhs = 0.0;    // ||r-hat^{-lambda} Y u||_2
  double ratio = 0.0;  // lambda lhs / rhs
  bool vacuous = false;
  int levels = 0;
};
struct Lemma2Report {
  std::string function;
  std::vector<Lemma2Row> rows;
  double sup_ratio = 0.0;
  double measured_constant = 0.0;  // 1.1 * sup_ratio
  bool holds = false;              // sup_ratio <= declared constant
};
Lemma2Report lemma2_verify(const TestFunction& u, std::span<const double> lambdas, const CarlemanParams& cp,
                           double declared_constant, int jobs = 1);

// ||r-hat^{-lambda} u||_2^2 directly and through the integration by parts
// of the proof: (2 c/(2 lambda - n)) int (1-r^d)^{-2 lambda} u d_r u r^{n-2 lambda}
// + (2 c lambda d/(2 lambda - n)) int r^d/(1-r^d) r-hat^{-2 lambda} u^2 r^{n-1}.
struct ByPartsCheck {
  double direct = 0.0;
  double by_parts = 0.0;
  double relative_error = 0.0;
};
ByPartsCheck lemma2_by_parts(const TestFunction& u, CarlemanLambda lambda, const CarlemanParams& cp, int levels);

struct SoggeRow {
  double lambda = 0.0;
  bool admissible = false;
  std::string skipped;  // reason when not evaluated
  double u_term = 0.0;     // ||r-hat^{-lambda} u||_q
  double grad_term = 0.0;  // lambda^{1/n} ||r-hat^{-lambda} r^{-1+delta/2} grad u||_q
  double rhs = 0.0;        // ||r-hat^{-lambda} Lap u||_p
  double ratio = 0.0;
  bool vacuous = false;
};
struct SoggeReport {
  std::string function;
  std::vector<SoggeRow> rows;
  double first_quartile_mean = 0.0;
  double last_quartile_mean = 0.0;
  bool bounded = false;  // last-quartile mean <= 2 x first-quartile mean
};
SoggeReport sogge_probe(const TestFunction& u, std::span<const double> lambdas, const CarlemanParams& cp,
                        int jobs = 1);

// Hoelder steps on B_R: ||f||_p <= c R^2 ||f||_q and ||f||_2 <= c' R ||f||_q with
// c = |B_R|^{2/n} / R^2 and c' = |B_R|^{(q-2)/(2q)} / R.
struct HolderCheck {
  double lp = 0.0, lq = 0.0, l2 = 0.0;
  double c = 0.0, c_prime = 0.0;
  double bound_p = 0.0;  // c R^2 ||f||_q
  double bound_2 = 0.0;  // c' R ||f||_q
  bool holds = false;
};
HolderCheck holder_step_check(std::span<const double> values, const QuadratureGrid& grid);

// Test-function corpora.
std::vector<TestFunction> infinite_order_corpus(int n, double support);
std::vector<TestFunction> finite_order_corpus(int n, double support);
// Supported in an annulus away from the origin.
std::vector<TestFunction> origin_excluded_corpus(int n, double support);
TestFunction zero_function(int n, double support);

}  // namespace uc
