#pragma once

#include "uc/jet.hpp"
#include "uc/tensor.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace uc {

using Point = std::vector<double>;
// Value-generic field: evaluated on jets it yields Taylor expansions.
using FieldFn = std::function<std::vector<Jet>(std::span<const Jet>)>;
using ScalarFn = std::function<Jet(std::span<const Jet>)>;

struct DiffBackend {
  enum class Kind { analytic, finite_difference };
  Kind kind = Kind::analytic;
  double h = 1e-4;       // step for derivatives of order <= 2
  double h_high = 1e-3;  // step for orders 3 and 4

  static DiffBackend analytic() { return {}; }
  static DiffBackend finite_difference(double h = 1e-4, double h_high = 1e-3) {
    return {Kind::finite_difference, h, h_high};
  }
  bool is_analytic() const { return kind == Kind::analytic; }
};

// Taylor coefficients of fn around p up to `order`, either by evaluating on
// jets or by nested central differences of plain evaluations.
std::vector<Jet> taylor_expand(const FieldFn& fn, std::span<const double> p, int order, const DiffBackend& backend);
Jet taylor_expand(const ScalarFn& fn, std::span<const double> p, int order, const DiffBackend& backend);

// fn evaluated at jet arguments y: direct for the analytic backend,
// otherwise the finite-difference expansion at y's value composed with y.
std::vector<Jet> evaluate_on_jets(const FieldFn& fn, std::span<const Jet> y, const DiffBackend& backend);

enum class MetricPreset { euclidean, sphere, hyperbolic, custom };

std::string to_string(MetricPreset p);

class MetricField {
 public:
  // g returns the n*n components g_ij row-major.
  MetricField(int dim, FieldFn g, MetricPreset preset, std::function<bool(std::span<const double>)> domain);

  static MetricField euclidean(int dim);
  // (1 + K|x|^2/4)^-2 delta: constant sectional curvature K, the identity at 0.
  static MetricField constant_curvature(int dim, double k);
  // delta + eps * (random symmetric polynomial of degree 3 + a trigonometric term),
  // defined on the unit ball.
  static MetricField random_perturbation(int dim, double eps, std::uint64_t seed);
  // Pullback by the linear map y -> Q y: (Q^T g(Q y) Q).
  MetricField pulled_back(const std::vector<double>& q) const;

  MetricField with_backend(const DiffBackend& b) const;

  int dim() const { return dim_; }
  MetricPreset preset() const { return preset_; }
  const DiffBackend& backend() const { return backend_; }
  // Sectional curvature for the constant-curvature presets, NaN otherwise.
  double curvature() const { return curvature_; }
  bool in_domain(std::span<const double> p) const { return domain_(p); }
  const FieldFn& components() const { return g_; }

  MetricAtPoint at(std::span<const double> p) const;
  // Taylor expansion of g_ij around p, n*n jets row-major.
  std::vector<Jet> jet(std::span<const double> p, int order) const;
  std::vector<Jet> evaluate(std::span<const Jet> y) const;
  // d^order g_ij / dx^{a_1}..dx^{a_order} as a tensor with slots (i, j, a_1, .., a_order).
  Tensor partials(std::span<const double> p, int order) const;

  // Riemannian distance to the origin; only for constant-curvature presets.
  double distance_from_origin(std::span<const double> p) const;

 private:
  void check_point(std::span<const double> p) const;
  int dim_;
  FieldFn g_;
  MetricPreset preset_;
  std::function<bool(std::span<const double>)> domain_;
  DiffBackend backend_;
  double curvature_;
};

}  // namespace uc
