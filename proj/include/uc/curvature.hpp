#pragma once

#include "uc/metric_field.hpp"
#include "uc/tensor.hpp"

#include <span>
#include <vector>

namespace uc {

// Taylor data of the Levi-Civita connection around one point. With metric
// jets of order D, the Christoffel symbols are exact to order D-1 and the
// curvature to order D-2.
struct LocalGeometry {
  int dim = 0;
  int order = 0;
  std::vector<Jet> g;          // g_ij, n*n
  std::vector<Jet> g_inv;      // g^ij, n*n
  BasicTensor<Jet> christoffel;  // (k, i, j) -> Gamma^k_ij
  BasicTensor<Jet> riemann;      // R_abcd, empty when order < 2

  static LocalGeometry from_metric_jets(std::vector<Jet> g, int dim, bool with_riemann = true);
  static LocalGeometry at(const MetricField& f, std::span<const double> p, int order, bool with_riemann = true);

  BasicTensor<Jet> metric_tensor() const;
  BasicTensor<Jet> inverse_metric_tensor() const;
  BasicTensor<Jet> ricci() const;
  Jet scalar_curvature() const;
};

// Gamma^k_ij at p, slots (k, i, j).
Tensor christoffel(const MetricField& f, std::span<const double> p);
// R_abcd = g(R(e_a, e_b) e_c, e_d) with R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y].
Tensor riemann(const MetricField& f, std::span<const double> p);
Tensor ricci(const MetricField& f, std::span<const double> p);
double scalar_curvature(const MetricField& f, std::span<const double> p);

// Flat Gamma^k_ij at x into out (size n^3), from first derivatives of g only.
void christoffel_values(const MetricField& f, std::span<const double> x, std::span<double> out);

// Covariant derivative of a tensor given by jets; the new slot is slot 0.
// The result's order is one less than the input's.
BasicTensor<Jet> covariant_derivative(const BasicTensor<Jet>& t, const LocalGeometry& geo);
// Trace of slots (0, 1) against g^ab.
BasicTensor<Jet> metric_trace01(const BasicTensor<Jet>& t, const LocalGeometry& geo);
// g^ab nabla_a nabla_b T.
BasicTensor<Jet> laplacian(const BasicTensor<Jet>& t, const LocalGeometry& geo);

// A tensor field with value-generic components.
struct TensorField {
  int dim = 0;
  std::vector<Variance> variance;
  FieldFn components;  // row-major components
  DiffBackend backend;

  BasicTensor<Jet> jet(std::span<const double> p, int order) const;
};

Tensor covariant_derivative(const TensorField& t, const MetricField& f, std::span<const double> p);
Tensor laplace_beltrami(const TensorField& t, const MetricField& f, std::span<const double> p);

}  // namespace uc
