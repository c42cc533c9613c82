#pragma once

#include "uc/metric_field.hpp"
#include "uc/ode.hpp"
#include "uc/tensor.hpp"

#include <span>
#include <vector>

namespace uc {

struct GeodesicSample {
  double t;
  Point x;
  std::vector<double> v;
};

struct GeodesicArc {
  Point start;
  std::vector<double> velocity;
  std::vector<GeodesicSample> samples;
};

// Geodesic with unit initial speed sampled at `times` (increasing, >= 0).
// Throws DomainError if the curve leaves the metric's domain.
GeodesicArc geodesic(const MetricField& f, std::span<const double> p, std::span<const double> v,
                     std::span<const double> times, const OdeOptions& opt = {});
// Convenience: `samples` equally spaced samples on [0, length].
GeodesicArc geodesic(const MetricField& f, std::span<const double> p, std::span<const double> v, double length,
                     int samples, const OdeOptions& opt = {});

// Parallel transport of t0 (given at the arc's start) to every sample.
std::vector<Tensor> parallel_transport(const MetricField& f, const GeodesicArc& arc, const Tensor& t0,
                                       const OdeOptions& opt = {});

// Right-hand side for x' = v, v' = -Gamma(v, v) and transported frame
// vectors e_i' = -Gamma(v, e_i), state [x, v, e_0, .., e_{m-1}].
void geodesic_transport_rhs(const MetricField& f, int frame_count, const OdeState& s, OdeState& ds);

}  // namespace uc
