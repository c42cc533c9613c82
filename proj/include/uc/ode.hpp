#pragma once

#include <functional>
#include <span>
#include <vector>

namespace uc {

struct OdeOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double initial_step = 1e-3;
  double min_step = 1e-14;
  long max_steps = 500000;
};

using OdeState = std::vector<double>;
using OdeRhs = std::function<void(const OdeState&, OdeState&, double)>;
using OdeObserver = std::function<void(std::size_t, double, const OdeState&)>;

// Adaptive Runge-Kutta-Fehlberg 7(8) from t0 through the increasing output
// times. `check` runs after every accepted step and may throw.
void integrate(const OdeRhs& rhs, OdeState& x, double t0, std::span<const double> times, const OdeOptions& opt,
               const OdeObserver& observe, const std::function<void(double, const OdeState&)>& check = {});

}  // namespace uc
