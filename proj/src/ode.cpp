#include "uc/ode.hpp"

#include "uc/error.hpp"

#include <boost/numeric/odeint.hpp>

#include <cmath>

namespace uc {

namespace odeint = boost::numeric::odeint;

void integrate(const OdeRhs& rhs, OdeState& x, double t0, std::span<const double> times, const OdeOptions& opt,
               const OdeObserver& observe, const std::function<void(double, const OdeState&)>& check) {
  auto stepper = odeint::make_controlled(opt.abs_tol, opt.rel_tol, odeint::runge_kutta_fehlberg78<OdeState>());
  auto sys = [&rhs](const OdeState& s, OdeState& ds, double t) { rhs(s, ds, t); };
  double t = t0;
  double dt = opt.initial_step;
  long steps = 0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double target = times[k];
    if (target < t) throw NumericalError("output times must be increasing");
    while (t < target) {
      const bool last = t + dt >= target;
      double step = last ? target - t : dt;
      auto res = stepper.try_step(sys, x, t, step);
      if (res == odeint::success) {
        if (last) t = target;
        dt = last ? std::max(dt, step) : step;
        if (check) check(t, x);
        if (++steps > opt.max_steps) throw NumericalError("integration exceeded the step budget");
      } else {
        dt = step;
        if (dt < opt.min_step) throw NumericalError("step size underflow");
      }
    }
    if (observe) observe(k, t, x);
  }
}

}  // namespace uc
