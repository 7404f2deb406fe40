#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace contagion {

/// The four estimated quantities. All rates are per day.
struct SirParams {
  double beta = 0.0;   // transmission rate
  double gamma = 0.0;  // recovery rate; 1/gamma is the mean infectious period
  double r = 0.0;      // interest generated per percentage point newly infected per day
  double i0 = 0.0;     // initial infectious proportion

  bool valid() const { return beta > 0.0 && gamma > 0.0 && r > 0.0 && i0 > 0.0 && i0 < 1.0; }
  double r0() const { return beta / gamma; }
  double generation_time() const { return 1.0 / gamma; }

  friend bool operator==(const SirParams&, const SirParams&) = default;
};

/// Proportions. `c` is the cumulative proportion ever infected, including i0.
struct SirState {
  double s = 0.0;
  double i = 0.0;
  double rec = 0.0;
  double c = 0.0;
};

using Derivative = std::array<double, 4>;

struct IntegratorOptions {
  double rtol = 1e-6;
  double atol = 1e-8;
  double min_step = 1e-12;
  std::size_t max_steps = 1'000'000;
};

/// Solution sampled on the daily grid t = 0..horizon.
struct Trajectory {
  std::vector<SirState> states;
  std::vector<double> incidence;  // incidence[k] is new infections on day k+1

  std::size_t horizon() const { return states.empty() ? 0 : states.size() - 1; }
};

/// (-beta*S*I, beta*S*I - gamma*I, gamma*I, beta*S*I)
Derivative derivatives(const SirState& state, const SirParams& params);

/// Dormand-Prince 5(4) with the free 4th-order interpolant for the daily samples.
/// beta may be zero here (it is not a fitted value in that case). Throws
/// NumericalError with the failure time on step-size underflow.
Trajectory integrate(const SirParams& params, int horizon_days, const IntegratorOptions& opts = {});

/// C(t) - C(t-1) for consecutive grid points, negatives clamped to zero.
std::vector<double> daily_incidence(std::span<const SirState> states);

double basic_reproduction_number(const SirParams& params);

/// R0 * S(t) at every grid point.
std::vector<double> effective_r(const Trajectory& traj, const SirParams& params);

/// Solves z = 1 - s0 * exp(-r0 * z), the total proportion ever infected in a
/// closed epidemic that starts with 1 - s0 infectious. Returns 0 when s0 == 1 and
/// r0 <= 1. Throws NumericalError if the iteration does not settle.
double final_size_oracle(double r0, double s0);

}  // namespace contagion
