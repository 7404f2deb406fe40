#include "contagion/sir_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "contagion/errors.hpp"

namespace contagion {

namespace {

using Vec = std::array<double, 4>;

Vec to_vec(const SirState& s) { return {s.s, s.i, s.rec, s.c}; }
SirState to_state(const Vec& v) { return {v[0], v[1], v[2], v[3]}; }

Vec rhs(const Vec& y, const SirParams& p) {
  const double infection = p.beta * y[0] * y[1];
  const double recovery = p.gamma * y[1];
  return {-infection, infection - recovery, recovery, infection};
}

// y + h * sum(coef_j * k_j)
template <std::size_t N>
Vec combine(const Vec& y, double h, const std::array<double, N>& coef, const std::array<const Vec*, N>& ks) {
  Vec out = y;
  for (std::size_t d = 0; d < 4; ++d) {
    double acc = 0.0;
    for (std::size_t j = 0; j < N; ++j) acc += coef[j] * (*ks[j])[d];
    out[d] += h * acc;
  }
  return out;
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense output coefficients (Hairer & Wanner, dopri5 contd5).
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

struct DenseStep {
  std::array<Vec, 5> r;

  Vec at(double theta) const {
    const double theta1 = 1.0 - theta;
    Vec out{};
    for (std::size_t d = 0; d < 4; ++d)
      out[d] = r[0][d] + theta * (r[1][d] + theta1 * (r[2][d] + theta * (r[3][d] + theta1 * r[4][d])));
    return out;
  }
};

double initial_step(const Vec& y0, const Vec& f0, const IntegratorOptions& o) {
  double dnf = 0.0, dny = 0.0;
  for (std::size_t d = 0; d < 4; ++d) {
    const double sk = o.atol + o.rtol * std::abs(y0[d]);
    dnf += (f0[d] / sk) * (f0[d] / sk);
    dny += (y0[d] / sk) * (y0[d] / sk);
  }
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
  return std::clamp(h, 1e-6, 1.0);
}

}  // namespace

Derivative derivatives(const SirState& state, const SirParams& params) { return rhs(to_vec(state), params); }

Trajectory integrate(const SirParams& params, int horizon_days, const IntegratorOptions& opts) {
  if (horizon_days < 1) throw InputError("integration horizon must be at least one day");

  Trajectory traj;
  traj.states.reserve(static_cast<std::size_t>(horizon_days) + 1);

  Vec y{1.0 - params.i0, params.i0, 0.0, params.i0};
  traj.states.push_back(to_state(y));

  const double t_end = horizon_days;
  double t = 0.0;
  Vec k1 = rhs(y, params);
  double h = initial_step(y, k1, opts);
  int next_day = 1;
  std::size_t steps = 0;

  while (next_day <= horizon_days) {
    if (++steps > opts.max_steps) {
      std::ostringstream msg;
      msg << "step limit exceeded at t=" << t;
      throw NumericalError(msg.str());
    }
    if (h < opts.min_step) {
      std::ostringstream msg;
      msg << "step size underflow at t=" << t;
      throw NumericalError(msg.str());
    }
    const bool last = t + h >= t_end;
    if (last) h = t_end - t;

    const Vec k2 = rhs(combine<1>(y, h, {a21}, {&k1}), params);
    const Vec k3 = rhs(combine<2>(y, h, {a31, a32}, {&k1, &k2}), params);
    const Vec k4 = rhs(combine<3>(y, h, {a41, a42, a43}, {&k1, &k2, &k3}), params);
    const Vec k5 = rhs(combine<4>(y, h, {a51, a52, a53, a54}, {&k1, &k2, &k3, &k4}), params);
    const Vec k6 = rhs(combine<5>(y, h, {a61, a62, a63, a64, a65}, {&k1, &k2, &k3, &k4, &k5}), params);
    const Vec y1 = combine<5>(y, h, {b1, b3, b4, b5, b6}, {&k1, &k3, &k4, &k5, &k6});
    const Vec k7 = rhs(y1, params);

    double err = 0.0;
    for (std::size_t d = 0; d < 4; ++d) {
      const double e = h * (e1 * k1[d] + e3 * k3[d] + e4 * k4[d] + e5 * k5[d] + e6 * k6[d] + e7 * k7[d]);
      const double sk = opts.atol + opts.rtol * std::max(std::abs(y[d]), std::abs(y1[d]));
      err += (e / sk) * (e / sk);
    }
    err = std::sqrt(err / 4.0);

    if (!std::isfinite(err) || err > 1.0) {
      const double fac = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
      h *= fac;
      continue;
    }

    DenseStep dense;
    dense.r[0] = y;
    for (std::size_t d = 0; d < 4; ++d) {
      const double ydiff = y1[d] - y[d];
      const double bspl = h * k1[d] - ydiff;
      dense.r[1][d] = ydiff;
      dense.r[2][d] = bspl;
      dense.r[3][d] = ydiff - h * k7[d] - bspl;
      dense.r[4][d] = h * (d1 * k1[d] + d3 * k3[d] + d4 * k4[d] + d5 * k5[d] + d6 * k6[d] + d7 * k7[d]);
    }

    const double t_new = last ? t_end : t + h;
    while (next_day <= horizon_days && next_day <= t_new) {
      const Vec sample = (next_day == t_new) ? y1 : dense.at((next_day - t) / h);
      traj.states.push_back(to_state(sample));
      ++next_day;
    }

    const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    t = t_new;
    y = y1;
    k1 = k7;
    h *= fac;
  }

  // Once I falls to the size of atol, accepted steps and the interpolant can
  // wobble S and C at the tolerance level. The exact solution has S
  // non-increasing, C non-decreasing and I >= 0, so project the samples onto that.
  for (std::size_t k = 1; k < traj.states.size(); ++k) {
    auto& cur = traj.states[k];
    const auto& prev = traj.states[k - 1];
    cur.s = std::min(cur.s, prev.s);
    cur.c = std::max(cur.c, prev.c);
    cur.i = std::max(cur.i, 0.0);
  }

  traj.incidence = daily_incidence(traj.states);
  return traj;
}

std::vector<double> daily_incidence(std::span<const SirState> states) {
  std::vector<double> out;
  if (states.size() < 2) return out;
  out.reserve(states.size() - 1);
  for (std::size_t t = 1; t < states.size(); ++t) out.push_back(std::max(0.0, states[t].c - states[t - 1].c));
  return out;
}

double basic_reproduction_number(const SirParams& params) { return params.beta / params.gamma; }

std::vector<double> effective_r(const Trajectory& traj, const SirParams& params) {
  const double r0 = basic_reproduction_number(params);
  std::vector<double> out;
  out.reserve(traj.states.size());
  for (const auto& s : traj.states) out.push_back(r0 * s.s);
  return out;
}

double final_size_oracle(double r0, double s0) {
  if (!(r0 > 0.0)) throw InputError("final size requires r0 > 0");
  if (!(s0 > 0.0 && s0 <= 1.0)) throw InputError("final size requires 0 < s0 <= 1");
  if (s0 == 1.0 && r0 <= 1.0) return 0.0;

  // Below threshold start from the initial infected fraction so the iteration
  // climbs to the small root; above it, start at 1 and descend to the epidemic root.
  double z = (r0 * s0 <= 1.0) ? 1.0 - s0 : 1.0;
  constexpr double damping = 0.5;
  for (int iter = 0; iter < 100'000; ++iter) {
    const double g = 1.0 - s0 * std::exp(-r0 * z);
    if (std::abs(g - z) < 1e-12) return g;
    z = (1.0 - damping) * z + damping * g;
  }
  throw NumericalError("final size iteration did not converge");
}

}  // namespace contagion
