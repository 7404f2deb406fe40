#pragma once

#include <cmath>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "contagion/sir_dynamics.hpp"
#include "contagion/trends_ingest.hpp"

namespace contagion {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Floor applied to Poisson means before taking logs.
inline constexpr double kMeanFloor = 1e-10;

/// Gamma prior on the mean infectious period 1/gamma, parameterised by shape and rate.
struct GammaPrior {
  double shape = 10.0;
  double rate = 10.0;

  static GammaPrior from_mean_variance(double mean, double variance);

  double mean() const { return shape / rate; }
  double variance() const { return shape / (rate * rate); }
  double log_pdf(double x) const;

  template <class Rng>
  double sample(Rng& rng) const {
    std::gamma_distribution<double> dist(shape, 1.0 / rate);
    return dist(rng);
  }
};

/// Hard support limits for the parameters that carry flat priors.
struct ParamBounds {
  double beta_max = 100.0;
  double r_max = 1e6;
  double i0_max = 0.5;

  bool contains(const SirParams& p) const {
    return p.beta > 0.0 && p.beta <= beta_max && p.gamma > 0.0 && std::isfinite(p.gamma) && p.r > 0.0 &&
           p.r <= r_max && p.i0 > 0.0 && p.i0 <= i0_max;
  }
};

struct ModelSpec {
  GammaPrior prior;
  ParamBounds bounds;
  IntegratorOptions integrator;
};

/// Mean interest r * (100 * c_t) for each day of the trajectory's incidence.
std::vector<double> expected_interest(const Trajectory& traj, double r);

/// y*ln(mu) - mu - lnGamma(y+1), with mu floored at kMeanFloor. Real-valued y is allowed.
double poisson_loglik(double observed, double mean);

/// Sum of poisson_loglik over aligned vectors.
double poisson_loglik(std::span<const double> observed, std::span<const double> means);

/// Integrates from the day before the first observation and scores every
/// observation day. Integration failure yields -inf and a logged warning.
double series_loglik(const ObservationWindow& window, const SirParams& params,
                     const IntegratorOptions& integrator = {});

/// Gamma log-density of the infectious period plus flat priors on beta, r, i0
/// within bounds. Out of support gives -inf.
double log_prior(const SirParams& params, const GammaPrior& prior, const ParamBounds& bounds = {});

double log_posterior(const ObservationWindow& window, const SirParams& params, const ModelSpec& model);

inline double log_posterior(const ObservationWindow& window, const SirParams& params, const GammaPrior& prior) {
  return log_posterior(window, params, ModelSpec{prior, {}, {}});
}

}  // namespace contagion
