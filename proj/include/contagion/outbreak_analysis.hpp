#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "contagion/mcmc.hpp"
#include "contagion/sir_dynamics.hpp"
#include "contagion/trends_ingest.hpp"

namespace contagion {

/// Empirical quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double p);

struct Interval {
  double median = 0.0;
  double lower95 = 0.0;
  double upper95 = 0.0;
};

struct ParamSummary {
  Interval r0;
  Interval generation_time;
  Interval r;
  Interval i0;
  Interval beta;
  Interval gamma;
  std::size_t n_draws = 0;
};

/// 2.5/50/97.5 percentiles of each derived quantity. Needs at least 100 draws.
ParamSummary summarize(const PosteriorSamples& samples);

/// Indices into `available` draws: without replacement when n <= available, otherwise with.
std::vector<std::size_t> sample_draw_indices(std::size_t available, std::size_t n, Rng& rng);

struct Band {
  std::vector<double> median;
  std::vector<double> lower;
  std::vector<double> upper;
};

/// Per-day quantiles of noisy simulated interest, one entry per observation day.
struct PredictiveEnvelope {
  Band interest;
  std::size_t n_draws = 0;
};

/// R0*S(t) quantiles on the model grid t = 0..n (t = 0 is the initialisation day).
struct EffectiveREnvelope {
  Band rt;
  std::optional<int> first_day_below_one;  // first t with median R(t) < 1
  std::size_t n_draws = 0;
};

struct Ensemble {
  PredictiveEnvelope predictive;
  EffectiveREnvelope effective_r;
};

/// Simulates n_draws parameter sets from the posterior over the window: each
/// draw is integrated, mapped to expected interest and given Poisson noise.
/// Results depend only on (samples, window, n_draws, seed).
Ensemble simulate_ensemble(const PosteriorSamples& samples, const ObservationWindow& window, std::size_t n_draws,
                           std::uint64_t seed, const IntegratorOptions& integrator = {});

PredictiveEnvelope posterior_predictive(const PosteriorSamples& samples, const ObservationWindow& window,
                                        std::size_t n_draws, std::uint64_t seed,
                                        const IntegratorOptions& integrator = {});

EffectiveREnvelope effective_r_envelope(const PosteriorSamples& samples, const ObservationWindow& window,
                                        std::size_t n_draws, std::uint64_t seed,
                                        const IntegratorOptions& integrator = {});

/// 1 - SS_res / SS_tot. Throws InputError on length mismatch, fewer than two
/// points, or zero observed variance.
double r_squared(std::span<const double> observed, std::span<const double> predicted);

/// Noise-free mean interest r*(100*c_t) for each observation day.
std::vector<double> predicted_interest(const SirParams& params, std::size_t days,
                                       const IntegratorOptions& integrator = {});

struct ValidationReport {
  SirParams params;
  double r2_in_sample = 0.0;
  std::optional<double> r2_out_sample;
  std::string label_in;
  std::string label_out;
};

/// R^2 of the MAP trajectory against window A and, when given, window B. Each
/// window is aligned at its own first positive observation.
ValidationReport validate(const SirParams& params, const ObservationWindow& in_sample,
                          const ObservationWindow* out_sample = nullptr, const IntegratorOptions& integrator = {});
ValidationReport validate(const PosteriorSamples& samples, const ObservationWindow& in_sample,
                          const ObservationWindow* out_sample = nullptr, const IntegratorOptions& integrator = {});

struct PeakResult {
  int day = 0;
  bool interior = false;  // false when the maximum sits on the last grid day
};

/// Argmax over t = 1..horizon of daily incidence, earliest day on ties.
PeakResult incidence_peak_day(const SirParams& params, int horizon, const IntegratorOptions& integrator = {});

struct PeakTiming {
  double mean = 0.0;
  double sd = 0.0;
  std::vector<int> peak_days;
  std::size_t flagged = 0;  // draws with no interior peak even after doubling the horizon
  double i0 = 0.0;
  int horizon = 0;
};

/// Peak day of incidence for sampled (beta, gamma) pairs started from a fixed i0.
PeakTiming peak_timing(const PosteriorSamples& samples, std::size_t n_draws, double i0, std::uint64_t seed,
                       int horizon = 100, const IntegratorOptions& integrator = {});

/// max(0, 1 - 1/r0): chance that a branching process from one index case dies out.
double extinction_probability(double r0);

}  // namespace contagion
