#include "contagion/outbreak_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "contagion/errors.hpp"
#include "contagion/observation_model.hpp"
#include "parallel.hpp"

namespace contagion {

namespace {

double quantile_sorted(const std::vector<double>& v, double p) {
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

Interval interval_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return {quantile_sorted(v, 0.5), quantile_sorted(v, 0.025), quantile_sorted(v, 0.975)};
}

// Per-column quantiles of a row-major draws x days matrix.
Band band_of(const std::vector<std::vector<double>>& rows) {
  Band b;
  if (rows.empty()) return b;
  const std::size_t days = rows.front().size();
  std::vector<double> column(rows.size());
  for (std::size_t t = 0; t < days; ++t) {
    for (std::size_t k = 0; k < rows.size(); ++k) column[k] = rows[k][t];
    const auto iv = interval_of(column);
    b.median.push_back(iv.median);
    b.lower.push_back(iv.lower95);
    b.upper.push_back(iv.upper95);
  }
  return b;
}

}  // namespace

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw InputError("quantile of an empty set");
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("quantile probability must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  return quantile_sorted(values, p);
}

ParamSummary summarize(const PosteriorSamples& samples) {
  const auto& d = samples.draws;
  if (d.size() < 100) throw InputError("summaries need at least 100 draws, got " + std::to_string(d.size()));
  auto column = [&](auto&& f) {
    std::vector<double> v;
    v.reserve(d.size());
    for (const auto& x : d) v.push_back(f(x.params));
    return interval_of(std::move(v));
  };
  ParamSummary s;
  s.r0 = column([](const SirParams& p) { return p.r0(); });
  s.generation_time = column([](const SirParams& p) { return p.generation_time(); });
  s.r = column([](const SirParams& p) { return p.r; });
  s.i0 = column([](const SirParams& p) { return p.i0; });
  s.beta = column([](const SirParams& p) { return p.beta; });
  s.gamma = column([](const SirParams& p) { return p.gamma; });
  s.n_draws = d.size();
  return s;
}

std::vector<std::size_t> sample_draw_indices(std::size_t available, std::size_t n, Rng& rng) {
  if (available == 0) throw InputError("no posterior draws to sample from");
  std::vector<std::size_t> out;
  out.reserve(n);
  if (n <= available) {
    // Partial Fisher-Yates.
    std::vector<std::size_t> pool(available);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t k = 0; k < n; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, available - 1);
      std::swap(pool[k], pool[pick(rng)]);
      out.push_back(pool[k]);
    }
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, available - 1);
    for (std::size_t k = 0; k < n; ++k) out.push_back(pick(rng));
  }
  return out;
}

Ensemble simulate_ensemble(const PosteriorSamples& samples, const ObservationWindow& window, std::size_t n_draws,
                           std::uint64_t seed, const IntegratorOptions& integrator) {
  if (n_draws < 1) throw InputError("ensemble size must be at least 1");
  if (window.size() < 1) throw InputError("empty observation window");
  Rng picker(derive_seed(seed, 0));
  const auto idx = sample_draw_indices(samples.draws.size(), n_draws, picker);
  const int days = static_cast<int>(window.size());

  std::vector<std::vector<double>> noisy(n_draws), rt(n_draws);
  detail::parallel_for(n_draws, [&](std::size_t k) {
    const SirParams& p = samples.draws[idx[k]].params;
    const auto traj = integrate(p, days, integrator);
    Rng rng(derive_seed(seed, k + 1));
    auto& row = noisy[k];
    for (double mu : expected_interest(traj, p.r))
      row.push_back(mu > 0.0 ? static_cast<double>(std::poisson_distribution<long long>(mu)(rng)) : 0.0);
    rt[k] = effective_r(traj, p);
  });

  Ensemble e;
  e.predictive.interest = band_of(noisy);
  e.predictive.n_draws = n_draws;
  e.effective_r.rt = band_of(rt);
  e.effective_r.n_draws = n_draws;
  for (std::size_t t = 0; t < e.effective_r.rt.median.size(); ++t) {
    if (e.effective_r.rt.median[t] < 1.0) {
      e.effective_r.first_day_below_one = static_cast<int>(t);
      break;
    }
  }
  return e;
}

PredictiveEnvelope posterior_predictive(const PosteriorSamples& samples, const ObservationWindow& window,
                                        std::size_t n_draws, std::uint64_t seed, const IntegratorOptions& integrator) {
  return simulate_ensemble(samples, window, n_draws, seed, integrator).predictive;
}

EffectiveREnvelope effective_r_envelope(const PosteriorSamples& samples, const ObservationWindow& window,
                                        std::size_t n_draws, std::uint64_t seed,
                                        const IntegratorOptions& integrator) {
  return simulate_ensemble(samples, window, n_draws, seed, integrator).effective_r;
}

double r_squared(std::span<const double> observed, std::span<const double> predicted) {
  if (observed.size() != predicted.size()) throw InputError("R^2 needs equal-length series");
  if (observed.size() < 2) throw InputError("R^2 needs at least two points");
  const double mean = std::accumulate(observed.begin(), observed.end(), 0.0) / static_cast<double>(observed.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    ss_res += (observed[k] - predicted[k]) * (observed[k] - predicted[k]);
    ss_tot += (observed[k] - mean) * (observed[k] - mean);
  }
  if (!(ss_tot > 0.0)) throw InputError("R^2 undefined: observed series has zero variance");
  return 1.0 - ss_res / ss_tot;
}

std::vector<double> predicted_interest(const SirParams& params, std::size_t days,
                                       const IntegratorOptions& integrator) {
  return expected_interest(integrate(params, static_cast<int>(days), integrator), params.r);
}

ValidationReport validate(const SirParams& params, const ObservationWindow& in_sample,
                          const ObservationWindow* out_sample, const IntegratorOptions& integrator) {
  ValidationReport rep;
  rep.params = params;
  rep.r2_in_sample = r_squared(in_sample.observations, predicted_interest(params, in_sample.size(), integrator));
  if (out_sample)
    rep.r2_out_sample =
        r_squared(out_sample->observations, predicted_interest(params, out_sample->size(), integrator));
  return rep;
}

ValidationReport validate(const PosteriorSamples& samples, const ObservationWindow& in_sample,
                          const ObservationWindow* out_sample, const IntegratorOptions& integrator) {
  return validate(map_estimate(samples), in_sample, out_sample, integrator);
}

PeakResult incidence_peak_day(const SirParams& params, int horizon, const IntegratorOptions& integrator) {
  const auto traj = integrate(params, horizon, integrator);
  const auto& inc = traj.incidence;
  const auto best = std::max_element(inc.begin(), inc.end());  // first maximum on ties
  const int day = static_cast<int>(best - inc.begin()) + 1;
  return {day, day < horizon};
}

PeakTiming peak_timing(const PosteriorSamples& samples, std::size_t n_draws, double i0, std::uint64_t seed,
                       int horizon, const IntegratorOptions& integrator) {
  if (n_draws < 1) throw InputError("peak timing needs at least one draw");
  if (!(i0 > 0.0 && i0 < 1.0)) throw InputError("peak timing i0 must lie in (0, 1)");
  if (horizon < 2) throw InputError("peak timing horizon must be at least 2 days");
  Rng picker(derive_seed(seed, 0));
  const auto idx = sample_draw_indices(samples.draws.size(), n_draws, picker);

  PeakTiming out;
  out.i0 = i0;
  out.horizon = horizon;
  out.peak_days.resize(n_draws);
  std::vector<char> flagged(n_draws, 0);
  detail::parallel_for(n_draws, [&](std::size_t k) {
    SirParams p = samples.draws[idx[k]].params;
    p.i0 = i0;
    auto peak = incidence_peak_day(p, horizon, integrator);
    if (!peak.interior) {
      peak = incidence_peak_day(p, 2 * horizon, integrator);
      flagged[k] = peak.interior ? 0 : 1;
    }
    out.peak_days[k] = peak.day;
  });
  out.flagged = static_cast<std::size_t>(std::count(flagged.begin(), flagged.end(), 1));

  const double n = static_cast<double>(n_draws);
  out.mean = std::accumulate(out.peak_days.begin(), out.peak_days.end(), 0.0) / n;
  if (n_draws > 1) {
    double ss = 0.0;
    for (int d : out.peak_days) ss += (d - out.mean) * (d - out.mean);
    out.sd = std::sqrt(ss / (n - 1.0));
  }
  return out;
}

double extinction_probability(double r0) {
  if (!(r0 > 0.0)) throw InputError("extinction probability needs r0 > 0");
  return std::max(0.0, 1.0 - 1.0 / r0);
}

}  // namespace contagion
