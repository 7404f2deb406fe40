#include "contagion/observation_model.hpp"

#include <cmath>
#include <string>

#include "contagion/errors.hpp"
#include "contagion/log.hpp"

namespace contagion {

GammaPrior GammaPrior::from_mean_variance(double mean, double variance) {
  if (!(mean > 0.0) || !(variance > 0.0)) throw InputError("prior mean and variance must be positive");
  return {mean * mean / variance, mean / variance};
}

double GammaPrior::log_pdf(double x) const {
  if (!(x > 0.0) || !std::isfinite(x)) return kNegInf;
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

std::vector<double> expected_interest(const Trajectory& traj, double r) {
  std::vector<double> out;
  out.reserve(traj.incidence.size());
  for (double c : traj.incidence) out.push_back(r * (100.0 * c));
  return out;
}

double poisson_loglik(double observed, double mean) {
  const double mu = std::max(mean, kMeanFloor);
  return observed * std::log(mu) - mu - std::lgamma(observed + 1.0);
}

double poisson_loglik(std::span<const double> observed, std::span<const double> means) {
  double total = 0.0;
  for (std::size_t k = 0; k < observed.size(); ++k) total += poisson_loglik(observed[k], means[k]);
  return total;
}

double series_loglik(const ObservationWindow& window, const SirParams& params, const IntegratorOptions& integrator) {
  if (window.observations.empty()) return 0.0;
  try {
    const auto traj = integrate(params, static_cast<int>(window.size()), integrator);
    const auto means = expected_interest(traj, params.r);
    return poisson_loglik(window.observations, means);
  } catch (const NumericalError& e) {
    log_warning(std::string("likelihood set to -inf: ") + e.what());
    return kNegInf;
  }
}

double log_prior(const SirParams& params, const GammaPrior& prior, const ParamBounds& bounds) {
  if (!bounds.contains(params)) return kNegInf;
  return prior.log_pdf(1.0 / params.gamma);
}

double log_posterior(const ObservationWindow& window, const SirParams& params, const ModelSpec& model) {
  const double lp = log_prior(params, model.prior, model.bounds);
  if (lp == kNegInf) return kNegInf;
  const double ll = series_loglik(window, params, model.integrator);
  const double total = lp + ll;
  return std::isnan(total) ? kNegInf : total;
}

}  // namespace contagion
