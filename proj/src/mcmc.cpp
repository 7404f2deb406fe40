#include "contagion/mcmc.hpp"

#include <algorithm>
#include <future>
#include <numeric>

#include "contagion/errors.hpp"

namespace contagion {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void McmcConfig::validate() const {
  if (samples < 1) throw InputError("samples must be at least 1");
  if (thin < 1) throw InputError("thin must be at least 1");
  if (adapt && adapt_interval < 2) throw InputError("adapt interval must be at least 2");
  for (double s : step_sizes)
    if (!(s > 0.0) || !std::isfinite(s)) throw InputError("step sizes must be positive");
}

WorkingPoint to_working(const SirParams& p) {
  return {std::log(p.beta), std::log(p.gamma), std::log(p.r), std::log(p.i0) - std::log1p(-p.i0)};
}

SirParams from_working(const WorkingPoint& w) {
  SirParams p;
  p.beta = std::exp(w[0]);
  p.gamma = std::exp(w[1]);
  p.r = std::exp(w[2]);
  p.i0 = 1.0 / (1.0 + std::exp(-w[3]));
  return p;
}

double log_jacobian(const WorkingPoint& w) {
  // d beta/d log beta = beta; d(1/gamma)/d log gamma = -1/gamma; d r/d log r = r;
  // d i0/d logit i0 = i0 (1 - i0).
  const double log_i0 = -std::log1p(std::exp(-w[3]));
  const double log_1m_i0 = -std::log1p(std::exp(w[3]));
  return w[0] - w[1] + w[2] + log_i0 + log_1m_i0;
}

WorkingPoint initial_point(const ObservationWindow& window, const ModelSpec& model, Rng& rng) {
  const double peak = window.observations.empty()
                          ? 1.0
                          : *std::max_element(window.observations.begin(), window.observations.end());
  for (int attempt = 0; attempt < 100; ++attempt) {
    SirParams p;
    const double period = model.prior.sample(rng);
    p.gamma = 1.0 / period;
    p.beta = 2.0 * p.gamma;
    p.r = std::max(peak, 1e-3) / (100.0 * 0.01);
    p.i0 = 1e-3;
    if (std::isfinite(log_posterior(window, p, model))) return to_working(p);
  }
  throw NumericalError("no finite log-posterior found at 100 initial points");
}

PosteriorSamples run_chain(const ObservationWindow& window, const ModelSpec& model, const McmcConfig& config) {
  config.validate();
  Rng rng(config.seed);

  auto target = [&](const WorkingPoint& w) {
    const double lp = log_posterior(window, from_working(w), model);
    if (lp == kNegInf) return kNegInf;
    return lp + log_jacobian(w);
  };

  ChainState<kNumParams> start;
  start.point = initial_point(window, model, rng);
  start.log_target = target(start.point);

  SamplerSettings settings{config.burn_in, config.samples, config.thin, config.adapt, config.adapt_interval,
                           config.target_acceptance};
  const auto chain = run_sampler<kNumParams>(target, start, std::span<const double, kNumParams>(config.step_sizes), settings, rng);

  PosteriorSamples out;
  out.config = config;
  out.acceptance_rate = chain.acceptance_rate;
  out.final_steps = marginal_sds<kNumParams>(chain.proposal);
  out.draws.reserve(chain.draws.size());
  for (std::size_t k = 0; k < chain.draws.size(); ++k) {
    // Store the natural-scale log posterior, not the working-scale target.
    const double lp = chain.log_targets[k] - log_jacobian(chain.draws[k]);
    out.draws.push_back({from_working(chain.draws[k]), lp, chain.iterations[k]});
  }
  return out;
}

std::vector<PosteriorSamples> run_chains(const ObservationWindow& window, const ModelSpec& model,
                                         const McmcConfig& config, std::size_t n_chains) {
  if (n_chains < 1) throw InputError("at least one chain is required");
  std::vector<std::future<PosteriorSamples>> futures;
  futures.reserve(n_chains);
  for (std::size_t k = 0; k < n_chains; ++k) {
    McmcConfig c = config;
    c.seed = derive_seed(config.seed, k);
    futures.push_back(std::async(std::launch::async, [&window, &model, c] { return run_chain(window, model, c); }));
  }
  std::vector<PosteriorSamples> chains;
  chains.reserve(n_chains);
  for (auto& f : futures) chains.push_back(f.get());
  return chains;
}

PosteriorSamples merge_chains(std::span<const PosteriorSamples> chains) {
  PosteriorSamples out;
  if (chains.empty()) return out;
  out.config = chains.front().config;
  out.final_steps = chains.front().final_steps;
  double accepted = 0.0, total = 0.0;
  for (const auto& c : chains) {
    out.draws.insert(out.draws.end(), c.draws.begin(), c.draws.end());
    accepted += c.acceptance_rate * static_cast<double>(c.config.samples);
    total += static_cast<double>(c.config.samples);
  }
  out.acceptance_rate = total > 0.0 ? accepted / total : 0.0;
  return out;
}

std::vector<PosteriorSamples> split_chains(const PosteriorSamples& merged) {
  std::vector<PosteriorSamples> out;
  for (std::size_t k = 0; k < merged.draws.size(); ++k) {
    if (k == 0 || merged.draws[k].iteration <= merged.draws[k - 1].iteration) {
      out.emplace_back();
      out.back().config = merged.config;
      out.back().acceptance_rate = merged.acceptance_rate;
    }
    out.back().draws.push_back(merged.draws[k]);
  }
  return out;
}

SirParams map_estimate(const PosteriorSamples& samples) {
  if (samples.draws.empty()) throw InputError("MAP estimate needs at least one draw");
  const Draw* best = &samples.draws.front();
  for (const auto& d : samples.draws)
    if (d.log_posterior > best->log_posterior) best = &d;
  return best->params;
}

double effective_sample_size(std::span<const double> chain) {
  const std::size_t n = chain.size();
  if (n < 10) throw InputError("effective sample size needs at least 10 draws");
  const double mean = std::accumulate(chain.begin(), chain.end(), 0.0) / static_cast<double>(n);
  auto autocov = [&](std::size_t lag) {
    double acc = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) acc += (chain[t] - mean) * (chain[t + lag] - mean);
    return acc / static_cast<double>(n);
  };
  const double c0 = autocov(0);
  if (!(c0 > 0.0)) return 1.0;

  // Geyer: sum consecutive autocorrelation pairs while positive, enforcing monotone decrease.
  double sum_pairs = 0.0;
  double prev_pair = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; 2 * m + 1 < n; ++m) {
    double pair = autocov(2 * m) / c0 + autocov(2 * m + 1) / c0;
    if (pair <= 0.0) break;
    pair = std::min(pair, prev_pair);
    sum_pairs += pair;
    prev_pair = pair;
  }
  const double tau = -1.0 + 2.0 * sum_pairs;
  return static_cast<double>(n) / std::max(tau, 1.0 / std::log10(static_cast<double>(n)));
}

double split_rhat(std::span<const std::vector<double>> chains) {
  if (chains.size() < 2) throw InputError("split-Rhat needs at least two chains");
  std::vector<std::span<const double>> halves;
  for (const auto& c : chains) {
    if (c.size() < 10) throw InputError("split-Rhat needs at least 10 draws per chain");
    const std::size_t half = c.size() / 2;
    halves.emplace_back(c.data(), half);
    halves.emplace_back(c.data() + c.size() - half, half);
  }
  const std::size_t n = halves.front().size();
  const double m = static_cast<double>(halves.size());
  std::vector<double> means, vars;
  for (auto h : halves) {
    const double mu = std::accumulate(h.begin(), h.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double x : h) ss += (x - mu) * (x - mu);
    means.push_back(mu);
    vars.push_back(ss / static_cast<double>(n - 1));
  }
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) / m;
  double b = 0.0;
  for (double mu : means) b += (mu - grand) * (mu - grand);
  b *= static_cast<double>(n) / (m - 1.0);
  const double w = std::accumulate(vars.begin(), vars.end(), 0.0) / m;
  if (!(w > 0.0)) return b > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
  const double var_plus = (static_cast<double>(n) - 1.0) / static_cast<double>(n) * w + b / static_cast<double>(n);
  return std::sqrt(var_plus / w);
}

Diagnostics diagnostics(std::span<const PosteriorSamples> chains) {
  if (chains.empty()) throw InputError("diagnostics need at least one chain");
  Diagnostics out;
  out.n_chains = chains.size();
  double accepted = 0.0;
  for (const auto& c : chains) {
    if (c.draws.size() < 10) throw InputError("diagnostics need at least 10 draws per chain");
    out.n_draws += c.draws.size();
    accepted += c.acceptance_rate;
  }
  out.acceptance_rate = accepted / static_cast<double>(chains.size());

  const auto coord = [](const SirParams& p, std::size_t k) {
    switch (k) {
      case 0: return p.beta;
      case 1: return p.gamma;
      case 2: return p.r;
      default: return p.i0;
    }
  };
  for (std::size_t k = 0; k < kNumParams; ++k) {
    std::vector<std::vector<double>> series;
    bool all_constant = true;
    for (const auto& c : chains) {
      auto& s = series.emplace_back();
      for (const auto& d : c.draws) s.push_back(coord(d.params, k));
      if (std::any_of(s.begin(), s.end(), [&](double x) { return x != s.front(); })) all_constant = false;
    }
    auto& pd = out.params[k];
    for (const auto& s : series) pd.ess += effective_sample_size(s);
    pd.degenerate = all_constant;
    if (series.size() >= 2) pd.rhat = split_rhat(series);
  }
  return out;
}

}  // namespace contagion
