#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "contagion/observation_model.hpp"
#include "contagion/sir_dynamics.hpp"
#include "contagion/trends_ingest.hpp"

namespace contagion {

using Rng = std::mt19937_64;

/// splitmix64 finaliser; derives independent stream seeds from one user seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

inline constexpr std::size_t kNumParams = 4;

struct McmcConfig {
  std::size_t burn_in = 10'000;
  std::size_t samples = 40'000;
  std::size_t thin = 1;
  std::uint64_t seed = 0;
  // Proposal sds on the (log beta, log gamma, log r, logit i0) scale.
  std::array<double, kNumParams> step_sizes{0.05, 0.05, 0.05, 0.2};
  bool adapt = true;
  std::size_t adapt_interval = 500;
  double target_acceptance = 0.25;

  void validate() const;
};

// ---------------------------------------------------------------------------
// Generic random-walk Metropolis. The target is any callable returning the
// log density (up to a constant) of a point; -inf marks zero density.

template <std::size_t D>
using Point = std::array<double, D>;

template <std::size_t D>
using Matrix = std::array<std::array<double, D>, D>;

/// Lower-triangular factor of a symmetric positive-definite matrix, or nullopt.
template <std::size_t D>
std::optional<Matrix<D>> cholesky(const Matrix<D>& a) {
  Matrix<D> l{};
  for (std::size_t j = 0; j < D; ++j) {
    double diag = a[j][j];
    for (std::size_t k = 0; k < j; ++k) diag -= l[j][k] * l[j][k];
    if (!(diag > 0.0) || !std::isfinite(diag)) return std::nullopt;
    l[j][j] = std::sqrt(diag);
    for (std::size_t i = j + 1; i < D; ++i) {
      double v = a[i][j];
      for (std::size_t k = 0; k < j; ++k) v -= l[i][k] * l[j][k];
      l[i][j] = v / l[j][j];
    }
  }
  return l;
}

template <std::size_t D>
Matrix<D> diagonal(std::span<const double, D> sds) {
  Matrix<D> m{};
  for (std::size_t k = 0; k < D; ++k) m[k][k] = sds[k];
  return m;
}

/// current + L z with z ~ N(0, I). Symmetric in current/next.
template <std::size_t D>
Point<D> propose(const Point<D>& current, const Matrix<D>& chol, Rng& rng) {
  std::normal_distribution<double> unit(0.0, 1.0);
  Point<D> z{};
  for (auto& v : z) v = unit(rng);
  Point<D> next = current;
  for (std::size_t i = 0; i < D; ++i)
    for (std::size_t k = 0; k <= i; ++k) next[i] += chol[i][k] * z[k];
  return next;
}

/// Independent Gaussian perturbation of each coordinate with its own sd.
template <std::size_t D>
Point<D> propose(const Point<D>& current, std::span<const double, D> steps, Rng& rng) {
  return propose<D>(current, diagonal<D>(steps), rng);
}

template <std::size_t D>
struct ChainState {
  Point<D> point{};
  double log_target = 0.0;
};

/// One Metropolis update with a symmetric Gaussian proposal. Returns true on accept.
template <std::size_t D, class Target>
bool mh_step(ChainState<D>& state, Target&& target, const Matrix<D>& chol, Rng& rng) {
  const Point<D> candidate = propose<D>(state.point, chol, rng);
  const double lt = target(candidate);
  // Always consume one uniform so the random stream does not depend on the branch.
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (std::isnan(lt) || lt == -std::numeric_limits<double>::infinity()) return false;
  const double delta = lt - state.log_target;
  if (delta >= 0.0 || std::log(u) < delta) {
    state.point = candidate;
    state.log_target = lt;
    return true;
  }
  return false;
}

template <std::size_t D, class Target>
bool mh_step(ChainState<D>& state, Target&& target, std::span<const double, D> steps, Rng& rng) {
  return mh_step<D>(state, target, diagonal<D>(steps), rng);
}

struct SamplerSettings {
  std::size_t burn_in = 0;
  std::size_t samples = 1;
  std::size_t thin = 1;
  bool adapt = true;
  std::size_t adapt_interval = 500;
  double target_acceptance = 0.25;
};

template <std::size_t D>
struct GenericChain {
  std::vector<Point<D>> draws;
  std::vector<double> log_targets;
  std::vector<std::size_t> iterations;  // 1-based post-burn-in iteration of each kept draw
  double acceptance_rate = 0.0;         // post-burn-in only
  Matrix<D> proposal{};                 // frozen proposal factor used for the kept draws
};

/// Proposal sd of each coordinate implied by a Cholesky factor.
template <std::size_t D>
Point<D> marginal_sds(const Matrix<D>& chol) {
  Point<D> out{};
  for (std::size_t i = 0; i < D; ++i) {
    double v = 0.0;
    for (std::size_t k = 0; k <= i; ++k) v += chol[i][k] * chol[i][k];
    out[i] = std::sqrt(v);
  }
  return out;
}

/// Runs burn-in then sampling. The chain starts from independent per-coordinate
/// steps. With adaptation on, every adapt_interval burn-in iterations the overall
/// scale moves towards the target acceptance rate, and from the second window on
/// the proposal shape is re-estimated from the covariance of the latter half of
/// the burn-in history (scaled by 2.38/sqrt(D)). The proposal is frozen for the
/// kept draws.
template <std::size_t D, class Target>
GenericChain<D> run_sampler(Target&& target, ChainState<D> start, std::span<const double, D> steps,
                            const SamplerSettings& cfg, Rng& rng) {
  GenericChain<D> out;
  out.draws.reserve(cfg.samples / cfg.thin);
  out.log_targets.reserve(cfg.samples / cfg.thin);
  out.iterations.reserve(cfg.samples / cfg.thin);

  ChainState<D> state = start;
  Matrix<D> shape = diagonal<D>(steps);
  Matrix<D> chol = shape;
  double log_scale = 0.0;
  bool have_covariance = false;
  std::size_t window_accepts = 0;
  std::vector<Point<D>> history;
  if (cfg.adapt) history.reserve(cfg.burn_in);

  for (std::size_t it = 1; it <= cfg.burn_in; ++it) {
    window_accepts += mh_step<D>(state, target, chol, rng) ? 1 : 0;
    if (!cfg.adapt) continue;
    history.push_back(state.point);
    if (it % cfg.adapt_interval != 0) continue;

    const double rate = static_cast<double>(window_accepts) / static_cast<double>(cfg.adapt_interval);
    window_accepts = 0;
    log_scale += 2.0 * (rate - cfg.target_acceptance);

    if (it >= 2 * cfg.adapt_interval && rate > 0.0) {
      const std::size_t from = history.size() / 2;
      const double n = static_cast<double>(history.size() - from);
      Point<D> mean{};
      for (std::size_t t = from; t < history.size(); ++t)
        for (std::size_t i = 0; i < D; ++i) mean[i] += history[t][i] / n;
      Matrix<D> cov{};
      for (std::size_t t = from; t < history.size(); ++t)
        for (std::size_t i = 0; i < D; ++i)
          for (std::size_t j = 0; j <= i; ++j) cov[i][j] += (history[t][i] - mean[i]) * (history[t][j] - mean[j]);
      const double optimal2 = 2.38 * 2.38 / static_cast<double>(D);
      for (std::size_t i = 0; i < D; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
          cov[i][j] *= optimal2 / (n - 1.0);
          cov[j][i] = cov[i][j];
        }
        cov[i][i] += 1e-12;
      }
      if (auto l = cholesky<D>(cov)) {
        shape = *l;
        if (!have_covariance) log_scale = 0.0;
        have_covariance = true;
      }
    }
    const double scale = std::exp(log_scale);
    for (std::size_t i = 0; i < D; ++i)
      for (std::size_t j = 0; j < D; ++j) chol[i][j] = shape[i][j] * scale;
  }

  std::size_t accepts = 0;
  for (std::size_t it = 1; it <= cfg.samples; ++it) {
    accepts += mh_step<D>(state, target, chol, rng) ? 1 : 0;
    if (it % cfg.thin == 0) {
      out.draws.push_back(state.point);
      out.log_targets.push_back(state.log_target);
      out.iterations.push_back(it);
    }
  }
  out.acceptance_rate = cfg.samples ? static_cast<double>(accepts) / static_cast<double>(cfg.samples) : 0.0;
  out.proposal = chol;
  return out;
}

// ---------------------------------------------------------------------------
// SIR posterior sampling.

/// (log beta, log gamma, log r, logit i0)
using WorkingPoint = Point<kNumParams>;

WorkingPoint to_working(const SirParams& p);
SirParams from_working(const WorkingPoint& w);

/// log|d(beta, 1/gamma, r, i0) / d(working)|. The infectious-period prior is a
/// density over 1/gamma, so the gamma coordinate contributes log(1/gamma).
double log_jacobian(const WorkingPoint& w);

struct Draw {
  SirParams params;
  double log_posterior = 0.0;
  std::size_t iteration = 0;
};

struct PosteriorSamples {
  std::vector<Draw> draws;
  McmcConfig config;
  double acceptance_rate = 0.0;
  std::array<double, kNumParams> final_steps{};
};

/// Start point: infectious period from the prior, beta = 2*gamma, r from the data
/// peak assuming 1% daily incidence, i0 = 1e-3. Retried up to 100 times.
WorkingPoint initial_point(const ObservationWindow& window, const ModelSpec& model, Rng& rng);

PosteriorSamples run_chain(const ObservationWindow& window, const ModelSpec& model, const McmcConfig& config);

/// Independent chains with seeds derive_seed(config.seed, k), run concurrently.
std::vector<PosteriorSamples> run_chains(const ObservationWindow& window, const ModelSpec& model,
                                         const McmcConfig& config, std::size_t n_chains);

/// Concatenates chains in order.
PosteriorSamples merge_chains(std::span<const PosteriorSamples> chains);

/// Splits a concatenated draw list wherever the iteration counter does not increase.
std::vector<PosteriorSamples> split_chains(const PosteriorSamples& merged);

/// Highest recorded log-posterior; the earliest draw wins ties.
SirParams map_estimate(const PosteriorSamples& samples);

// ---------------------------------------------------------------------------
// Convergence diagnostics.

/// Geyer initial-monotone-sequence ESS. A constant chain returns 1.
double effective_sample_size(std::span<const double> chain);

/// Split-Rhat over >= 2 chains (each chain halved).
double split_rhat(std::span<const std::vector<double>> chains);

struct ParamDiagnostics {
  double ess = 0.0;
  std::optional<double> rhat;
  bool degenerate = false;  // zero variance in every chain
};

struct Diagnostics {
  double acceptance_rate = 0.0;
  std::size_t n_chains = 0;
  std::size_t n_draws = 0;
  std::array<ParamDiagnostics, kNumParams> params;  // beta, gamma, r, i0
};

/// Throws InputError if any chain has fewer than 10 draws.
Diagnostics diagnostics(std::span<const PosteriorSamples> chains);

}  // namespace contagion
