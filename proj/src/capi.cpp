#include "contagion/contagion.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "contagion/errors.hpp"
#include "contagion/io.hpp"
#include "contagion/log.hpp"
#include "contagion/mcmc.hpp"
#include "contagion/observation_model.hpp"
#include "contagion/outbreak_analysis.hpp"
#include "contagion/pipeline.hpp"
#include "contagion/sir_dynamics.hpp"
#include "contagion/trends_ingest.hpp"

namespace ctg = contagion;

struct ctg_series_struct {
  static constexpr std::uint32_t kMagic = 0x53455249;
  std::uint32_t magic = kMagic;
  ctg::InterestSeries series;
  ctg::ObservationWindow window;
  bool has_window = false;
};

struct ctg_trajectory_struct {
  static constexpr std::uint32_t kMagic = 0x54524a43;
  std::uint32_t magic = kMagic;
  ctg::Trajectory traj;
};

struct ctg_posterior_struct {
  static constexpr std::uint32_t kMagic = 0x504f5354;
  std::uint32_t magic = kMagic;
  ctg::PosteriorSamples samples;
};

namespace {

thread_local std::string g_last_error;

class NullPointer : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutOfRange : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class T>
T& get(T* handle, const char* name) {
  if (!handle) throw NullPointer(std::string("null ") + name + " handle");
  if (handle->magic != T::kMagic) throw ctg::InputError(std::string("invalid ") + name + " handle");
  return *handle;
}

void require(const void* p, const char* name) {
  if (!p) throw NullPointer(std::string("null argument: ") + name);
}

// Runs fn, translating exceptions into status codes and the thread-local message.
template <class Fn>
int guard(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return CTG_OK;
  } catch (const NullPointer& e) {
    g_last_error = e.what();
    return CTG_ERROR_NULL_POINTER;
  } catch (const OutOfRange& e) {
    g_last_error = e.what();
    return CTG_ERROR_OUT_OF_RANGE;
  } catch (const ctg::InputError& e) {
    g_last_error = e.what();
    return CTG_ERROR_INPUT;
  } catch (const ctg::NumericalError& e) {
    g_last_error = e.what();
    return CTG_ERROR_NUMERICAL;
  } catch (const ctg::IoError& e) {
    g_last_error = e.what();
    return CTG_ERROR_IO;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return CTG_ERROR_UNKNOWN;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CTG_ERROR_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown exception";
    return CTG_ERROR_UNKNOWN;
  }
}

int write_str(char* out, size_t* len, const std::string& s) {
  if (!len) {
    g_last_error = "null length pointer";
    return CTG_ERROR_NULL_POINTER;
  }
  const size_t needed = s.size() + 1;
  const size_t avail = *len;
  *len = needed;
  if (!out || avail < needed) {
    g_last_error = "buffer too small";
    return CTG_ERROR_INSUFFICIENT_BUFFER;
  }
  std::memcpy(out, s.c_str(), needed);
  return CTG_OK;
}

int write_doubles(double* out, size_t* n, const std::vector<double>& v) {
  if (!n) {
    g_last_error = "null length pointer";
    return CTG_ERROR_NULL_POINTER;
  }
  const size_t avail = *n;
  *n = v.size();
  if ((!out && !v.empty()) || avail < v.size()) {
    g_last_error = "buffer too small";
    return CTG_ERROR_INSUFFICIENT_BUFFER;
  }
  if (!v.empty()) std::memcpy(out, v.data(), v.size() * sizeof(double));
  return CTG_OK;
}

char* dup_string(const std::string& s) {
  auto* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

ctg::SirParams from_c(const ctg_params& p) { return {p.beta, p.gamma, p.r, p.i0}; }
ctg_params to_c(const ctg::SirParams& p) { return {p.beta, p.gamma, p.r, p.i0}; }
ctg_interval to_c(const ctg::Interval& iv) { return {iv.median, iv.lower95, iv.upper95}; }

ctg::IntegratorOptions from_c(const ctg_integrator* o) {
  ctg::IntegratorOptions out;
  if (o) {
    out.rtol = o->rtol;
    out.atol = o->atol;
  }
  if (!(out.rtol > 0.0) || !(out.atol > 0.0)) throw ctg::InputError("integrator tolerances must be positive");
  return out;
}

ctg::McmcConfig from_c(const ctg_mcmc_config& c) {
  ctg::McmcConfig out;
  out.burn_in = c.burn_in;
  out.samples = c.samples;
  out.thin = c.thin;
  out.seed = c.seed;
  for (std::size_t k = 0; k < 4; ++k) out.step_sizes[k] = c.step_sizes[k];
  out.adapt = c.adapt != 0;
  out.adapt_interval = c.adapt_interval;
  out.target_acceptance = c.target_acceptance;
  return out;
}

const ctg::ObservationWindow& window_of(ctg_series_struct& s) {
  if (!s.has_window) throw ctg::InputError("series '" + s.series.label + "' has no positive values");
  return s.window;
}

ctg_series_struct* make_series(ctg::InterestSeries series) {
  auto h = std::make_unique<ctg_series_struct>();
  h->series = ctg::fill_gaps(series);
  try {
    h->window = ctg::to_observation_window(h->series);
    h->has_window = true;
  } catch (const ctg::InputError&) {
    h->has_window = false;
  }
  return h.release();
}

}  // namespace

extern "C" {

const char* ctg_version(void) { return "0.1.0"; }

const char* ctg_status_string(int status) {
  switch (status) {
    case CTG_OK: return "ok";
    case CTG_ERROR_INPUT: return "invalid input";
    case CTG_ERROR_NUMERICAL: return "numerical failure";
    case CTG_ERROR_IO: return "i/o error";
    case CTG_ERROR_NULL_POINTER: return "null pointer";
    case CTG_ERROR_INSUFFICIENT_BUFFER: return "insufficient buffer space";
    case CTG_ERROR_OUT_OF_RANGE: return "index out of range";
    default: return "unknown error";
  }
}

const char* ctg_last_error(void) { return g_last_error.c_str(); }

void ctg_set_warnings(int enabled) { ctg::set_warnings_enabled(enabled != 0); }

void ctg_string_free(char* str) { std::free(str); }

void ctg_integrator_default(ctg_integrator* opts) {
  if (!opts) return;
  const ctg::IntegratorOptions d;
  opts->rtol = d.rtol;
  opts->atol = d.atol;
}

int ctg_series_load(ctg_series_t* series, const char* path) {
  return guard([&] {
    require(series, "series");
    require(path, "path");
    *series = nullptr;
    *series = make_series(ctg::parse_csv_file(path));
  });
}

int ctg_series_parse(ctg_series_t* series, const char* csv, size_t csv_len, const char* label) {
  return guard([&] {
    require(series, "series");
    require(csv, "csv");
    *series = nullptr;
    std::istringstream in(std::string(csv, csv_len));
    *series = make_series(ctg::parse_csv(in, label ? label : ""));
  });
}

int ctg_series_destroy(ctg_series_t series) {
  if (series) series->magic = 0;
  delete series;
  return CTG_OK;
}

int ctg_series_length(ctg_series_t series, size_t* n) {
  return guard([&] {
    require(n, "n");
    *n = get(series, "series").series.size();
  });
}

int ctg_series_window(ctg_series_t series, double* values, size_t* n) {
  int rc = CTG_OK;
  const int g = guard([&] { rc = write_doubles(values, n, window_of(get(series, "series")).observations); });
  return g != CTG_OK ? g : rc;
}

int ctg_series_start_date(ctg_series_t series, char* out, size_t* len) {
  int rc = CTG_OK;
  const int g = guard([&] { rc = write_str(out, len, ctg::format_date(window_of(get(series, "series")).start_date)); });
  return g != CTG_OK ? g : rc;
}

int ctg_simulate(ctg_trajectory_t* traj, const ctg_params* params, int horizon, const ctg_integrator* opts) {
  return guard([&] {
    require(traj, "traj");
    require(params, "params");
    *traj = nullptr;
    const auto p = from_c(*params);
    if (!(p.beta >= 0.0 && p.gamma > 0.0 && p.i0 > 0.0 && p.i0 < 1.0))
      throw ctg::InputError("simulate needs beta >= 0, gamma > 0 and 0 < i0 < 1");
    auto h = std::make_unique<ctg_trajectory_struct>();
    h->traj = ctg::integrate(p, horizon, from_c(opts));
    *traj = h.release();
  });
}

int ctg_trajectory_destroy(ctg_trajectory_t traj) {
  if (traj) traj->magic = 0;
  delete traj;
  return CTG_OK;
}

int ctg_trajectory_horizon(ctg_trajectory_t traj, int* horizon) {
  return guard([&] {
    require(horizon, "horizon");
    *horizon = static_cast<int>(get(traj, "trajectory").traj.horizon());
  });
}

int ctg_trajectory_state(ctg_trajectory_t traj, int day, double* s, double* i, double* rec, double* c) {
  return guard([&] {
    const auto& t = get(traj, "trajectory").traj;
    if (day < 0 || static_cast<std::size_t>(day) >= t.states.size()) throw OutOfRange("day outside trajectory");
    const auto& st = t.states[static_cast<std::size_t>(day)];
    if (s) *s = st.s;
    if (i) *i = st.i;
    if (rec) *rec = st.rec;
    if (c) *c = st.c;
  });
}

int ctg_trajectory_incidence(ctg_trajectory_t traj, double* out, size_t* n) {
  int rc = CTG_OK;
  const int g = guard([&] { rc = write_doubles(out, n, get(traj, "trajectory").traj.incidence); });
  return g != CTG_OK ? g : rc;
}

int ctg_trajectory_write_csv(ctg_trajectory_t traj, const char* path) {
  return guard([&] {
    require(path, "path");
    std::ostringstream o;
    ctg::write_trajectory_csv(o, get(traj, "trajectory").traj);
    ctg::write_text_file(path, o.str());
  });
}

int ctg_final_size(double r0, double s0, double* z) {
  return guard([&] {
    require(z, "z");
    *z = ctg::final_size_oracle(r0, s0);
  });
}

int ctg_extinction_probability(double r0, double* p) {
  return guard([&] {
    require(p, "p");
    *p = ctg::extinction_probability(r0);
  });
}

int ctg_r_squared(const double* observed, const double* predicted, size_t n, double* r2) {
  return guard([&] {
    require(observed, "observed");
    require(predicted, "predicted");
    require(r2, "r2");
    *r2 = ctg::r_squared({observed, n}, {predicted, n});
  });
}

int ctg_log_posterior(ctg_series_t series, const ctg_params* params, double prior_mean, double prior_var,
                      double* value) {
  return guard([&] {
    require(params, "params");
    require(value, "value");
    const auto prior = ctg::GammaPrior::from_mean_variance(prior_mean, prior_var);
    *value = ctg::log_posterior(window_of(get(series, "series")), from_c(*params), prior);
  });
}

void ctg_mcmc_config_default(ctg_mcmc_config* cfg) {
  if (!cfg) return;
  const ctg::McmcConfig d;
  cfg->burn_in = d.burn_in;
  cfg->samples = d.samples;
  cfg->thin = d.thin;
  cfg->seed = d.seed;
  for (std::size_t k = 0; k < 4; ++k) cfg->step_sizes[k] = d.step_sizes[k];
  cfg->adapt = d.adapt ? 1 : 0;
  cfg->adapt_interval = d.adapt_interval;
  cfg->target_acceptance = d.target_acceptance;
}

int ctg_fit(ctg_posterior_t* posterior, ctg_series_t series, double prior_mean, double prior_var,
            const ctg_mcmc_config* cfg, size_t n_chains) {
  return guard([&] {
    require(posterior, "posterior");
    require(cfg, "cfg");
    *posterior = nullptr;
    ctg::ModelSpec model;
    model.prior = ctg::GammaPrior::from_mean_variance(prior_mean, prior_var);
    const auto chains = ctg::run_chains(window_of(get(series, "series")), model, from_c(*cfg), n_chains);
    auto h = std::make_unique<ctg_posterior_struct>();
    h->samples = ctg::merge_chains(chains);
    *posterior = h.release();
  });
}

int ctg_posterior_load(ctg_posterior_t* posterior, const char* path) {
  return guard([&] {
    require(posterior, "posterior");
    require(path, "path");
    *posterior = nullptr;
    auto h = std::make_unique<ctg_posterior_struct>();
    h->samples = ctg::read_posterior_csv_file(path);
    *posterior = h.release();
  });
}

int ctg_posterior_save(ctg_posterior_t posterior, const char* path) {
  return guard([&] {
    require(path, "path");
    std::ostringstream o;
    ctg::write_posterior_csv(o, get(posterior, "posterior").samples);
    ctg::write_text_file(path, o.str());
  });
}

int ctg_posterior_destroy(ctg_posterior_t posterior) {
  if (posterior) posterior->magic = 0;
  delete posterior;
  return CTG_OK;
}

int ctg_posterior_size(ctg_posterior_t posterior, size_t* n) {
  return guard([&] {
    require(n, "n");
    *n = get(posterior, "posterior").samples.draws.size();
  });
}

int ctg_posterior_draw(ctg_posterior_t posterior, size_t index, ctg_params* params, double* log_posterior) {
  return guard([&] {
    const auto& draws = get(posterior, "posterior").samples.draws;
    if (index >= draws.size()) throw OutOfRange("draw index out of range");
    if (params) *params = to_c(draws[index].params);
    if (log_posterior) *log_posterior = draws[index].log_posterior;
  });
}

int ctg_posterior_acceptance_rate(ctg_posterior_t posterior, double* rate) {
  return guard([&] {
    require(rate, "rate");
    *rate = get(posterior, "posterior").samples.acceptance_rate;
  });
}

int ctg_posterior_map(ctg_posterior_t posterior, ctg_params* params) {
  return guard([&] {
    require(params, "params");
    *params = to_c(ctg::map_estimate(get(posterior, "posterior").samples));
  });
}

int ctg_posterior_summary(ctg_posterior_t posterior, ctg_summary* summary) {
  return guard([&] {
    require(summary, "summary");
    const auto s = ctg::summarize(get(posterior, "posterior").samples);
    summary->r0 = to_c(s.r0);
    summary->generation_time = to_c(s.generation_time);
    summary->r = to_c(s.r);
    summary->i0 = to_c(s.i0);
    summary->beta = to_c(s.beta);
    summary->gamma = to_c(s.gamma);
    summary->n_draws = s.n_draws;
  });
}

int ctg_posterior_peak_timing(ctg_posterior_t posterior, size_t n_draws, double i0, uint64_t seed, int horizon,
                    ctg_peak_timing* out) {
  return guard([&] {
    require(out, "out");
    const auto p = ctg::peak_timing(get(posterior, "posterior").samples, n_draws, i0, seed, horizon);
    out->mean_days = p.mean;
    out->sd_days = p.sd;
    out->n_draws = p.peak_days.size();
    out->flagged = p.flagged;
  });
}

int ctg_validate(const ctg_params* params, ctg_series_t in_sample, ctg_series_t out_sample, double* r2_in,
                 double* r2_out) {
  return guard([&] {
    require(params, "params");
    require(r2_in, "r2_in");
    const auto& a = window_of(get(in_sample, "series"));
    const ctg::ObservationWindow* b = out_sample ? &window_of(get(out_sample, "series")) : nullptr;
    if (b) require(r2_out, "r2_out");
    const auto p = from_c(*params);
    if (!p.valid()) throw ctg::InputError("invalid parameters");
    const auto rep = ctg::validate(p, a, b);
    *r2_in = rep.r2_in_sample;
    if (b) *r2_out = *rep.r2_out_sample;
  });
}

void ctg_fit_options_default(ctg_fit_options* opts) {
  if (!opts) return;
  const ctg::FitOptions d;
  opts->input = nullptr;
  opts->out_sample = nullptr;
  opts->out_dir = ".";
  opts->prior_mean = d.prior_mean;
  opts->prior_var = d.prior_var;
  ctg_mcmc_config_default(&opts->mcmc);
  opts->chains = d.chains;
  opts->ensemble = d.ensemble;
  opts->peak_i0 = d.peak_i0;
  opts->peak_horizon = d.peak_horizon;
  ctg_integrator_default(&opts->integrator);
  opts->emit_svg = 0;
}

int ctg_run_fit(const ctg_fit_options* opts) {
  return guard([&] {
    require(opts, "opts");
    require(opts->input, "input");
    ctg::FitOptions o;
    o.input = opts->input;
    if (opts->out_sample) o.out_sample = opts->out_sample;
    o.out_dir = opts->out_dir ? opts->out_dir : ".";
    o.prior_mean = opts->prior_mean;
    o.prior_var = opts->prior_var;
    o.mcmc = from_c(opts->mcmc);
    o.chains = opts->chains;
    o.ensemble = opts->ensemble;
    o.peak_i0 = opts->peak_i0;
    o.peak_horizon = opts->peak_horizon;
    o.integrator = from_c(&opts->integrator);
    o.emit_svg = opts->emit_svg != 0;
    ctg::run_fit(o);
  });
}

void ctg_simulate_options_default(ctg_simulate_options* opts) {
  if (!opts) return;
  const ctg::SimulateOptions d;
  opts->params = nullptr;
  opts->posterior = nullptr;
  opts->horizon = d.horizon;
  opts->i0 = d.i0;
  opts->ensemble = d.ensemble;
  opts->seed = d.seed;
  opts->out_dir = ".";
  ctg_integrator_default(&opts->integrator);
}

int ctg_run_simulate(const ctg_simulate_options* opts, char** json) {
  return guard([&] {
    require(opts, "opts");
    if (json) *json = nullptr;
    ctg::SimulateOptions o;
    if (opts->params) o.params = from_c(*opts->params);
    if (opts->posterior) o.posterior = opts->posterior;
    o.horizon = opts->horizon;
    o.i0 = opts->i0;
    o.ensemble = opts->ensemble;
    o.seed = opts->seed;
    o.out_dir = opts->out_dir ? opts->out_dir : ".";
    o.integrator = from_c(&opts->integrator);
    const auto text = ctg::run_simulate(o);
    if (json) *json = dup_string(text);
  });
}

void ctg_validate_options_default(ctg_validate_options* opts) {
  if (!opts) return;
  opts->posterior = nullptr;
  opts->input = nullptr;
  opts->out_sample = nullptr;
  opts->out_dir = nullptr;
  ctg_integrator_default(&opts->integrator);
}

int ctg_run_validate(const ctg_validate_options* opts, char** json) {
  return guard([&] {
    require(opts, "opts");
    require(opts->posterior, "posterior");
    require(opts->input, "input");
    if (json) *json = nullptr;
    ctg::ValidateOptions o;
    o.posterior = opts->posterior;
    o.input = opts->input;
    if (opts->out_sample) o.out_sample = opts->out_sample;
    if (opts->out_dir) o.out_dir = opts->out_dir;
    o.integrator = from_c(&opts->integrator);
    const auto text = ctg::run_validate(o);
    if (json) *json = dup_string(text);
  });
}

void ctg_report_options_default(ctg_report_options* opts) {
  if (!opts) return;
  opts->run_dir = ".";
  opts->emit_svg = 0;
  opts->bins = 40;
}

int ctg_run_report(const ctg_report_options* opts, char** text) {
  return guard([&] {
    require(opts, "opts");
    if (text) *text = nullptr;
    if (opts->bins < 1) throw ctg::InputError("histogram bins must be at least 1");
    const auto out = ctg::run_report({opts->run_dir ? opts->run_dir : ".", opts->emit_svg != 0, opts->bins});
    if (text) *text = dup_string(out);
  });
}

}  // extern "C"
