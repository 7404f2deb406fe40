// contagion: fit SIR models to daily interest series from the command line.
//
//   contagion fit --input series.csv --seed 42 --out-dir run/
//   contagion simulate --beta 2 --gamma 1 --horizon 40
//   contagion validate --posterior run/posterior.csv --input a.csv --out-sample b.csv
//   contagion report --out-dir run/ --emit-svg
//
// Every subcommand also accepts --config FILE, a flat key=value file whose keys
// are the long flag names; flags given on the command line win.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "contagion/contagion.h"

namespace {

int exit_code(int status) {
  if (status == CTG_OK) return 0;
  return status == CTG_ERROR_NUMERICAL ? 2 : 1;
}

int fail(int status) {
  std::fprintf(stderr, "contagion: error: %s\n", ctg_last_error());
  return exit_code(status);
}

void print_owned(char* text) {
  if (!text) return;
  std::fputs(text, stdout);
  const std::size_t n = std::char_traits<char>::length(text);
  if (n == 0 || text[n - 1] != '\n') std::fputc('\n', stdout);
  ctg_string_free(text);
}

const char* c_str_or_null(const std::optional<std::string>& s) { return s ? s->c_str() : nullptr; }

struct FitArgs {
  std::string input;
  std::optional<std::string> out_sample;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  std::size_t chains = 2;
  std::uint64_t burn_in = 10000;
  std::uint64_t samples = 40000;
  std::uint64_t thin = 1;
  std::size_t ensemble = 1000;
  double prior_mean = 1.0;
  double prior_var = 0.1;
  double i0 = 1e-3;
  int horizon = 100;
  std::vector<double> step_sizes;
  bool no_adapt = false;
  double rtol = 1e-6;
  double atol = 1e-8;
  bool emit_svg = false;
};

struct SimulateArgs {
  std::optional<double> beta, gamma;
  double r = 1.0;
  std::optional<std::string> posterior;
  int horizon = 100;
  double i0 = 1e-3;
  std::size_t ensemble = 1000;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  double rtol = 1e-6;
  double atol = 1e-8;
};

struct ValidateArgs {
  std::string posterior;
  std::string input;
  std::optional<std::string> out_sample;
  std::optional<std::string> out_dir;
  double rtol = 1e-6;
  double atol = 1e-8;
};

struct ReportArgs {
  std::string out_dir = ".";
  bool emit_svg = false;
  std::size_t bins = 40;
};

void add_integrator_flags(CLI::App* cmd, double& rtol, double& atol) {
  cmd->add_option("--rtol", rtol, "ODE relative tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--atol", atol, "ODE absolute tolerance")->check(CLI::PositiveNumber)->capture_default_str();
}

int run_fit(const FitArgs& a) {
  ctg_fit_options o;
  ctg_fit_options_default(&o);
  o.input = a.input.c_str();
  o.out_sample = c_str_or_null(a.out_sample);
  o.out_dir = a.out_dir.c_str();
  o.prior_mean = a.prior_mean;
  o.prior_var = a.prior_var;
  o.mcmc.burn_in = a.burn_in;
  o.mcmc.samples = a.samples;
  o.mcmc.thin = a.thin;
  o.mcmc.seed = a.seed;
  if (!a.step_sizes.empty())
    for (std::size_t k = 0; k < 4; ++k) o.mcmc.step_sizes[k] = a.step_sizes[k];
  o.mcmc.adapt = a.no_adapt ? 0 : 1;
  o.chains = a.chains;
  o.ensemble = a.ensemble;
  o.peak_i0 = a.i0;
  o.peak_horizon = a.horizon;
  o.integrator = {a.rtol, a.atol};
  o.emit_svg = a.emit_svg ? 1 : 0;
  const int rc = ctg_run_fit(&o);
  if (rc != CTG_OK) return fail(rc);

  ctg_report_options r;
  ctg_report_options_default(&r);
  r.run_dir = o.out_dir;
  r.emit_svg = o.emit_svg;
  char* text = nullptr;
  const int rc2 = ctg_run_report(&r, &text);
  if (rc2 != CTG_OK) return fail(rc2);
  print_owned(text);
  return 0;
}

int run_simulate(const SimulateArgs& a) {
  ctg_simulate_options o;
  ctg_simulate_options_default(&o);
  ctg_params p{};
  if (a.beta || a.gamma) {
    if (!a.beta || !a.gamma) {
      std::fprintf(stderr, "contagion: error: simulate needs both --beta and --gamma\n");
      return 1;
    }
    p = {*a.beta, *a.gamma, a.r, a.i0};
    o.params = &p;
  }
  o.posterior = c_str_or_null(a.posterior);
  o.horizon = a.horizon;
  o.i0 = a.i0;
  o.ensemble = a.ensemble;
  o.seed = a.seed;
  o.out_dir = a.out_dir.c_str();
  o.integrator = {a.rtol, a.atol};
  char* json = nullptr;
  const int rc = ctg_run_simulate(&o, &json);
  if (rc != CTG_OK) return fail(rc);
  print_owned(json);
  return 0;
}

int run_validate(const ValidateArgs& a) {
  ctg_validate_options o;
  ctg_validate_options_default(&o);
  o.posterior = a.posterior.c_str();
  o.input = a.input.c_str();
  o.out_sample = c_str_or_null(a.out_sample);
  o.out_dir = c_str_or_null(a.out_dir);
  o.integrator = {a.rtol, a.atol};
  char* json = nullptr;
  const int rc = ctg_run_validate(&o, &json);
  if (rc != CTG_OK) return fail(rc);
  print_owned(json);
  return 0;
}

int run_report(const ReportArgs& a) {
  ctg_report_options o;
  ctg_report_options_default(&o);
  o.run_dir = a.out_dir.c_str();
  o.emit_svg = a.emit_svg ? 1 : 0;
  o.bins = a.bins;
  char* text = nullptr;
  const int rc = ctg_run_report(&o, &text);
  if (rc != CTG_OK) return fail(rc);
  print_owned(text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fit SIR transmission models to daily online-interest series"};
  app.set_version_flag("--version", ctg_version());
  app.require_subcommand(1);

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "Fit the model by MCMC and write posterior, envelope and report");
  fit->set_config("--config", "", "Flat key=value file of flag values");
  fit->add_option("--input", fa.input, "Daily interest CSV (date,value)")->required();
  fit->add_option("--out-sample", fa.out_sample, "Second series for out-of-sample R^2");
  fit->add_option("--out-dir", fa.out_dir, "Directory for artifacts")->capture_default_str();
  fit->add_option("--seed", fa.seed, "Random seed")->required();
  fit->add_option("--chains", fa.chains, "Independent chains")->check(CLI::Range(1, 256))->capture_default_str();
  fit->add_option("--burn-in", fa.burn_in, "Burn-in iterations per chain")->capture_default_str();
  fit->add_option("--samples", fa.samples, "Retained iterations per chain")->check(CLI::PositiveNumber)->capture_default_str();
  fit->add_option("--thin", fa.thin, "Keep every n-th iteration")->check(CLI::PositiveNumber)->capture_default_str();
  fit->add_option("--ensemble", fa.ensemble, "Posterior draws for envelopes and peak timing")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  fit->add_option("--prior-mean", fa.prior_mean, "Prior mean of the generation time (days)")->capture_default_str();
  fit->add_option("--prior-var", fa.prior_var, "Prior variance of the generation time")->capture_default_str();
  fit->add_option("--i0", fa.i0, "Initial infectious proportion for peak timing")->capture_default_str();
  fit->add_option("--horizon", fa.horizon, "Days simulated for peak timing")->capture_default_str();
  fit->add_option("--step-sizes", fa.step_sizes, "Initial proposal sds: log beta, log gamma, log r, logit i0")
      ->expected(4);
  fit->add_flag("--no-adapt", fa.no_adapt, "Keep the proposal fixed during burn-in");
  add_integrator_flags(fit, fa.rtol, fa.atol);
  fit->add_flag("--emit-svg", fa.emit_svg, "Also write SVG plots");

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Deterministic trajectory or posterior ensemble");
  sim->set_config("--config", "", "Flat key=value file of flag values");
  auto* beta = sim->add_option("--beta", sa.beta, "Transmission rate per day");
  auto* gamma = sim->add_option("--gamma", sa.gamma, "Recovery rate per day");
  sim->add_option("--r", sa.r, "Reporting factor")->capture_default_str();
  auto* post = sim->add_option("--posterior", sa.posterior, "Posterior CSV from fit");
  post->excludes(beta)->excludes(gamma);
  sim->add_option("--horizon", sa.horizon, "Days to simulate")->capture_default_str();
  sim->add_option("--i0", sa.i0, "Initial infectious proportion")->capture_default_str();
  sim->add_option("--ensemble", sa.ensemble, "Posterior draws")->capture_default_str();
  sim->add_option("--seed", sa.seed, "Random seed")->capture_default_str();
  sim->add_option("--out-dir", sa.out_dir, "Directory for artifacts")->capture_default_str();
  add_integrator_flags(sim, sa.rtol, sa.atol);

  ValidateArgs va;
  auto* val = app.add_subcommand("validate", "R^2 of the MAP model against observed series");
  val->set_config("--config", "", "Flat key=value file of flag values");
  val->add_option("--posterior", va.posterior, "Posterior CSV from fit")->required();
  val->add_option("--input", va.input, "In-sample series")->required();
  val->add_option("--out-sample", va.out_sample, "Out-of-sample series");
  val->add_option("--out-dir", va.out_dir, "Write validation.json here");
  add_integrator_flags(val, va.rtol, va.atol);

  ReportArgs ra;
  auto* rep = app.add_subcommand("report", "Summarize a fit run directory");
  rep->set_config("--config", "", "Flat key=value file of flag values");
  rep->add_option("--out-dir", ra.out_dir, "Run directory written by fit")->capture_default_str();
  rep->add_flag("--emit-svg", ra.emit_svg, "Also write SVG plots");
  rep->add_option("--bins", ra.bins, "Histogram bins")->check(CLI::PositiveNumber)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (fit->parsed()) return run_fit(fa);
  if (sim->parsed()) return run_simulate(sa);
  if (val->parsed()) return run_validate(va);
  return run_report(ra);
}
