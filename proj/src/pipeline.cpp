#include "contagion/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "contagion/errors.hpp"
#include "contagion/io.hpp"
#include "contagion/svg.hpp"
#include "parallel.hpp"

namespace contagion {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

// Stream ids for derive_seed; chains use 0..chains-1.
constexpr std::uint64_t kEnsembleStream = 1000;
constexpr std::uint64_t kPeakStream = 2000;

std::string join(const fs::path& dir, const char* name) { return (dir / name).string(); }

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
}

Json interval_json(const Interval& iv) { return {{"median", iv.median}, {"lower95", iv.lower95}, {"upper95", iv.upper95}}; }

Interval interval_from(const Json& j) {
  return {j.at("median").get<double>(), j.at("lower95").get<double>(), j.at("upper95").get<double>()};
}

Json params_json(const SirParams& p) {
  return {{"beta", p.beta}, {"gamma", p.gamma}, {"r", p.r}, {"i0", p.i0}, {"r0", p.r0()},
          {"generation_time", p.generation_time()}};
}

Json integrator_json(const IntegratorOptions& o) { return {{"rtol", o.rtol}, {"atol", o.atol}}; }

Json summary_json(const ParamSummary& s) {
  return {{"n_draws", s.n_draws},
          {"r0", interval_json(s.r0)},
          {"generation_time", interval_json(s.generation_time)},
          {"r", interval_json(s.r)},
          {"i0", interval_json(s.i0)},
          {"beta", interval_json(s.beta)},
          {"gamma", interval_json(s.gamma)}};
}

Json peak_json(const PeakTiming& p) {
  return {{"mean_days", p.mean}, {"sd_days", p.sd}, {"n_draws", p.peak_days.size()},
          {"i0", p.i0},          {"horizon", p.horizon}, {"flagged", p.flagged}};
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace

ObservationWindow load_window(const std::string& path) { return to_observation_window(fill_gaps(parse_csv_file(path))); }

FitResult run_fit(const FitOptions& opts) {
  opts.mcmc.validate();
  if (opts.chains < 1) throw InputError("--chains must be at least 1");
  if (opts.ensemble < 1) throw InputError("--ensemble must be at least 1");
  const auto series = fill_gaps(parse_csv_file(opts.input));
  const auto window = to_observation_window(series);
  std::optional<ObservationWindow> window_b;
  if (opts.out_sample) window_b = load_window(*opts.out_sample);

  ModelSpec model;
  model.prior = GammaPrior::from_mean_variance(opts.prior_mean, opts.prior_var);
  model.integrator = opts.integrator;

  const auto chains = run_chains(window, model, opts.mcmc, opts.chains);
  const auto merged = merge_chains(chains);

  FitResult res;
  res.summary = summarize(merged);
  res.map = map_estimate(merged);
  res.diagnostics = diagnostics(chains);
  const auto ensemble = simulate_ensemble(merged, window, opts.ensemble, derive_seed(opts.mcmc.seed, kEnsembleStream),
                                          opts.integrator);
  res.validation = validate(res.map, window, window_b ? &*window_b : nullptr, opts.integrator);
  res.validation.label_in = opts.input;
  if (opts.out_sample) res.validation.label_out = *opts.out_sample;
  res.peak = peak_timing(merged, opts.ensemble, opts.peak_i0, derive_seed(opts.mcmc.seed, kPeakStream),
                         opts.peak_horizon, opts.integrator);

  Json report;
  report["tool"] = "contagion";
  report["version"] = kVersion;
  Json cfg;
  cfg["command"] = "fit";
  cfg["input"] = opts.input;
  cfg["out_sample"] = opts.out_sample ? Json(*opts.out_sample) : Json(nullptr);
  cfg["seed"] = opts.mcmc.seed;
  cfg["chains"] = opts.chains;
  cfg["burn_in"] = opts.mcmc.burn_in;
  cfg["samples"] = opts.mcmc.samples;
  cfg["thin"] = opts.mcmc.thin;
  cfg["initial_step_sizes"] = opts.mcmc.step_sizes;
  cfg["adapt"] = opts.mcmc.adapt;
  cfg["adapt_interval"] = opts.mcmc.adapt_interval;
  cfg["target_acceptance"] = opts.mcmc.target_acceptance;
  cfg["prior"] = {{"mean", opts.prior_mean}, {"variance", opts.prior_var}, {"shape", model.prior.shape},
                  {"rate", model.prior.rate}};
  cfg["bounds"] = {{"beta_max", model.bounds.beta_max}, {"r_max", model.bounds.r_max}, {"i0_max", model.bounds.i0_max}};
  cfg["ensemble"] = opts.ensemble;
  cfg["peak_i0"] = opts.peak_i0;
  cfg["peak_horizon"] = opts.peak_horizon;
  cfg["integrator"] = integrator_json(opts.integrator);
  report["config"] = cfg;
  report["data"] = {{"label", series.label},
                    {"start_date", format_date(window.start_date)},
                    {"n_observations", window.size()}};
  report["summary"] = summary_json(res.summary);
  Json map = params_json(res.map);
  report["map"] = map;

  Json diag;
  diag["acceptance_rate"] = res.diagnostics.acceptance_rate;
  diag["n_chains"] = res.diagnostics.n_chains;
  diag["n_draws"] = res.diagnostics.n_draws;
  static constexpr const char* names[] = {"beta", "gamma", "r", "i0"};
  for (std::size_t k = 0; k < kNumParams; ++k) {
    const auto& pd = res.diagnostics.params[k];
    diag["params"][names[k]] = {{"ess", pd.ess},
                                {"rhat", pd.rhat ? Json(*pd.rhat) : Json(nullptr)},
                                {"degenerate", pd.degenerate}};
  }
  report["diagnostics"] = diag;
  report["validation"] = {{"r2_in_sample", res.validation.r2_in_sample},
                          {"r2_out_sample", res.validation.r2_out_sample ? Json(*res.validation.r2_out_sample)
                                                                         : Json(nullptr)}};
  const auto& crossing = ensemble.effective_r.first_day_below_one;
  report["effective_r"] = {
      {"first_day_below_one", crossing ? Json(*crossing) : Json(nullptr)},
      {"first_date_below_one",
       crossing ? Json(format_date(window.start_date + std::chrono::days{*crossing - 1})) : Json(nullptr)}};
  report["peak_timing"] = peak_json(res.peak);
  report["extinction_probability"] = {{"at_median_r0", extinction_probability(res.summary.r0.median)},
                                      {"at_lower95_r0", extinction_probability(res.summary.r0.lower95)},
                                      {"at_upper95_r0", extinction_probability(res.summary.r0.upper95)}};

  std::ostringstream posterior_csv, envelope_csv;
  write_posterior_csv(posterior_csv, merged);
  write_envelope_csv(envelope_csv, envelope_rows(window, ensemble));

  ensure_dir(opts.out_dir);
  write_text_file(join(opts.out_dir, kPosteriorFile), posterior_csv.str());
  write_text_file(join(opts.out_dir, kEnvelopeFile), envelope_csv.str());
  write_text_file(join(opts.out_dir, kFitReportFile), dump(report));
  if (opts.emit_svg) run_report({opts.out_dir, true, 40});
  return res;
}

std::string run_simulate(const SimulateOptions& opts) {
  if (opts.horizon < 1) throw InputError("--horizon must be at least 1");
  if (!(opts.i0 > 0.0 && opts.i0 < 1.0)) throw InputError("--i0 must lie in (0, 1)");
  if (opts.params.has_value() == opts.posterior.has_value())
    throw InputError("simulate needs either parameters or a posterior file, not both");

  Json out;
  out["tool"] = "contagion";
  out["version"] = kVersion;
  Json cfg{{"command", "simulate"}, {"horizon", opts.horizon}, {"i0", opts.i0}, {"seed", opts.seed},
           {"integrator", integrator_json(opts.integrator)}};

  std::string table;
  const char* table_name = nullptr;
  if (opts.params) {
    SirParams p = *opts.params;
    p.i0 = opts.i0;
    if (!(p.beta >= 0.0 && p.gamma > 0.0)) throw InputError("simulate needs beta >= 0 and gamma > 0");
    const auto traj = integrate(p, opts.horizon, opts.integrator);
    std::ostringstream csv;
    write_trajectory_csv(csv, traj);
    table = csv.str();
    table_name = kTrajectoryFile;
    const auto peak = incidence_peak_day(p, opts.horizon, opts.integrator);
    cfg["params"] = {{"beta", p.beta}, {"gamma", p.gamma}, {"r", p.r}, {"i0", p.i0}};
    out["config"] = cfg;
    out["r0"] = p.r0();
    out["peak_day"] = peak.day;
    out["peak_interior"] = peak.interior;
    out["final_cumulative"] = traj.states.back().c;
    out["final_size_oracle"] = p.beta > 0.0 ? Json(final_size_oracle(p.r0(), 1.0 - p.i0)) : Json(p.i0);
    out["extinction_probability"] = p.beta > 0.0 ? extinction_probability(p.r0()) : 0.0;
  } else {
    if (opts.ensemble < 1) throw InputError("--ensemble must be at least 1");
    const auto samples = read_posterior_csv_file(*opts.posterior);
    const auto peak = peak_timing(samples, opts.ensemble, opts.i0, opts.seed, opts.horizon, opts.integrator);

    // Same parameter draws as peak_timing.
    Rng picker(derive_seed(opts.seed, 0));
    const auto idx = sample_draw_indices(samples.draws.size(), opts.ensemble, picker);
    std::vector<std::vector<double>> inc(opts.ensemble), rt(opts.ensemble);
    detail::parallel_for(opts.ensemble, [&](std::size_t k) {
      SirParams p = samples.draws[idx[k]].params;
      p.i0 = opts.i0;
      const auto traj = integrate(p, opts.horizon, opts.integrator);
      inc[k] = traj.incidence;
      rt[k] = effective_r(traj, p);
    });
    std::ostringstream csv;
    csv << "day,incidence_median,incidence_lo95,incidence_hi95,Rt_median,Rt_lo,Rt_hi\n";
    std::vector<double> ci(opts.ensemble), cr(opts.ensemble);
    for (int t = 1; t <= opts.horizon; ++t) {
      for (std::size_t k = 0; k < opts.ensemble; ++k) {
        ci[k] = inc[k][static_cast<std::size_t>(t - 1)];
        cr[k] = rt[k][static_cast<std::size_t>(t)];
      }
      csv << t << ',' << format_number(quantile(ci, 0.5)) << ',' << format_number(quantile(ci, 0.025)) << ','
          << format_number(quantile(ci, 0.975)) << ',' << format_number(quantile(cr, 0.5)) << ','
          << format_number(quantile(cr, 0.025)) << ',' << format_number(quantile(cr, 0.975)) << '\n';
    }
    table = csv.str();
    table_name = kEnsembleFile;
    cfg["posterior"] = *opts.posterior;
    cfg["ensemble"] = opts.ensemble;
    out["config"] = cfg;
    out["peak_timing"] = peak_json(peak);
  }

  const std::string text = dump(out);
  ensure_dir(opts.out_dir);
  write_text_file(join(opts.out_dir, table_name), table);
  write_text_file(join(opts.out_dir, kPeakFile), text);
  return text;
}

std::string run_validate(const ValidateOptions& opts) {
  const auto samples = read_posterior_csv_file(opts.posterior);
  const auto window_a = load_window(opts.input);
  std::optional<ObservationWindow> window_b;
  if (opts.out_sample) window_b = load_window(*opts.out_sample);
  auto rep = validate(samples, window_a, window_b ? &*window_b : nullptr, opts.integrator);

  Json out;
  out["tool"] = "contagion";
  out["version"] = kVersion;
  out["config"] = {{"command", "validate"},
                   {"posterior", opts.posterior},
                   {"input", opts.input},
                   {"out_sample", opts.out_sample ? Json(*opts.out_sample) : Json(nullptr)},
                   {"integrator", integrator_json(opts.integrator)}};
  out["map"] = params_json(rep.params);
  out["r2_in_sample"] = rep.r2_in_sample;
  out["r2_out_sample"] = rep.r2_out_sample ? Json(*rep.r2_out_sample) : Json(nullptr);
  out["n_in_sample"] = window_a.size();
  out["n_out_sample"] = window_b ? Json(window_b->size()) : Json(nullptr);

  const std::string text = dump(out);
  if (opts.out_dir) {
    ensure_dir(*opts.out_dir);
    write_text_file(join(*opts.out_dir, kValidationFile), text);
  }
  return text;
}

std::string run_report(const ReportOptions& opts) {
  const fs::path dir(opts.run_dir);
  std::vector<std::string> missing;
  for (const char* name : {kFitReportFile, kPosteriorFile, kEnvelopeFile})
    if (!fs::exists(dir / name)) missing.emplace_back(name);
  if (!missing.empty()) {
    std::string msg = "missing artifacts in '" + opts.run_dir + "':";
    for (const auto& m : missing) msg += " " + m;
    throw IoError(msg);
  }

  Json report;
  try {
    report = Json::parse(read_text_file(join(dir, kFitReportFile)));
  } catch (const Json::exception& e) {
    throw InputError(std::string("malformed ") + kFitReportFile + ": " + e.what());
  }
  const auto samples = read_posterior_csv_file(join(dir, kPosteriorFile));
  std::vector<EnvelopeRow> rows;
  {
    std::istringstream in(read_text_file(join(dir, kEnvelopeFile)));
    rows = read_envelope_csv(in);
  }

  std::ostringstream o;
  try {
    const auto& s = report.at("summary");
    const auto& data = report.at("data");
    const auto& diag = report.at("diagnostics");
    o << "contagion fit report\n";
    o << "input: " << data.at("label").get<std::string>() << "\n";
    o << "observations: " << data.at("n_observations").get<std::size_t>() << " days from "
      << data.at("start_date").get<std::string>() << "\n";
    o << "seed: " << report.at("config").at("seed").get<std::uint64_t>() << ", chains: "
      << diag.at("n_chains").get<std::size_t>() << ", draws: " << s.at("n_draws").get<std::size_t>()
      << ", acceptance: " << fmt("%.3f", diag.at("acceptance_rate").get<double>()) << "\n\n";
    o << "posterior medians (95% credible interval)\n";
    const std::pair<const char*, const char*> rows_out[] = {{"r0", "R0"},         {"generation_time", "generation time"},
                                                            {"r", "r"},           {"i0", "I0"},
                                                            {"beta", "beta"},     {"gamma", "gamma"}};
    for (const auto& [key, name] : rows_out) {
      const auto iv = interval_from(s.at(key));
      char line[160];
      std::snprintf(line, sizeof line, "  %-16s %.4f (%.4f - %.4f)\n", name, iv.median, iv.lower95, iv.upper95);
      o << line;
    }
    const auto& m = report.at("map");
    o << "\nMAP: beta=" << fmt("%.4f", m.at("beta").get<double>()) << " gamma=" << fmt("%.4f", m.at("gamma").get<double>())
      << " r=" << fmt("%.4f", m.at("r").get<double>()) << " i0=" << fmt("%.4g", m.at("i0").get<double>()) << "\n";
    const auto& v = report.at("validation");
    o << "R^2 in-sample: " << fmt("%.4f", v.at("r2_in_sample").get<double>());
    if (!v.at("r2_out_sample").is_null()) o << ", out-of-sample: " << fmt("%.4f", v.at("r2_out_sample").get<double>());
    o << "\n";
    const auto& er = report.at("effective_r");
    if (er.at("first_day_below_one").is_null())
      o << "median R(t) stays above 1 over the window\n";
    else
      o << "median R(t) first below 1 on day " << er.at("first_day_below_one").get<int>() << " ("
        << er.at("first_date_below_one").get<std::string>() << ")\n";
    const auto& pk = report.at("peak_timing");
    o << "peak timing from i0=" << fmt("%g", pk.at("i0").get<double>()) << ": "
      << fmt("%.2f", pk.at("mean_days").get<double>()) << " +/- " << fmt("%.2f", pk.at("sd_days").get<double>())
      << " days";
    if (pk.at("flagged").get<std::size_t>() > 0) o << " (" << pk.at("flagged").get<std::size_t>() << " draws without interior peak)";
    o << "\n";
    const auto& ex = report.at("extinction_probability");
    o << "extinction probability at median R0: " << fmt("%.4f", ex.at("at_median_r0").get<double>()) << " ("
      << fmt("%.4f", ex.at("at_lower95_r0").get<double>()) << " - " << fmt("%.4f", ex.at("at_upper95_r0").get<double>())
      << ")\n";
  } catch (const Json::exception& e) {
    throw InputError(std::string("malformed ") + kFitReportFile + ": " + e.what());
  }
  const std::string text = o.str();

  if (opts.emit_svg) {
    svg::BandSeries fit, rt;
    std::vector<double> obs;
    for (const auto& r : rows) {
      fit.x.push_back(r.day);
      fit.median.push_back(r.median);
      fit.lower.push_back(r.lo95);
      fit.upper.push_back(r.hi95);
      obs.push_back(r.obs);
      rt.x.push_back(r.day);
      rt.median.push_back(r.rt_median);
      rt.lower.push_back(r.rt_lo);
      rt.upper.push_back(r.rt_hi);
    }
    write_text_file(join(dir, "fit.svg"), svg::render_band(fit, obs, "Model fit", "interest"));
    write_text_file(join(dir, "rt.svg"), svg::render_band(rt, {}, "Effective reproduction number", "R(t)", 1.0));

    const std::pair<const char*, double (*)(const SirParams&)> params[] = {
        {"beta", [](const SirParams& p) { return p.beta; }},
        {"gamma", [](const SirParams& p) { return p.gamma; }},
        {"r", [](const SirParams& p) { return p.r; }},
        {"i0", [](const SirParams& p) { return p.i0; }},
        {"r0", [](const SirParams& p) { return p.r0(); }},
        {"generation_time", [](const SirParams& p) { return p.generation_time(); }},
    };
    for (const auto& [name, get] : params) {
      std::vector<double> values;
      values.reserve(samples.draws.size());
      for (const auto& d : samples.draws) values.push_back(get(d.params));
      const auto h = svg::histogram(values, opts.bins);
      write_text_file(join(dir, (std::string("posterior_") + name + ".svg").c_str()),
                      svg::render_histogram(h, std::string("Posterior: ") + name));
    }
  }
  write_text_file(join(dir, kSummaryFile), text);
  return text;
}

}  // namespace contagion
