#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "contagion/mcmc.hpp"
#include "contagion/observation_model.hpp"
#include "contagion/outbreak_analysis.hpp"

// Batch commands behind the CLI. Each is a pure function of its options and
// input files; every artifact is written once, at the end.

namespace contagion {

inline constexpr const char* kPosteriorFile = "posterior.csv";
inline constexpr const char* kFitReportFile = "fit_report.json";
inline constexpr const char* kEnvelopeFile = "envelope.csv";
inline constexpr const char* kSummaryFile = "summary.txt";
inline constexpr const char* kValidationFile = "validation.json";
inline constexpr const char* kTrajectoryFile = "trajectory.csv";
inline constexpr const char* kEnsembleFile = "ensemble.csv";
inline constexpr const char* kPeakFile = "peak_timing.json";

/// Loads, gap-fills and windows a CSV series.
ObservationWindow load_window(const std::string& path);

struct FitOptions {
  std::string input;
  std::optional<std::string> out_sample;
  std::string out_dir = ".";
  double prior_mean = 1.0;
  double prior_var = 0.1;
  McmcConfig mcmc;
  std::size_t chains = 2;
  std::size_t ensemble = 1000;
  double peak_i0 = 1e-3;
  int peak_horizon = 100;
  IntegratorOptions integrator;
  bool emit_svg = false;
};

struct FitResult {
  ParamSummary summary;
  SirParams map;
  ValidationReport validation;
  PeakTiming peak;
  Diagnostics diagnostics;
};

FitResult run_fit(const FitOptions& opts);

struct SimulateOptions {
  std::optional<SirParams> params;  // single deterministic trajectory
  std::optional<std::string> posterior;  // or an ensemble from posterior draws
  int horizon = 100;
  double i0 = 1e-3;
  std::size_t ensemble = 1000;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  IntegratorOptions integrator;
};

/// Writes trajectory.csv (params) or ensemble.csv (posterior), plus peak_timing.json.
/// Returns the peak-timing JSON text.
std::string run_simulate(const SimulateOptions& opts);

struct ValidateOptions {
  std::string posterior;
  std::string input;
  std::optional<std::string> out_sample;
  std::optional<std::string> out_dir;  // validation.json is written only when set
  IntegratorOptions integrator;
};

/// Returns the validation JSON text.
std::string run_validate(const ValidateOptions& opts);

struct ReportOptions {
  std::string run_dir = ".";
  bool emit_svg = false;
  std::size_t bins = 40;
};

/// Reads a fit run directory, writes summary.txt (and SVGs when asked) and
/// returns the summary text. Missing artifacts are listed by name in the IoError.
std::string run_report(const ReportOptions& opts);

}  // namespace contagion
