#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "contagion/mcmc.hpp"
#include "contagion/outbreak_analysis.hpp"
#include "contagion/sir_dynamics.hpp"
#include "contagion/trends_ingest.hpp"

namespace contagion {

/// Shortest round-trip decimal form ("%.17g"); "nan", "inf" and "-inf" for non-finite values.
std::string format_number(double v);

/// `iteration,beta,gamma,r,i0,log_posterior`, values written with full precision.
/// Chains are written back to back; the iteration counter restarts per chain.
void write_posterior_csv(std::ostream& out, const PosteriorSamples& samples);
PosteriorSamples read_posterior_csv(std::istream& in);
PosteriorSamples read_posterior_csv_file(const std::string& path);

/// `day,S,I,R,C,incidence` on the daily grid; incidence is empty on day 0.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

struct EnvelopeRow {
  int day = 0;
  double obs = 0.0;
  double median = 0.0;
  double lo95 = 0.0;
  double hi95 = 0.0;
  double rt_median = 0.0;
  double rt_lo = 0.0;
  double rt_hi = 0.0;
};

/// One row per observation day (day 1 is the first observation), with R(t) at the same day.
std::vector<EnvelopeRow> envelope_rows(const ObservationWindow& window, const Ensemble& ensemble);

/// `day,obs,median,lo95,hi95,Rt_median,Rt_lo,Rt_hi`
void write_envelope_csv(std::ostream& out, const std::vector<EnvelopeRow>& rows);
std::vector<EnvelopeRow> read_envelope_csv(std::istream& in);

/// Writes a whole file at once; throws IoError on failure.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace contagion
