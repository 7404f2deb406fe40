#pragma once

#include <chrono>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace contagion {

using Date = std::chrono::sys_days;

/// Parses YYYY-MM-DD. Throws InputError on anything else, including impossible dates.
Date parse_date(std::string_view text);
std::string format_date(Date d);

struct InterestPoint {
  Date date;
  double interest = 0.0;

  friend bool operator==(const InterestPoint&, const InterestPoint&) = default;
};

/// Daily interest on the 0-100 scale, ascending by date.
struct InterestSeries {
  std::vector<InterestPoint> points;
  std::string label;

  std::vector<double> values() const;
  bool empty() const { return points.empty(); }
  std::size_t size() const { return points.size(); }
};

/// The fitted data: starts at the first strictly positive day. The model is
/// initialised one day before start_date, so observation k sits at model day k+1.
struct ObservationWindow {
  std::vector<double> observations;
  Date start_date{};
  int t0_offset = 1;

  std::size_t size() const { return observations.size(); }
};

/// Reads a header line followed by `date,value` rows. Rows may arrive in any
/// order; the result is sorted by date. A "<1" value maps to 0.5.
InterestSeries parse_csv(std::istream& in, std::string label = {});
InterestSeries parse_csv_file(const std::string& path);

/// Inverse of parse_csv: header `date,interest`, one row per point.
std::string serialize_csv(const InterestSeries& series);

/// Inserts zero-interest rows for missing calendar days.
InterestSeries fill_gaps(const InterestSeries& series);

/// Drops leading zero days. Throws InputError if no day is positive.
ObservationWindow to_observation_window(const InterestSeries& series);

}  // namespace contagion
