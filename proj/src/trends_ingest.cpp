#include "contagion/trends_ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "contagion/errors.hpp"

namespace contagion {

namespace {

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::string_view unquote(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

int parse_fixed_int(std::string_view s) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) throw InputError("bad date field '" + std::string(s) + "'");
  return v;
}

double parse_interest(std::string_view s) {
  s = trim(unquote(trim(s)));
  if (s == "<1") return 0.5;
  if (s.empty()) throw InputError("empty value");
  // std::from_chars for double is not available in libstdc++ 11; strtod is locale
  // dependent but the "C" locale is the process default.
  std::string buf(s);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || !std::isfinite(v)) throw InputError("bad value '" + buf + "'");
  return v;
}

}  // namespace

Date parse_date(std::string_view text) {
  text = trim(unquote(trim(text)));
  if (text.size() != 10 || text[4] != '-' || text[7] != '-')
    throw InputError("bad date '" + std::string(text) + "', expected YYYY-MM-DD");
  using namespace std::chrono;
  const year_month_day ymd{year{parse_fixed_int(text.substr(0, 4))},
                           month{static_cast<unsigned>(parse_fixed_int(text.substr(5, 2)))},
                           day{static_cast<unsigned>(parse_fixed_int(text.substr(8, 2)))}};
  if (!ymd.ok()) throw InputError("invalid calendar date '" + std::string(text) + "'");
  return sys_days{ymd};
}

std::string format_date(Date d) {
  using namespace std::chrono;
  const year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::vector<double> InterestSeries::values() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.interest);
  return out;
}

InterestSeries parse_csv(std::istream& in, std::string label) {
  InterestSeries series;
  series.label = std::move(label);

  std::string line;
  if (!std::getline(in, line)) throw InputError("empty file: missing header line");

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = trim(line);
    if (row.empty()) continue;
    const auto comma = row.find(',');
    if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos)
      throw InputError("line " + std::to_string(line_no) + ": expected 'date,value'");
    InterestPoint p;
    try {
      p.date = parse_date(row.substr(0, comma));
      p.interest = parse_interest(row.substr(comma + 1));
    } catch (const InputError& e) {
      throw InputError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (p.interest < 0.0 || p.interest > 100.0)
      throw InputError("line " + std::to_string(line_no) + ": value " + std::to_string(p.interest) +
                       " out of range [0, 100]");
    series.points.push_back(p);
  }
  if (series.points.empty()) throw InputError("empty file: no data rows");

  std::stable_sort(series.points.begin(), series.points.end(),
                   [](const auto& a, const auto& b) { return a.date < b.date; });
  const auto dup = std::adjacent_find(series.points.begin(), series.points.end(),
                                      [](const auto& a, const auto& b) { return a.date == b.date; });
  if (dup != series.points.end()) throw InputError("duplicate date " + format_date(dup->date));
  return series;
}

InterestSeries parse_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open input file '" + path + "'");
  try {
    return parse_csv(in, path);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

std::string serialize_csv(const InterestSeries& series) {
  std::ostringstream out;
  out.precision(17);
  out << "date,interest\n";
  for (const auto& p : series.points) out << format_date(p.date) << ',' << p.interest << '\n';
  return out.str();
}

InterestSeries fill_gaps(const InterestSeries& series) {
  InterestSeries out;
  out.label = series.label;
  out.points.reserve(series.points.size());
  for (const auto& p : series.points) {
    if (!out.points.empty()) {
      for (auto d = out.points.back().date + std::chrono::days{1}; d < p.date; d += std::chrono::days{1})
        out.points.push_back({d, 0.0});
    }
    out.points.push_back(p);
  }
  return out;
}

ObservationWindow to_observation_window(const InterestSeries& series) {
  const auto first = std::find_if(series.points.begin(), series.points.end(),
                                  [](const auto& p) { return p.interest > 0.0; });
  if (first == series.points.end()) throw InputError("series '" + series.label + "' has no positive values");
  ObservationWindow w;
  w.start_date = first->date;
  for (auto it = first; it != series.points.end(); ++it) w.observations.push_back(it->interest);
  return w;
}

}  // namespace contagion
