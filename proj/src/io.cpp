#include "contagion/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string_view>

#include "contagion/errors.hpp"

namespace contagion {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(std::string_view field, std::size_t line_no) {
  std::string buf(field);
  while (!buf.empty() && (buf.back() == '\r' || buf.back() == ' ')) buf.pop_back();
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (buf.empty() || end != buf.c_str() + buf.size())
    throw InputError("line " + std::to_string(line_no) + ": bad number '" + buf + "'");
  return v;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_posterior_csv(std::ostream& out, const PosteriorSamples& samples) {
  out << "iteration,beta,gamma,r,i0,log_posterior\n";
  for (const auto& d : samples.draws) {
    out << d.iteration << ',' << format_number(d.params.beta) << ',' << format_number(d.params.gamma) << ','
        << format_number(d.params.r) << ',' << format_number(d.params.i0) << ',' << format_number(d.log_posterior)
        << '\n';
  }
}

PosteriorSamples read_posterior_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "iteration,beta,gamma,r,i0,log_posterior")
    throw InputError("malformed posterior file: expected header 'iteration,beta,gamma,r,i0,log_posterior'");
  PosteriorSamples out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 6) throw InputError("malformed posterior file: line " + std::to_string(line_no));
    Draw d;
    const double it = parse_double(f[0], line_no);
    if (it < 1.0 || it != std::floor(it)) throw InputError("malformed posterior file: bad iteration on line " + std::to_string(line_no));
    d.iteration = static_cast<std::size_t>(it);
    d.params = {parse_double(f[1], line_no), parse_double(f[2], line_no), parse_double(f[3], line_no),
                parse_double(f[4], line_no)};
    d.log_posterior = parse_double(f[5], line_no);
    if (!d.params.valid())
      throw InputError("malformed posterior file: invalid parameters on line " + std::to_string(line_no));
    out.draws.push_back(d);
  }
  if (out.draws.empty()) throw InputError("malformed posterior file: no draws");
  return out;
}

PosteriorSamples read_posterior_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open posterior file '" + path + "'");
  try {
    return read_posterior_csv(in);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "day,S,I,R,C,incidence\n";
  for (std::size_t t = 0; t < traj.states.size(); ++t) {
    const auto& s = traj.states[t];
    out << t << ',' << format_number(s.s) << ',' << format_number(s.i) << ',' << format_number(s.rec) << ','
        << format_number(s.c) << ',';
    if (t > 0) out << format_number(traj.incidence[t - 1]);
    out << '\n';
  }
}

std::vector<EnvelopeRow> envelope_rows(const ObservationWindow& window, const Ensemble& ensemble) {
  std::vector<EnvelopeRow> rows;
  const auto& pi = ensemble.predictive.interest;
  const auto& rt = ensemble.effective_r.rt;
  for (std::size_t k = 0; k < window.size(); ++k) {
    EnvelopeRow r;
    r.day = static_cast<int>(k) + 1;
    r.obs = window.observations[k];
    r.median = pi.median[k];
    r.lo95 = pi.lower[k];
    r.hi95 = pi.upper[k];
    r.rt_median = rt.median[k + 1];
    r.rt_lo = rt.lower[k + 1];
    r.rt_hi = rt.upper[k + 1];
    rows.push_back(r);
  }
  return rows;
}

void write_envelope_csv(std::ostream& out, const std::vector<EnvelopeRow>& rows) {
  out << "day,obs,median,lo95,hi95,Rt_median,Rt_lo,Rt_hi\n";
  for (const auto& r : rows) {
    out << r.day << ',' << format_number(r.obs) << ',' << format_number(r.median) << ',' << format_number(r.lo95)
        << ',' << format_number(r.hi95) << ',' << format_number(r.rt_median) << ',' << format_number(r.rt_lo) << ','
        << format_number(r.rt_hi) << '\n';
  }
}

std::vector<EnvelopeRow> read_envelope_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "day,obs,median,lo95,hi95,Rt_median,Rt_lo,Rt_hi")
    throw InputError("malformed envelope file: unexpected header");
  std::vector<EnvelopeRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 8) throw InputError("malformed envelope file: line " + std::to_string(line_no));
    EnvelopeRow r;
    r.day = static_cast<int>(parse_double(f[0], line_no));
    r.obs = parse_double(f[1], line_no);
    r.median = parse_double(f[2], line_no);
    r.lo95 = parse_double(f[3], line_no);
    r.hi95 = parse_double(f[4], line_no);
    r.rt_median = parse_double(f[5], line_no);
    r.rt_lo = parse_double(f[6], line_no);
    r.rt_hi = parse_double(f[7], line_no);
    rows.push_back(r);
  }
  return rows;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << content;
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace contagion
