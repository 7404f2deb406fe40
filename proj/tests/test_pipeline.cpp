#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "contagion/errors.hpp"
#include "contagion/io.hpp"
#include "contagion/pipeline.hpp"
#include "contagion/svg.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace contagion;
namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

const SirParams kTruth{2.0, 1.0, 5.0, 1e-3};

std::string write_series(const testing::TempDir& dir, const std::string& name, const std::vector<double>& values) {
  // Interest is reported on a 0-100 scale.
  std::vector<double> capped(values);
  for (auto& v : capped) v = std::min(v, 100.0);
  const auto path = dir.str(name);
  write_text_file(path, serialize_csv(testing::series_of(capped)));
  return path;
}

FitOptions small_fit(const std::string& input, const std::string& out_dir) {
  FitOptions o;
  o.input = input;
  o.out_dir = out_dir;
  o.mcmc.burn_in = 3000;
  o.mcmc.samples = 3000;
  o.mcmc.seed = 21;
  o.ensemble = 200;
  return o;
}

Json read_json(const std::string& path) { return Json::parse(read_text_file(path)); }

}  // namespace

TEST_CASE("format_number") {
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(3.0) == "3");
  CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-30, 30);
  for (int k = 0; k < 1000; ++k) {
    const double v = std::exp(u(rng)) * (k % 2 ? 1 : -1);
    CHECK(std::stod(format_number(v)) == v);
  }
}

TEST_CASE("posterior CSV") {
  PosteriorSamples s;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (std::size_t chain = 0; chain < 2; ++chain)
    for (std::size_t it = 1; it <= 50; ++it)
      s.draws.push_back({{3 * u(rng), u(rng), 100 * u(rng), 0.4 * u(rng)}, -1000 * u(rng), it});

  SUBCASE("round trip is exact, chain restarts included") {
    std::stringstream io;
    write_posterior_csv(io, s);
    const auto back = read_posterior_csv(io);
    REQUIRE(back.draws.size() == s.draws.size());
    for (std::size_t k = 0; k < s.draws.size(); ++k) {
      CHECK(back.draws[k].params == s.draws[k].params);
      CHECK(back.draws[k].log_posterior == s.draws[k].log_posterior);
      CHECK(back.draws[k].iteration == s.draws[k].iteration);
    }
  }
  SUBCASE("malformed input") {
    const auto bad = [](const std::string& text) {
      std::istringstream in(text);
      CHECK_THROWS_AS(read_posterior_csv(in), InputError);
    };
    bad("");
    bad("beta,gamma\n1,2\n");
    bad("iteration,beta,gamma,r,i0,log_posterior\n");
    bad("iteration,beta,gamma,r,i0,log_posterior\n1,2,1,5\n");
    bad("iteration,beta,gamma,r,i0,log_posterior\n1,2,1,5,x,-3\n");
    bad("iteration,beta,gamma,r,i0,log_posterior\n0,2,1,5,0.001,-3\n");
    bad("iteration,beta,gamma,r,i0,log_posterior\n1,2,-1,5,0.001,-3\n");
    bad("iteration,beta,gamma,r,i0,log_posterior\n1,2,1,5,1.5,-3\n");
  }
  SUBCASE("missing file") {
    try {
      read_posterior_csv_file("/nonexistent/posterior.csv");
      FAIL("expected IoError");
    } catch (const IoError& e) {
      CHECK(std::string(e.what()).find("/nonexistent/posterior.csv") != std::string::npos);
    }
  }
}

TEST_CASE("envelope CSV round trip") {
  std::vector<EnvelopeRow> rows;
  for (int d = 1; d <= 12; ++d) rows.push_back({d, d * 1.5, d * 1.4, d * 1.1, d * 2.0, 2.0 / d, 1.5 / d, 2.5 / d});
  std::stringstream io;
  write_envelope_csv(io, rows);
  const auto back = read_envelope_csv(io);
  REQUIRE(back.size() == rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    CHECK(back[k].day == rows[k].day);
    CHECK(back[k].obs == rows[k].obs);
    CHECK(back[k].hi95 == rows[k].hi95);
    CHECK(back[k].rt_lo == rows[k].rt_lo);
  }
  std::istringstream wrong("day,obs\n1,2\n");
  CHECK_THROWS_AS(read_envelope_csv(wrong), InputError);
}

TEST_CASE("trajectory CSV") {
  const auto t = integrate(kTruth, 3);
  std::ostringstream o;
  write_trajectory_csv(o, t);
  std::istringstream in(o.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "day,S,I,R,C,incidence");
  std::getline(in, line);
  CHECK(line.back() == ',');
  int rows = 1;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 4);
}

TEST_CASE("histogram") {
  std::vector<double> v(1000);
  std::iota(v.begin(), v.end(), 0.0);
  const auto h = svg::histogram(v);
  CHECK(h.counts.size() == 40);
  CHECK(std::accumulate(h.counts.begin(), h.counts.end(), std::size_t{0}) == v.size());
  CHECK(h.lo == 0.0);
  CHECK(h.hi == 999.0);
  CHECK(h.counts.back() >= 1);
  for (auto c : h.counts) CHECK(c >= 24);

  const std::vector<double> same(10, 3.0);
  const auto flat = svg::histogram(same, 5);
  CHECK(std::accumulate(flat.counts.begin(), flat.counts.end(), std::size_t{0}) == 10);
  CHECK_THROWS_AS(svg::histogram(std::vector<double>{}), InputError);
  CHECK_THROWS_AS(svg::histogram(v, 0), InputError);

  const auto doc = svg::render_histogram(h, "a < b & c");
  CHECK(doc.rfind("<svg", 0) == 0);
  CHECK(doc.find("a &lt; b &amp; c") != std::string::npos);
}

TEST_CASE("fit, validate and report") {
  testing::TempDir dir("pipeline");
  auto values = testing::noisy_interest(kTruth, 30, 42);
  values.insert(values.begin(), 3, 0.0);
  const auto input = write_series(dir, "a.csv", values);
  const auto held_out = write_series(dir, "b.csv", testing::noisy_interest(kTruth, 30, 43));
  const auto run = dir.str("run");

  auto opts = small_fit(input, run);
  opts.out_sample = held_out;
  const auto res = run_fit(opts);

  for (const char* name : {kPosteriorFile, kFitReportFile, kEnvelopeFile}) CHECK(fs::exists(fs::path(run) / name));
  CHECK_FALSE(fs::exists(fs::path(run) / "fit.svg"));

  const auto report = read_json(dir.str("run/fit_report.json"));
  CHECK(report["data"]["n_observations"] == 30);
  CHECK(report["config"]["seed"] == 21);
  CHECK(report["summary"]["r0"]["median"].get<double>() == res.summary.r0.median);
  CHECK(report["peak_timing"]["n_draws"] == 200);

  const auto posterior = read_posterior_csv_file(dir.str("run/posterior.csv"));
  CHECK(posterior.draws.size() == 2 * 3000);
  CHECK(summarize(posterior).r0.median == res.summary.r0.median);

  std::istringstream env_in(read_text_file(dir.str("run/envelope.csv")));
  const auto env = read_envelope_csv(env_in);
  REQUIRE(env.size() == 30);
  CHECK(env.front().day == 1);
  CHECK(env.front().obs == values[3]);

  SUBCASE("validate reproduces the stored scores") {
    ValidateOptions v;
    v.posterior = dir.str("run/posterior.csv");
    v.input = input;
    v.out_sample = held_out;
    v.out_dir = dir.str("val");
    const auto out = Json::parse(run_validate(v));
    CHECK(out["r2_in_sample"].get<double>() == report["validation"]["r2_in_sample"].get<double>());
    CHECK(out["r2_out_sample"].get<double>() == report["validation"]["r2_out_sample"].get<double>());
    CHECK(out["map"]["beta"].get<double>() == res.map.beta);
    CHECK(fs::exists(dir.path() / "val" / kValidationFile));

    v.out_dir.reset();
    v.out_sample.reset();
    CHECK(Json::parse(run_validate(v))["r2_out_sample"].is_null());
  }
  SUBCASE("report summarizes the run") {
    const auto text = run_report({run, false, 40});
    char expect[64];
    std::snprintf(expect, sizeof expect, "%.4f", res.summary.r0.median);
    CHECK(text.find(std::string("R0               ") + expect) != std::string::npos);
    CHECK(read_text_file(dir.str("run/summary.txt")) == text);
    CHECK_FALSE(fs::exists(fs::path(run) / "fit.svg"));

    run_report({run, true, 25});
    for (const char* svg : {"fit.svg", "rt.svg", "posterior_r0.svg", "posterior_i0.svg"})
      CHECK(fs::exists(fs::path(run) / svg));
  }
  SUBCASE("report names missing artifacts") {
    fs::remove(fs::path(run) / kEnvelopeFile);
    try {
      run_report({run, false, 40});
      FAIL("expected IoError");
    } catch (const IoError& e) {
      CHECK(std::string(e.what()).find(kEnvelopeFile) != std::string::npos);
      CHECK(std::string(e.what()).find(kPosteriorFile) == std::string::npos);
    }
  }
  SUBCASE("simulate from the posterior matches peak_timing") {
    SimulateOptions s;
    s.posterior = dir.str("run/posterior.csv");
    s.ensemble = 100;
    s.seed = 9;
    s.horizon = 60;
    s.out_dir = dir.str("sim");
    const auto out = Json::parse(run_simulate(s));
    const auto direct = peak_timing(posterior, 100, 1e-3, 9, 60);
    CHECK(out["peak_timing"]["mean_days"].get<double>() == direct.mean);
    CHECK(out["peak_timing"]["sd_days"].get<double>() == direct.sd);
    CHECK(fs::exists(dir.path() / "sim" / kEnsembleFile));
    CHECK(Json::parse(read_text_file(dir.str("sim/peak_timing.json"))) == out);
  }
}

TEST_CASE("fit is deterministic for a seed") {
  testing::TempDir dir("determinism");
  const auto input = write_series(dir, "a.csv", testing::noisy_interest(kTruth, 25, 8));
  auto a = small_fit(input, dir.str("one"));
  a.mcmc.burn_in = 1000;
  a.mcmc.samples = 1000;
  auto b = a;
  b.out_dir = dir.str("two");
  run_fit(a);
  run_fit(b);
  for (const char* name : {kPosteriorFile, kEnvelopeFile})
    CHECK(read_text_file(dir.str(std::string("one/") + name)) == read_text_file(dir.str(std::string("two/") + name)));
  auto ra = read_json(dir.str("one/fit_report.json")), rb = read_json(dir.str("two/fit_report.json"));
  ra["config"].erase("input");
  CHECK(ra["summary"] == rb["summary"]);
  CHECK(ra["diagnostics"] == rb["diagnostics"]);
}

TEST_CASE("fit input errors") {
  testing::TempDir dir("fit_errors");
  auto o = small_fit(dir.str("absent.csv"), dir.str("run"));
  try {
    run_fit(o);
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("absent.csv") != std::string::npos);
  }
  CHECK_FALSE(fs::exists(dir.path() / "run"));

  o.input = write_series(dir, "zeros.csv", std::vector<double>(10, 0.0));
  CHECK_THROWS_AS(run_fit(o), InputError);

  o.input = write_series(dir, "ok.csv", testing::noisy_interest(kTruth, 20, 1));
  o.chains = 0;
  CHECK_THROWS_AS(run_fit(o), InputError);
}

TEST_CASE("simulate from parameters") {
  testing::TempDir dir("simulate");
  SimulateOptions s;
  s.params = SirParams{2.0, 1.0, 50.0, 0.3};
  s.horizon = 40;
  s.out_dir = dir.str("out");
  const auto out = Json::parse(run_simulate(s));
  CHECK(out["config"]["params"]["i0"].get<double>() == 1e-3);
  CHECK(std::abs(out["final_cumulative"].get<double>() - final_size_oracle(2.0, 1.0 - 1e-3)) <= 1e-4);
  CHECK(out["peak_day"].get<int>() == incidence_peak_day({2.0, 1.0, 50.0, 1e-3}, 40).day);
  CHECK(out["extinction_probability"].get<double>() == doctest::Approx(0.5));

  std::istringstream csv(read_text_file(dir.str("out/trajectory.csv")));
  std::string line;
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 42);

  s.horizon = 0;
  CHECK_THROWS_AS(run_simulate(s), InputError);
  s.horizon = 10;
  s.i0 = 1.0;
  CHECK_THROWS_AS(run_simulate(s), InputError);
  s.i0 = 1e-3;
  s.posterior = "x.csv";
  CHECK_THROWS_AS(run_simulate(s), InputError);
  s.params.reset();
  s.posterior.reset();
  CHECK_THROWS_AS(run_simulate(s), InputError);
}
