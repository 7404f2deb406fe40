// Exercises the shared library through its C header only.
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "contagion/contagion.h"
#include "doctest.h"

namespace fs = std::filesystem;

namespace {

const char* kCsv =
    "day,interest\n"
    "2014-08-01,0\n"
    "2014-08-02,2\n"
    "2014-08-03,5\n"
    "2014-08-05,20\n"
    "2014-08-06,41\n"
    "2014-08-07,62\n"
    "2014-08-08,70\n"
    "2014-08-09,58\n"
    "2014-08-10,40\n"
    "2014-08-11,22\n"
    "2014-08-12,12\n";

struct Dir {
  fs::path path = fs::temp_directory_path() / ("contagion_capi_" + std::to_string(::getpid()));
  Dir() { fs::create_directories(path); }
  ~Dir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string operator/(const char* name) const { return (path / name).string(); }
};

ctg_series_t parse(const char* csv) {
  ctg_series_t s = nullptr;
  REQUIRE(ctg_series_parse(&s, csv, std::strlen(csv), "test") == CTG_OK);
  return s;
}

}  // namespace

TEST_CASE("version and status strings") {
  CHECK(std::string(ctg_version()) == "0.1.0");
  CHECK(std::string(ctg_status_string(CTG_OK)).size() > 0);
  CHECK(std::string(ctg_status_string(CTG_ERROR_IO)) != std::string(ctg_status_string(CTG_ERROR_INPUT)));
  CHECK(ctg_status_string(12345) != nullptr);
}

TEST_CASE("series handle") {
  auto* s = parse(kCsv);
  size_t n = 0;
  CHECK(ctg_series_length(s, &n) == CTG_OK);
  CHECK(n == 12);  // 2014-08-04 filled in

  size_t cap = 0;
  CHECK(ctg_series_window(s, nullptr, &cap) == CTG_ERROR_INSUFFICIENT_BUFFER);
  CHECK(cap == 11);
  std::vector<double> w(cap);
  CHECK(ctg_series_window(s, w.data(), &cap) == CTG_OK);
  CHECK(w[0] == 2.0);
  CHECK(w[2] == 0.0);  // missing day filled with zero

  char small[4];
  size_t len = sizeof small;
  CHECK(ctg_series_start_date(s, small, &len) == CTG_ERROR_INSUFFICIENT_BUFFER);
  CHECK(len == 11);
  char date[16];
  len = sizeof date;
  CHECK(ctg_series_start_date(s, date, &len) == CTG_OK);
  CHECK(std::string(date) == "2014-08-02");
  CHECK(ctg_series_destroy(s) == CTG_OK);
  CHECK(ctg_series_destroy(nullptr) == CTG_OK);
}

TEST_CASE("error reporting") {
  ctg_series_t s = nullptr;
  const char* bad = "day,interest\n2014-08-01,abc\n";
  CHECK(ctg_series_parse(&s, bad, std::strlen(bad), "x") == CTG_ERROR_INPUT);
  CHECK(s == nullptr);
  CHECK(std::string(ctg_last_error()).find("line 2") != std::string::npos);

  CHECK(ctg_series_load(&s, "/nonexistent/interest.csv") == CTG_ERROR_IO);
  CHECK(std::string(ctg_last_error()).find("/nonexistent/interest.csv") != std::string::npos);

  CHECK(ctg_series_load(nullptr, "x") == CTG_ERROR_NULL_POINTER);
  CHECK(ctg_series_length(nullptr, nullptr) == CTG_ERROR_NULL_POINTER);

  double z = 0.0;
  CHECK(ctg_final_size(0.0, 0.9, &z) == CTG_ERROR_INPUT);
  CHECK(ctg_final_size(2.0, 1.0, nullptr) == CTG_ERROR_NULL_POINTER);

  // A handle of the wrong kind is rejected rather than misread.
  auto* series = parse(kCsv);
  int horizon = 0;
  CHECK(ctg_trajectory_horizon(reinterpret_cast<ctg_trajectory_t>(series), &horizon) == CTG_ERROR_INPUT);
  ctg_series_destroy(series);
}

TEST_CASE("simulate") {
  ctg_params p{2.0, 1.0, 50.0, 1e-3};
  ctg_trajectory_t t = nullptr;
  REQUIRE(ctg_simulate(&t, &p, 40, nullptr) == CTG_OK);
  int horizon = 0;
  CHECK(ctg_trajectory_horizon(t, &horizon) == CTG_OK);
  CHECK(horizon == 40);

  double s, i, r, c;
  CHECK(ctg_trajectory_state(t, 0, &s, &i, &r, &c) == CTG_OK);
  CHECK(s == 1.0 - 1e-3);
  CHECK(c == 1e-3);
  CHECK(ctg_trajectory_state(t, 40, &s, &i, &r, &c) == CTG_OK);
  double z = 0.0;
  CHECK(ctg_final_size(2.0, 1.0 - 1e-3, &z) == CTG_OK);
  CHECK(std::abs(c - z) <= 1e-4);
  CHECK(ctg_trajectory_state(t, 41, &s, &i, &r, &c) == CTG_ERROR_OUT_OF_RANGE);
  CHECK(ctg_trajectory_state(t, -1, &s, &i, &r, &c) == CTG_ERROR_OUT_OF_RANGE);

  std::vector<double> inc(40);
  size_t n = inc.size();
  CHECK(ctg_trajectory_incidence(t, inc.data(), &n) == CTG_OK);
  double sum = 0.0;
  for (double v : inc) sum += v;
  CHECK(sum == doctest::Approx(c - 1e-3).epsilon(1e-12));
  ctg_trajectory_destroy(t);

  p.gamma = 0.0;
  CHECK(ctg_simulate(&t, &p, 40, nullptr) == CTG_ERROR_INPUT);
  p.gamma = 1.0;
  CHECK(ctg_simulate(&t, &p, 0, nullptr) == CTG_ERROR_INPUT);
  ctg_integrator bad{-1.0, 1e-8};
  CHECK(ctg_simulate(&t, &p, 10, &bad) == CTG_ERROR_INPUT);
}

TEST_CASE("scalar helpers") {
  double v = 0.0;
  CHECK(ctg_extinction_probability(2.0, &v) == CTG_OK);
  CHECK(v == doctest::Approx(0.5));
  const double obs[] = {1, 2, 3}, pred[] = {1, 2, 4};
  CHECK(ctg_r_squared(obs, pred, 3, &v) == CTG_OK);
  CHECK(v == doctest::Approx(0.5));
  CHECK(ctg_r_squared(obs, pred, 1, &v) == CTG_ERROR_INPUT);

  auto* s = parse(kCsv);
  ctg_params p{2.0, 1.0, 5.0, 1e-3};
  CHECK(ctg_log_posterior(s, &p, 1.0, 0.1, &v) == CTG_OK);
  CHECK(std::isfinite(v));
  p.i0 = 0.9;
  CHECK(ctg_log_posterior(s, &p, 1.0, 0.1, &v) == CTG_OK);
  CHECK(std::isinf(v));
  CHECK(ctg_log_posterior(s, &p, -1.0, 0.1, &v) == CTG_ERROR_INPUT);
  ctg_series_destroy(s);
}

TEST_CASE("fit and posterior handle") {
  Dir dir;
  ctg_set_warnings(0);
  auto* s = parse(kCsv);
  ctg_mcmc_config cfg;
  ctg_mcmc_config_default(&cfg);
  CHECK(cfg.burn_in == 10000);
  CHECK(cfg.samples == 40000);
  cfg.burn_in = 2000;
  cfg.samples = 1000;
  cfg.seed = 3;

  ctg_posterior_t post = nullptr;
  REQUIRE(ctg_fit(&post, s, 1.0, 0.1, &cfg, 2) == CTG_OK);
  size_t n = 0;
  CHECK(ctg_posterior_size(post, &n) == CTG_OK);
  CHECK(n == 2000);
  ctg_params d{};
  double lp = 0.0;
  CHECK(ctg_posterior_draw(post, 0, &d, &lp) == CTG_OK);
  CHECK(std::isfinite(lp));
  CHECK(ctg_posterior_draw(post, n, &d, &lp) == CTG_ERROR_OUT_OF_RANGE);

  double rate = 0.0;
  CHECK(ctg_posterior_acceptance_rate(post, &rate) == CTG_OK);
  CHECK(rate > 0.0);
  CHECK(rate < 1.0);

  ctg_summary sum{};
  CHECK(ctg_posterior_summary(post, &sum) == CTG_OK);
  CHECK(sum.n_draws == n);
  CHECK(sum.r0.lower95 <= sum.r0.median);
  CHECK(sum.r0.median <= sum.r0.upper95);

  ctg_peak_timing pk{};
  CHECK(ctg_posterior_peak_timing(post, 100, 1e-3, 4, 100, &pk) == CTG_OK);
  CHECK(pk.n_draws == 100);
  CHECK(pk.mean_days > 0.0);

  ctg_params map{};
  CHECK(ctg_posterior_map(post, &map) == CTG_OK);
  double r2_in = 0.0, r2_out = -99.0;
  CHECK(ctg_validate(&map, s, s, &r2_in, &r2_out) == CTG_OK);
  CHECK(r2_in == r2_out);
  CHECK(r2_in > 0.5);

  const auto path = dir / "posterior.csv";
  CHECK(ctg_posterior_save(post, path.c_str()) == CTG_OK);
  ctg_posterior_t back = nullptr;
  CHECK(ctg_posterior_load(&back, path.c_str()) == CTG_OK);
  ctg_params e{};
  double lp2 = 0.0;
  CHECK(ctg_posterior_draw(back, 7, &e, &lp2) == CTG_OK);
  CHECK(ctg_posterior_draw(post, 7, &d, &lp) == CTG_OK);
  CHECK(e.beta == d.beta);
  CHECK(e.i0 == d.i0);
  CHECK(lp2 == lp);

  cfg.samples = 0;
  ctg_posterior_t none = nullptr;
  CHECK(ctg_fit(&none, s, 1.0, 0.1, &cfg, 1) == CTG_ERROR_INPUT);
  CHECK(none == nullptr);

  ctg_posterior_destroy(back);
  ctg_posterior_destroy(post);
  ctg_series_destroy(s);
  ctg_set_warnings(1);
}

TEST_CASE("batch commands") {
  Dir dir;
  const auto input = dir / "a.csv";
  {
    std::ofstream(input) << kCsv;
  }
  ctg_fit_options fo;
  ctg_fit_options_default(&fo);
  CHECK(fo.chains == 2);
  CHECK(fo.peak_horizon == 100);
  const auto run = dir / "run";
  fo.input = input.c_str();
  fo.out_dir = run.c_str();
  fo.mcmc.burn_in = 1000;
  fo.mcmc.samples = 500;
  fo.ensemble = 100;
  REQUIRE(ctg_run_fit(&fo) == CTG_OK);
  CHECK(fs::exists(dir.path / "run" / "fit_report.json"));

  ctg_report_options ro;
  ctg_report_options_default(&ro);
  CHECK(ro.bins == 40);
  ro.run_dir = run.c_str();
  char* text = nullptr;
  CHECK(ctg_run_report(&ro, &text) == CTG_OK);
  REQUIRE(text != nullptr);
  CHECK(std::string(text).find("R0") != std::string::npos);
  ctg_string_free(text);
  ro.bins = 0;
  CHECK(ctg_run_report(&ro, nullptr) == CTG_ERROR_INPUT);

  ctg_validate_options vo;
  ctg_validate_options_default(&vo);
  const auto posterior = dir / "run/posterior.csv";
  vo.posterior = posterior.c_str();
  vo.input = input.c_str();
  char* json = nullptr;
  CHECK(ctg_run_validate(&vo, &json) == CTG_OK);
  CHECK(std::string(json).find("r2_in_sample") != std::string::npos);
  ctg_string_free(json);

  ctg_simulate_options so;
  ctg_simulate_options_default(&so);
  const ctg_params p{2.0, 1.0, 5.0, 1e-3};
  const auto sim = dir / "sim";
  so.params = &p;
  so.out_dir = sim.c_str();
  CHECK(ctg_run_simulate(&so, nullptr) == CTG_OK);
  CHECK(fs::exists(dir.path / "sim" / "trajectory.csv"));
  so.horizon = 0;
  CHECK(ctg_run_simulate(&so, nullptr) == CTG_ERROR_INPUT);
  CHECK(std::string(ctg_last_error()).find("horizon") != std::string::npos);

  const auto missing = dir / "empty";
  ro.run_dir = missing.c_str();
  ro.bins = 40;
  CHECK(ctg_run_report(&ro, nullptr) == CTG_ERROR_IO);
  CHECK(std::string(ctg_last_error()).find("posterior.csv") != std::string::npos);

  CHECK(ctg_run_fit(nullptr) == CTG_ERROR_NULL_POINTER);
}
