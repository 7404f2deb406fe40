#include <sstream>

#include "contagion/errors.hpp"
#include "contagion/trends_ingest.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace contagion;
using namespace std::chrono;

namespace {

InterestSeries parse(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in, "test");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const InputError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("parse_csv reads rows in date order") {
  const auto a = parse("date,interest\n2014-02-01,4\n2014-02-02,100");
  REQUIRE(a.size() == 2);
  CHECK(a.points[0].interest == 4.0);
  CHECK(a.points[1].interest == 100.0);
  CHECK(a.points[0].date == sys_days{year{2014} / 2 / 1});
  CHECK(a.label == "test");

  const auto b = parse("date,interest\n2014-02-02,100\n2014-02-01,4");
  CHECK(a.points == b.points);
}

TEST_CASE("parse_csv rejects out-of-range values") {
  CHECK(error_of("date,interest\n2014-02-01,105").find("range") != std::string::npos);
  CHECK_THROWS_AS(parse("date,interest\n2014-02-01,-1"), InputError);
}

TEST_CASE("parse_csv error cases") {
  CHECK_THROWS_AS(parse(""), InputError);
  CHECK_THROWS_AS(parse("date,interest\n"), InputError);
  CHECK(error_of("date,interest\n2014-02-01,3\n2014-02-01,4").find("duplicate") != std::string::npos);
  const auto bad_row = error_of("date,interest\n2014-02-01,3\n2014-02-02\n");
  CHECK(bad_row.find("line 3") != std::string::npos);
  CHECK(error_of("date,interest\n2014-02-30,3").find("line 2") != std::string::npos);
  CHECK_THROWS_AS(parse("date,interest\n2014-02-01,abc"), InputError);
  CHECK_THROWS_AS(parse("date,interest\n14-2-1,3"), InputError);
}

TEST_CASE("parse_csv accepts common export quirks") {
  const auto s = parse("\"Day\",\"Interest\"\r\n\"2014-02-01\",\"<1\"\r\n\r\n2014-02-02,2.5\r\n");
  REQUIRE(s.size() == 2);
  CHECK(s.points[0].interest == 0.5);
  CHECK(s.points[1].interest == 2.5);
}

TEST_CASE("parse_csv_file reports the path of a missing file") {
  try {
    parse_csv_file("/nonexistent/dir/series.csv");
    FAIL("expected an error");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/dir/series.csv") != std::string::npos);
  }
}

TEST_CASE("dates") {
  CHECK(format_date(parse_date("2015-01-09")) == "2015-01-09");
  CHECK(format_date(parse_date("2016-02-29")) == "2016-02-29");
  CHECK_THROWS_AS(parse_date("2015-02-29"), InputError);
  CHECK_THROWS_AS(parse_date("2015-1-09"), InputError);
  CHECK_THROWS_AS(parse_date("2015-01-09x"), InputError);
}

TEST_CASE("fill_gaps") {
  const auto d1 = sys_days{year{2014} / 8 / 1};
  const auto d = [&](int k) { return d1 + days{k}; };

  SUBCASE("single gap") {
    const InterestSeries s{{{d(0), 5}, {d(2), 7}}, "x"};
    const auto f = fill_gaps(s);
    CHECK(f.points == std::vector<InterestPoint>{{d(0), 5}, {d(1), 0}, {d(2), 7}});
    CHECK(f.label == "x");
  }
  SUBCASE("gap-free input is unchanged") {
    const InterestSeries s{{{d(0), 1}, {d(1), 2}, {d(2), 3}}, "x"};
    CHECK(fill_gaps(s).points == s.points);
  }
  SUBCASE("multiple gaps") {
    const InterestSeries s{{{d(0), 1}, {d(4), 1}}, "x"};
    const auto f = fill_gaps(s);
    CHECK(f.values() == std::vector<double>{1, 0, 0, 0, 1});
  }
  SUBCASE("gaps across a month boundary") {
    const InterestSeries s{{{sys_days{year{2014} / 1 / 30}, 1}, {sys_days{year{2014} / 2 / 2}, 2}}, ""};
    CHECK(fill_gaps(s).size() == 4);
  }
}

TEST_CASE("to_observation_window") {
  SUBCASE("leading zeros are dropped") {
    const auto s = testing::series_of({0, 0, 3, 10, 0});
    const auto w = to_observation_window(s);
    CHECK(w.observations == std::vector<double>{3, 10, 0});
    CHECK(w.start_date == s.points[2].date);
    CHECK(w.t0_offset == 1);
  }
  SUBCASE("no leading zeros") {
    CHECK(to_observation_window(testing::series_of({7, 2})).observations == std::vector<double>{7, 2});
  }
  SUBCASE("all-zero series") {
    CHECK_THROWS_AS(to_observation_window(testing::series_of({0, 0, 0})), InputError);
    CHECK_THROWS_AS(to_observation_window(InterestSeries{}), InputError);
  }
}

TEST_CASE("property: parse_csv inverts serialize_csv") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> value(0.0, 100.0);
  std::uniform_int_distribution<int> len(1, 60);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(static_cast<std::size_t>(len(rng)));
    for (auto& x : v) x = trial % 2 ? value(rng) : std::round(value(rng));
    const auto s = testing::series_of(v, sys_days{year{2010} / 1 / 1} + days{trial * 17});
    std::istringstream in(serialize_csv(s));
    const auto back = parse_csv(in);
    REQUIRE(back.points == s.points);
  }
}

TEST_CASE("property: fill_gaps is idempotent and window keeps retained values") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> step(1, 4), len(1, 40);
  std::uniform_real_distribution<double> value(0.0, 100.0);
  std::bernoulli_distribution zero(0.3);
  for (int trial = 0; trial < 200; ++trial) {
    InterestSeries s;
    sys_days d = sys_days{year{2014} / 1 / 1};
    const int n = len(rng);
    for (int k = 0; k < n; ++k) {
      s.points.push_back({d, zero(rng) ? 0.0 : value(rng)});
      d += days{step(rng)};
    }
    const auto once = fill_gaps(s);
    REQUIRE(fill_gaps(once).points == once.points);
    for (std::size_t k = 1; k < once.size(); ++k) REQUIRE(once.points[k].date - once.points[k - 1].date == days{1});

    const auto vals = once.values();
    const auto first = std::find_if(vals.begin(), vals.end(), [](double x) { return x > 0.0; });
    if (first == vals.end()) {
      CHECK_THROWS_AS(to_observation_window(once), InputError);
      continue;
    }
    const auto w = to_observation_window(once);
    REQUIRE(w.observations == std::vector<double>(first, vals.end()));
    REQUIRE(w.observations.front() > 0.0);
  }
}
