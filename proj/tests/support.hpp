#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "contagion/mcmc.hpp"
#include "contagion/observation_model.hpp"
#include "contagion/sir_dynamics.hpp"
#include "contagion/trends_ingest.hpp"

namespace testing {

using namespace contagion;

/// Poisson draws around r*(100*c_t) for days 1..days, from the initialisation day.
inline std::vector<double> noisy_interest(const SirParams& p, int days, std::uint64_t seed) {
  const auto mu = expected_interest(integrate(p, days), p.r);
  std::mt19937_64 rng(seed);
  std::vector<double> out;
  for (double m : mu) out.push_back(m > 0.0 ? static_cast<double>(std::poisson_distribution<long>(m)(rng)) : 0.0);
  return out;
}

inline ObservationWindow window_of(std::vector<double> values) {
  InterestSeries s;
  Date d = std::chrono::year{2014} / 8 / 1;
  for (double v : values) s.points.push_back({d, v}), d += std::chrono::days{1};
  return to_observation_window(s);
}

inline InterestSeries series_of(const std::vector<double>& values, Date start = std::chrono::year{2014} / 8 / 1) {
  InterestSeries s;
  for (std::size_t k = 0; k < values.size(); ++k) s.points.push_back({start + std::chrono::days{k}, values[k]});
  return s;
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("contagion_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& name = {}) const { return name.empty() ? path_.string() : (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
