#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace contagion::svg {

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> counts;
};

/// Equal-width bins spanning [min, max] of the values; the maximum lands in the last bin.
Histogram histogram(std::span<const double> values, std::size_t bins = 40);

std::string render_histogram(const Histogram& h, const std::string& title);

struct BandSeries {
  std::vector<double> x;
  std::vector<double> median;
  std::vector<double> lower;
  std::vector<double> upper;
};

/// Shaded band with a median line, optional observation dots and an optional
/// horizontal reference line.
std::string render_band(const BandSeries& band, const std::vector<double>& dots, const std::string& title,
                        const std::string& y_label, std::optional<double> reference = std::nullopt);

}  // namespace contagion::svg
