#include "contagion/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "contagion/errors.hpp"

namespace contagion::svg {

namespace {

constexpr double kWidth = 640, kHeight = 400, kLeft = 60, kRight = 20, kTop = 40, kBottom = 50;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

void open_doc(std::ostringstream& o, const std::string& title) {
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
    << escape(title) << "</text>\n";
}

void axes(std::ostringstream& o, const Frame& f, const std::string& y_label) {
  o << "<g stroke=\"black\" stroke-width=\"1\">\n"
    << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << kWidth - kRight << "\" y2=\""
    << kHeight - kBottom << "\"/>\n"
    << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kHeight - kBottom
    << "\"/>\n</g>\n";
  o << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = f.x0 + (f.x1 - f.x0) * k / 4.0;
    const double yv = f.y0 + (f.y1 - f.y0) * k / 4.0;
    o << "<text x=\"" << num(f.px(xv)) << "\" y=\"" << kHeight - kBottom + 16 << "\" text-anchor=\"middle\">"
      << label_num(xv) << "</text>\n";
    o << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(f.py(yv) + 4) << "\" text-anchor=\"end\">" << label_num(yv)
      << "</text>\n";
  }
  o << "<text x=\"16\" y=\"" << kHeight / 2 << "\" transform=\"rotate(-90 16 " << kHeight / 2
    << ")\" text-anchor=\"middle\">" << escape(y_label) << "</text>\n</g>\n";
}

}  // namespace

Histogram histogram(std::span<const double> values, std::size_t bins) {
  if (values.empty()) throw InputError("histogram of an empty set");
  if (bins < 1) throw InputError("histogram needs at least one bin");
  Histogram h;
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  h.lo = *mn;
  h.hi = *mx;
  if (h.hi == h.lo) {
    h.lo -= 0.5;
    h.hi += 0.5;
  }
  h.counts.assign(bins, 0);
  const double width = (h.hi - h.lo) / static_cast<double>(bins);
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - h.lo) / width);
    h.counts[std::min(b, bins - 1)]++;
  }
  return h;
}

std::string render_histogram(const Histogram& h, const std::string& title) {
  std::ostringstream o;
  open_doc(o, title);
  const double top = static_cast<double>(*std::max_element(h.counts.begin(), h.counts.end()));
  const Frame f{h.lo, h.hi, 0.0, top > 0 ? top * 1.05 : 1.0};
  axes(o, f, "draws");
  const double width = (h.hi - h.lo) / static_cast<double>(h.counts.size());
  o << "<g fill=\"steelblue\" stroke=\"white\" stroke-width=\"0.5\">\n";
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    const double x0 = f.px(h.lo + width * static_cast<double>(b));
    const double x1 = f.px(h.lo + width * static_cast<double>(b + 1));
    const double y = f.py(static_cast<double>(h.counts[b]));
    o << "<rect x=\"" << num(x0) << "\" y=\"" << num(y) << "\" width=\"" << num(x1 - x0) << "\" height=\""
      << num(f.py(0.0) - y) << "\"/>\n";
  }
  o << "</g>\n</svg>\n";
  return o.str();
}

std::string render_band(const BandSeries& band, const std::vector<double>& dots, const std::string& title,
                        const std::string& y_label, std::optional<double> reference) {
  if (band.x.empty()) throw InputError("nothing to plot");
  double y_max = 0.0;
  for (double v : band.upper) y_max = std::max(y_max, v);
  for (double v : dots) y_max = std::max(y_max, v);
  if (reference) y_max = std::max(y_max, *reference);
  const Frame f{band.x.front(), band.x.size() > 1 ? band.x.back() : band.x.front() + 1.0, 0.0,
                y_max > 0 ? y_max * 1.05 : 1.0};

  std::ostringstream o;
  open_doc(o, title);
  axes(o, f, y_label);

  o << "<polygon fill=\"steelblue\" fill-opacity=\"0.3\" stroke=\"none\" points=\"";
  for (std::size_t k = 0; k < band.x.size(); ++k) o << num(f.px(band.x[k])) << ',' << num(f.py(band.upper[k])) << ' ';
  for (std::size_t k = band.x.size(); k-- > 0;) o << num(f.px(band.x[k])) << ',' << num(f.py(band.lower[k])) << ' ';
  o << "\"/>\n";

  o << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
  for (std::size_t k = 0; k < band.x.size(); ++k) o << num(f.px(band.x[k])) << ',' << num(f.py(band.median[k])) << ' ';
  o << "\"/>\n";

  if (reference) {
    o << "<line x1=\"" << num(f.px(f.x0)) << "\" y1=\"" << num(f.py(*reference)) << "\" x2=\"" << num(f.px(f.x1))
      << "\" y2=\"" << num(f.py(*reference)) << "\" stroke=\"grey\" stroke-dasharray=\"4 3\"/>\n";
  }
  if (!dots.empty()) {
    o << "<g fill=\"black\">\n";
    for (std::size_t k = 0; k < dots.size() && k < band.x.size(); ++k)
      o << "<circle cx=\"" << num(f.px(band.x[k])) << "\" cy=\"" << num(f.py(dots[k])) << "\" r=\"2.5\"/>\n";
    o << "</g>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace contagion::svg
