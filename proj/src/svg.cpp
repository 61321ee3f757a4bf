#include "cptsim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "cptsim/errors.hpp"

namespace cpt {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Tick step of the form {1,2,5} * 10^k close to range/n.
double nice_step(double range, int n) {
  const double raw = range / std::max(1, n);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double frac = raw / mag;
  double nice = 10.0;
  if (frac <= 1.5)
    nice = 1.0;
  else if (frac <= 3.5)
    nice = 2.0;
  else if (frac <= 7.5)
    nice = 5.0;
  return nice * mag;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void fold(double v) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  void finish() {
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (lo == hi) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

}  // namespace

void SvgPlot::add(std::vector<double> x, std::vector<double> y, std::string color,
                  std::string label, bool markers) {
  SvgSeries s;
  s.x = std::move(x);
  s.y = std::move(y);
  s.color = std::move(color);
  s.label = std::move(label);
  s.markers = markers;
  series.push_back(std::move(s));
}

std::string SvgPlot::render() const {
  const double ml = 70, mr = 20, mt = title.empty() ? 16 : 34, mb = 48;
  const double pw = width - ml - mr, ph = height - mt - mb;

  Range rx, ry;
  for (const auto& s : series) {
    for (double v : s.x) rx.fold(v);
    for (double v : s.y) ry.fold(v);
  }
  rx.finish();
  ry.finish();
  // pad y a little so curves do not sit on the frame
  const double pad = 0.05 * (ry.hi - ry.lo);
  ry.lo -= pad;
  ry.hi += pad;

  auto px = [&](double v) { return ml + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
  auto py = [&](double v) { return mt + ph - (v - ry.lo) / (ry.hi - ry.lo) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
    << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty())
    o << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";

  // frame
  o << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";

  // ticks
  const double sx = nice_step(rx.hi - rx.lo, 6);
  for (double t = std::ceil(rx.lo / sx) * sx; t <= rx.hi + 1e-9 * sx; t += sx) {
    const double x = px(t);
    o << "<line x1=\"" << num(x) << "\" y1=\"" << mt + ph << "\" x2=\"" << num(x) << "\" y2=\""
      << mt + ph + 5 << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << num(x) << "\" y=\"" << mt + ph + 18
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << num(t)
      << "</text>\n";
  }
  const double sy = nice_step(ry.hi - ry.lo, 6);
  for (double t = std::ceil(ry.lo / sy) * sy; t <= ry.hi + 1e-9 * sy; t += sy) {
    const double y = py(t);
    o << "<line x1=\"" << ml - 5 << "\" y1=\"" << num(y) << "\" x2=\"" << ml << "\" y2=\""
      << num(y) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << ml - 8 << "\" y=\"" << num(y + 4)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(t)
      << "</text>\n";
  }

  if (!xlabel.empty())
    o << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 10
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << xlabel
      << "</text>\n";
  if (!ylabel.empty())
    o << "<text x=\"16\" y=\"" << mt + ph / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
      << "transform=\"rotate(-90 16 " << mt + ph / 2 << ")\">" << ylabel << "</text>\n";

  for (const auto& s : series) {
    std::ostringstream pts;
    for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      pts << num(px(s.x[i])) << ',' << num(py(s.y[i])) << ' ';
    }
    o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\""
      << pts.str() << "\"/>\n";
    if (s.markers) {
      for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        o << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.y[i]))
          << "\" r=\"2.5\" fill=\"" << s.color << "\"/>\n";
      }
    }
  }

  // legend
  double ly = mt + 14;
  for (const auto& s : series) {
    if (s.label.empty()) continue;
    o << "<line x1=\"" << ml + pw - 150 << "\" y1=\"" << ly - 4 << "\" x2=\"" << ml + pw - 126
      << "\" y2=\"" << ly - 4 << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << ml + pw - 120 << "\" y=\"" << ly
      << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label << "</text>\n";
    ly += 16;
  }

  o << "</svg>\n";
  return o.str();
}

void SvgPlot::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path);
  out << render();
}

}  // namespace cpt
