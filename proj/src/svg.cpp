#include "metricfreedom/svg.hpp"

#include "metricfreedom/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace mf::svg {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string header(double width, double height) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
         "\" viewBox=\"0 0 " + num(width) + ' ' + num(height) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string text(double x, double y, const std::string& s, const char* anchor = "middle") {
  return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" text-anchor=\"" + anchor + "\">" + escape(s) + "</text>\n";
}

// Linear blend through a short blue-to-yellow ramp.
std::string ramp(double t) {
  static constexpr std::array<std::array<int, 3>, 4> stops{{{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {253, 231, 37}}};
  t = std::clamp(t, 0.0, 1.0) * (stops.size() - 1);
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(t), stops.size() - 2);
  const double f = t - static_cast<double>(i);
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                static_cast<int>(std::lround(stops[i][0] + f * (stops[i + 1][0] - stops[i][0]))),
                static_cast<int>(std::lround(stops[i][1] + f * (stops[i + 1][1] - stops[i][1]))),
                static_cast<int>(std::lround(stops[i][2] + f * (stops[i + 1][2] - stops[i][2]))));
  return buf;
}

}  // namespace

std::string sweep_heatmap(std::span<const SweepCell> cells, const HeatmapOptions& options) {
  std::set<int> Ms, Ns;
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (const auto& c : cells) {
    Ms.insert(c.M);
    Ns.insert(c.N);
    if (c.F_hat) {
      lo = any ? std::min(lo, *c.F_hat) : *c.F_hat;
      hi = any ? std::max(hi, *c.F_hat) : *c.F_hat;
      any = true;
    }
  }
  const std::vector<int> m_axis(Ms.begin(), Ms.end());
  const std::vector<int> n_axis(Ns.begin(), Ns.end());
  const double cell = 48.0, left = 60.0, top = 50.0;
  const double width = left + cell * static_cast<double>(n_axis.size()) + 30.0;
  const double height = top + cell * static_cast<double>(m_axis.size()) + 50.0;

  std::ostringstream out;
  out << header(width, height) << text(width / 2, 24, options.title);
  std::string outline;
  for (const auto& c : cells) {
    const auto col = std::find(n_axis.begin(), n_axis.end(), c.N) - n_axis.begin();
    const auto row = std::find(m_axis.begin(), m_axis.end(), c.M) - m_axis.begin();
    const double x = left + cell * static_cast<double>(col);
    const double y = top + cell * static_cast<double>(row);
    const std::string fill = c.F_hat ? ramp(hi > lo ? (*c.F_hat - lo) / (hi - lo) : 0.5) : "#bdbdbd";
    out << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(cell) << "\" height=\""
        << num(cell) << "\" fill=\"" << fill << "\" stroke=\"white\"/>\n";
    const std::string label = c.F_hat ? num(*c.F_hat) : c.status == CellStatus::TooFewRuns ? "N<3" : "n/a";
    out << text(x + cell / 2, y + cell / 2 + 4, label);
    if (options.operating_point && c.M == options.operating_point->first && c.N == options.operating_point->second) {
      outline = "<rect x=\"" + num(x + 1.5) + "\" y=\"" + num(y + 1.5) + "\" width=\"" + num(cell - 3) +
                "\" height=\"" + num(cell - 3) + "\" fill=\"none\" stroke=\"#d4a017\" stroke-width=\"3\"/>\n";
    }
  }
  out << outline;
  for (std::size_t j = 0; j < n_axis.size(); ++j) {
    out << text(left + cell * (static_cast<double>(j) + 0.5), top + cell * static_cast<double>(m_axis.size()) + 16,
                std::to_string(n_axis[j]));
  }
  for (std::size_t i = 0; i < m_axis.size(); ++i) {
    out << text(left - 8, top + cell * (static_cast<double>(i) + 0.5) + 4, std::to_string(m_axis[i]), "end");
  }
  out << text(left + cell * static_cast<double>(n_axis.size()) / 2, height - 12, "N (runs per question)");
  out << "<text x=\"16\" y=\"" << num(top + cell * static_cast<double>(m_axis.size()) / 2)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << num(top + cell * static_cast<double>(m_axis.size()) / 2) << ")\">M (questions)</text>\n";
  out << "</svg>\n";
  return out.str();
}

std::string scatter_with_line(std::span<const double> xs, std::span<const double> ys,
                              std::span<const std::string> labels, std::optional<LinearFit> fit,
                              const ScatterOptions& options) {
  const double width = 520.0, height = 400.0, left = 60.0, right = 20.0, top = 40.0, bottom = 50.0;
  double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
  if (!xs.empty()) {
    std::tie(x_lo, x_hi) = std::pair{*std::min_element(xs.begin(), xs.end()), *std::max_element(xs.begin(), xs.end())};
    std::tie(y_lo, y_hi) = std::pair{*std::min_element(ys.begin(), ys.end()), *std::max_element(ys.begin(), ys.end())};
  }
  const auto pad = [](double& lo, double& hi) {
    const double span = hi > lo ? hi - lo : 1.0;
    lo -= 0.05 * span;
    hi += 0.05 * span;
  };
  pad(x_lo, x_hi);
  pad(y_lo, y_hi);
  const auto px = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * (width - left - right); };
  const auto py = [&](double y) { return height - bottom - (y - y_lo) / (y_hi - y_lo) * (height - top - bottom); };

  std::ostringstream out;
  out << header(width, height) << text(width / 2, 22, options.title);
  out << "<line x1=\"" << num(left) << "\" y1=\"" << num(height - bottom) << "\" x2=\"" << num(width - right)
      << "\" y2=\"" << num(height - bottom) << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << num(left) << "\" y1=\"" << num(top) << "\" x2=\"" << num(left) << "\" y2=\""
      << num(height - bottom) << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x_lo + (x_hi - x_lo) * i / 4.0;
    const double yv = y_lo + (y_hi - y_lo) * i / 4.0;
    out << text(px(xv), height - bottom + 16, num(xv));
    out << text(left - 6, py(yv) + 4, num(yv), "end");
  }
  if (fit) {
    out << "<line x1=\"" << num(px(x_lo)) << "\" y1=\"" << num(py(fit->intercept + fit->slope * x_lo))
        << "\" x2=\"" << num(px(x_hi)) << "\" y2=\"" << num(py(fit->intercept + fit->slope * x_hi))
        << "\" stroke=\"#c0392b\" stroke-width=\"1.5\"/>\n";
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out << "<circle cx=\"" << num(px(xs[i])) << "\" cy=\"" << num(py(ys[i])) << "\" r=\"4\" fill=\"#2c7fb8\">";
    if (i < labels.size()) out << "<title>" << escape(labels[i]) << "</title>";
    out << "</circle>\n";
  }
  out << text(left + (width - left - right) / 2, height - 12, options.x_label);
  out << "<text x=\"16\" y=\"" << num(height / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << num(height / 2) << ")\">" << escape(options.y_label) << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace mf::svg
