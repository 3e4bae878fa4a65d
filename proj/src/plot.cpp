#include "distopt/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace distopt {
namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};
constexpr std::size_t kMaxPoints = 1500;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
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

// Round step for roughly `count` ticks over [lo, hi].
double tick_step(double lo, double hi, int count) {
  const double raw = (hi - lo) / count;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) return m * mag;
  }
  return 10.0 * mag;
}

void render_panel(std::ostringstream& svg, const PlotPanel& panel, double top,
                  double width, double height) {
  const double left = 70.0, right = 150.0, pad_top = 30.0, pad_bottom = 45.0;
  const double plot_w = width - left - right;
  const double plot_h = height - pad_top - pad_bottom;

  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const auto& s : panel.series) {
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      x_lo = std::min(x_lo, s.x[k]);
      x_hi = std::max(x_hi, s.x[k]);
      y_lo = std::min(y_lo, s.y[k]);
      y_hi = std::max(y_hi, s.y[k]);
    }
  }
  if (!(x_lo < x_hi)) x_hi = x_lo + 1.0;
  if (!std::isfinite(y_lo)) y_lo = 0.0, y_hi = 1.0;
  if (!(y_lo < y_hi)) y_lo -= 0.5, y_hi += 0.5;
  const double margin = 0.05 * (y_hi - y_lo);
  y_lo -= margin;
  y_hi += margin;

  const auto px = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  const auto py = [&](double y) {
    return top + pad_top + (y_hi - y) / (y_hi - y_lo) * plot_h;
  };

  svg << "<text x=\"" << num(left + plot_w / 2) << "\" y=\"" << num(top + 20)
      << "\" text-anchor=\"middle\" font-size=\"14\">" << escape(panel.title)
      << "</text>\n";
  svg << "<rect x=\"" << num(left) << "\" y=\"" << num(top + pad_top)
      << "\" width=\"" << num(plot_w) << "\" height=\"" << num(plot_h)
      << "\" fill=\"none\" stroke=\"#333\"/>\n";

  const double xs = tick_step(x_lo, x_hi, 8);
  for (double t = std::ceil(x_lo / xs) * xs; t <= x_hi + 1e-9 * xs; t += xs) {
    svg << "<line x1=\"" << num(px(t)) << "\" y1=\"" << num(top + pad_top + plot_h)
        << "\" x2=\"" << num(px(t)) << "\" y2=\"" << num(top + pad_top + plot_h + 5)
        << "\" stroke=\"#333\"/><text x=\"" << num(px(t)) << "\" y=\""
        << num(top + pad_top + plot_h + 18)
        << "\" text-anchor=\"middle\" font-size=\"11\">" << num(t) << "</text>\n";
  }
  const double ys = tick_step(y_lo, y_hi, 6);
  for (double v = std::ceil(y_lo / ys) * ys; v <= y_hi + 1e-9 * ys; v += ys) {
    svg << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(py(v))
        << "\" x2=\"" << num(left) << "\" y2=\"" << num(py(v))
        << "\" stroke=\"#333\"/><text x=\"" << num(left - 8) << "\" y=\""
        << num(py(v) + 4) << "\" text-anchor=\"end\" font-size=\"11\">"
        << num(std::abs(v) < 1e-12 * ys ? 0.0 : v) << "</text>\n";
  }
  svg << "<text x=\"" << num(left + plot_w / 2) << "\" y=\""
      << num(top + height - 8) << "\" text-anchor=\"middle\" font-size=\"12\">"
      << escape(panel.x_label) << "</text>\n";
  svg << "<text transform=\"translate(16," << num(top + pad_top + plot_h / 2)
      << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"12\">"
      << escape(panel.y_label) << "</text>\n";

  for (std::size_t si = 0; si < panel.series.size(); ++si) {
    const auto& s = panel.series[si];
    const char* color = kPalette[si % std::size(kPalette)];
    const std::size_t stride = std::max<std::size_t>(1, s.x.size() / kMaxPoints);
    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\"" << (s.dashed ? " stroke-dasharray=\"6 4\"" : "")
        << " points=\"";
    for (std::size_t k = 0; k < s.x.size(); k += stride) {
      if (!std::isfinite(s.y[k])) continue;
      svg << num(px(s.x[k])) << ',' << num(py(s.y[k])) << ' ';
    }
    if (!s.x.empty() && (s.x.size() - 1) % stride != 0 && std::isfinite(s.y.back())) {
      svg << num(px(s.x.back())) << ',' << num(py(s.y.back()));
    }
    svg << "\"/>\n";
    const double ly = top + pad_top + 12 + 18.0 * static_cast<double>(si);
    svg << "<line x1=\"" << num(left + plot_w + 12) << "\" y1=\"" << num(ly)
        << "\" x2=\"" << num(left + plot_w + 36) << "\" y2=\"" << num(ly)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\""
        << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/><text x=\""
        << num(left + plot_w + 42) << "\" y=\"" << num(ly + 4)
        << "\" font-size=\"11\">" << escape(s.label) << "</text>\n";
  }
}

}  // namespace

std::string render_svg(const std::vector<PlotPanel>& panels, double panel_width,
                       double panel_height) {
  std::ostringstream svg;
  const double total = panel_height * static_cast<double>(panels.size());
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(panel_width)
      << "\" height=\"" << num(total) << "\" viewBox=\"0 0 " << num(panel_width)
      << ' ' << num(total) << "\" font-family=\"sans-serif\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t p = 0; p < panels.size(); ++p) {
    render_panel(svg, panels[p], panel_height * static_cast<double>(p),
                 panel_width, panel_height);
  }
  svg << "</svg>\n";
  return svg.str();
}

PlotPanel outputs_panel(const Trajectory& traj) {
  PlotPanel panel{"Agent outputs", "t", "y_i", {}};
  for (std::size_t i = 0; i < traj.agents.size(); ++i) {
    PlotSeries s{"y_" + std::to_string(i + 1), traj.times, {}, false};
    for (std::size_t k = 0; k < traj.size(); ++k) s.y.push_back(traj.agents[i].y(k));
    panel.series.push_back(std::move(s));
  }
  if (!traj.times.empty()) {
    panel.series.push_back({"y*",
                            {traj.times.front(), traj.times.back()},
                            {traj.y_star, traj.y_star},
                            true});
  }
  return panel;
}

PlotPanel estimate_panel(const Trajectory& traj, std::size_t component) {
  const std::string c = std::to_string(component + 1);
  PlotPanel panel{"Estimates of theta_" + c, "t", "theta_hat_" + c, {}};
  for (std::size_t i = 0; i < traj.agents.size(); ++i) {
    const auto& a = traj.agents[i];
    if (component >= a.n_theta) continue;
    PlotSeries s{"agent " + std::to_string(i + 1), traj.times, {}, false};
    for (std::size_t k = 0; k < traj.size(); ++k) {
      s.y.push_back(a.theta_hat_at(k)[component]);
    }
    panel.series.push_back(std::move(s));
  }
  // True values, one dashed line per distinct value.
  std::vector<double> seen;
  for (std::size_t i = 0; i < traj.true_theta.size() && !traj.times.empty(); ++i) {
    if (static_cast<Eigen::Index>(component) >= traj.true_theta[i].size()) continue;
    const double v = traj.true_theta[i][static_cast<Eigen::Index>(component)];
    if (std::find(seen.begin(), seen.end(), v) != seen.end()) continue;
    seen.push_back(v);
    panel.series.push_back({"true " + num(v),
                            {traj.times.front(), traj.times.back()},
                            {v, v},
                            true});
  }
  return panel;
}

}  // namespace distopt
