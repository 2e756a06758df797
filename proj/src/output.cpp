#include "chatter/output.hpp"

#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace chatter {

namespace {

std::string num(double v) {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << std::setprecision(17) << v;
  return s.str();
}

std::string px(double v) {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << std::fixed << std::setprecision(2) << v;
  return s.str();
}

// A "nice" tick spacing giving roughly five intervals over the span.
double tick_step(double span) {
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (const double m : {1.0, 2.0, 5.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

}  // namespace

void write_lobes_csv(std::ostream& out, const std::vector<BoundaryBranch>& branches) {
  out << "variant,n,branch,beta,delta,h\n";
  std::map<int, int> per_n;
  for (const auto& br : branches) {
    const int idx = ++per_n[br.n];
    for (const auto& p : br.points) {
      out << to_string(br.variant) << ',' << br.n << ',' << idx << ',' << num(p.beta) << ','
          << num(p.delta) << ',' << num(p.h) << '\n';
    }
  }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "eta,x1,x2,x3,x4,k\n";
  const bool has_k = traj.k_values.size() == traj.eta.size();
  for (std::size_t i = 0; i < traj.eta.size(); ++i) {
    out << num(traj.eta[i]);
    const double f = traj.log_scale.empty() ? 1.0 : std::exp(traj.log_scale[i]);
    for (const double v : traj.states[i]) out << ',' << num(v * f);
    out << ',';
    if (has_k) out << num(traj.k_values[i]);
    out << '\n';
  }
}

void write_lobes_svg(std::ostream& out, const std::vector<BoundaryBranch>& branches,
                     const PlotAxes& ax, const std::string& title) {
  constexpr double W = 640, H = 480, L = 60, R = 20, T = 40, B = 50;
  const double pw = W - L - R;
  const double ph = H - T - B;
  auto sx = [&](double x) { return L + (x - ax.x_min) / (ax.x_max - ax.x_min) * pw; };
  auto sy = [&](double y) { return T + (ax.y_max - y) / (ax.y_max - ax.y_min) * ph; };
  auto in_view = [&](double x, double y) {
    return x >= ax.x_min && x <= ax.x_max && y >= ax.y_min && y <= ax.y_max;
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << title
      << "</text>\n";
  out << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  const double dx = tick_step(ax.x_max - ax.x_min);
  for (double x = std::ceil(ax.x_min / dx) * dx; x <= ax.x_max + 1e-9 * dx; x += dx) {
    out << "<line x1=\"" << px(sx(x)) << "\" y1=\"" << T + ph << "\" x2=\"" << px(sx(x))
        << "\" y2=\"" << T + ph + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << px(sx(x)) << "\" y=\"" << T + ph + 18
        << "\" text-anchor=\"middle\" font-size=\"11\">" << num(std::round(x / dx) * dx)
        << "</text>\n";
  }
  const double dy = tick_step(ax.y_max - ax.y_min);
  for (double y = std::ceil(ax.y_min / dy) * dy; y <= ax.y_max + 1e-9 * dy; y += dy) {
    out << "<line x1=\"" << L - 5 << "\" y1=\"" << px(sy(y)) << "\" x2=\"" << L << "\" y2=\""
        << px(sy(y)) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << L - 8 << "\" y=\"" << px(sy(y) + 4)
        << "\" text-anchor=\"end\" font-size=\"11\">" << num(std::round(y / dy) * dy)
        << "</text>\n";
  }
  out << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 12
      << "\" text-anchor=\"middle\" font-size=\"12\">delta</text>\n";
  out << "<text x=\"16\" y=\"" << T + ph / 2 << "\" font-size=\"12\" transform=\"rotate(-90 16 "
      << T + ph / 2 << ")\">h</text>\n";

  for (const auto& br : branches) {
    std::string pts;
    auto flush = [&]() {
      if (!pts.empty()) {
        out << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\""
            << pts << "\"/>\n";
        pts.clear();
      }
    };
    for (const auto& p : br.points) {
      if (!in_view(p.delta, p.h)) {
        flush();
        continue;
      }
      if (!pts.empty()) pts += ' ';
      pts += px(sx(p.delta)) + ',' + px(sy(p.h));
    }
    flush();
  }
  out << "</svg>\n";
}

}  // namespace chatter
