#include "uavris/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace uavris {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Frame {
  double x0, x1, y0, y1;        // world bounds
  double px0, px1, py0, py1;    // pixel box (py grows downward)
  double sx(double x) const { return px0 + (x - x0) / (x1 - x0) * (px1 - px0); }
  double sy(double y) const { return py1 - (y - y0) / (y1 - y0) * (py1 - py0); }
};

void expand(double& lo, double& hi, double v) {
  lo = std::min(lo, v);
  hi = std::max(hi, v);
}

}  // namespace

std::string solution_json(const ScenarioConfig& cfg, const SolutionState& state,
                          const IterationTrace& trace) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["units"] = {{"length", "m"},
                {"power", "W"},
                {"rate", "bits/s/Hz"},
                {"efficiency", "(bits/s/Hz)/W"},
                {"angle", "rad"}};
  j["config"] = nlohmann::json::parse(serialize_config(cfg));
  j["zeta"] = state.zeta;
  j["gamma"] = state.gamma;
  j["converged"] = trace.converged;
  j["outer_iterations"] = trace.records.size();

  nlohmann::json traj = nlohmann::json::array();
  for (const auto& p : state.trajectory.points) traj.push_back({p.x, p.y});
  j["trajectory"] = traj;

  nlohmann::json phases = nlohmann::json::array();
  for (int n = 1; n <= state.phases.num_slots; ++n) {
    nlohmann::json col = nlohmann::json::array();
    for (int m = 0; m < state.phases.num_elements; ++m) col.push_back(state.phases.at(m, n));
    phases.push_back(col);
  }
  j["phases"] = phases;

  nlohmann::json assoc = nlohmann::json::array();
  nlohmann::json power = nlohmann::json::array();
  for (int k = 0; k < state.allocation.num_users; ++k) {
    nlohmann::json arow = nlohmann::json::array();
    nlohmann::json prow = nlohmann::json::array();
    for (int n = 1; n <= state.allocation.num_slots; ++n) {
      arow.push_back(state.allocation.a(k, n));
      prow.push_back(state.allocation.p(k, n));
    }
    assoc.push_back(arow);
    power.push_back(prow);
  }
  j["association"] = assoc;
  j["power"] = power;

  nlohmann::json served = nlohmann::json::array();
  nlohmann::json silent = nlohmann::json::array();
  for (int n = 1; n <= state.allocation.num_slots; ++n) {
    const int k = state.allocation.served_user(n);
    served.push_back(k);
    if (k < 0) silent.push_back(n);
  }
  j["served_user_per_slot"] = served;
  j["silent_slots"] = silent;
  return j.dump(2);
}

std::string trajectory_svg(const ScenarioConfig& cfg, const Trajectory& initial,
                           const SolutionState& state) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;
  auto grow = [&](const Vec2& p) {
    expand(x0, x1, p.x);
    expand(y0, y1, p.y);
  };
  for (const auto& p : initial.points) grow(p);
  for (const auto& p : state.trajectory.points) grow(p);
  for (const auto& u : cfg.user_pos) grow(u);
  grow(cfg.bs_pos);
  grow(cfg.eve_pos);
  const double mx = std::max(0.08 * (x1 - x0), 10.0);
  const double my = std::max(0.08 * (y1 - y0), 10.0);
  Frame f{x0 - mx, x1 + mx, y0 - my, y1 + my, 60.0, 660.0, 40.0, 640.0};

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"700\" "
       "viewBox=\"0 0 720 700\">\n"
    << "<rect width=\"720\" height=\"700\" fill=\"white\"/>\n"
    << "<rect x=\"60\" y=\"40\" width=\"600\" height=\"600\" fill=\"none\" "
       "stroke=\"#888\"/>\n";
  s << "<text x=\"360\" y=\"680\" text-anchor=\"middle\" font-size=\"14\">x [m] ("
    << fmt(f.x0) << " to " << fmt(f.x1) << ")</text>\n";
  s << "<text x=\"20\" y=\"340\" text-anchor=\"middle\" font-size=\"14\" "
       "transform=\"rotate(-90 20 340)\">y [m] ("
    << fmt(f.y0) << " to " << fmt(f.y1) << ")</text>\n";

  auto polyline = [&](const std::vector<Vec2>& pts, const char* style) {
    s << "<polyline fill=\"none\" " << style << " points=\"";
    for (const auto& p : pts) s << fmt(f.sx(p.x)) << ',' << fmt(f.sy(p.y)) << ' ';
    s << "\"/>\n";
  };
  polyline(initial.points, "stroke=\"#999\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"");
  polyline(state.trajectory.points, "stroke=\"#1f5fbf\" stroke-width=\"2\"");

  for (int n = 1; n <= state.allocation.num_slots; ++n) {
    const Vec2 p = state.trajectory.at(n);
    const bool silent = state.allocation.served_user(n) < 0;
    s << "<circle cx=\"" << fmt(f.sx(p.x)) << "\" cy=\"" << fmt(f.sy(p.y)) << "\" r=\""
      << (silent ? 7 : 4) << "\" fill=\"" << (silent ? "black" : "#1f5fbf") << "\"/>\n";
  }

  for (size_t k = 0; k < cfg.user_pos.size(); ++k) {
    const Vec2& u = cfg.user_pos[k];
    s << "<circle cx=\"" << fmt(f.sx(u.x)) << "\" cy=\"" << fmt(f.sy(u.y))
      << "\" r=\"6\" fill=\"#2a8f2a\"/>\n";
    s << "<text x=\"" << fmt(f.sx(u.x) + 9) << "\" y=\"" << fmt(f.sy(u.y) - 6)
      << "\" font-size=\"13\">U" << (k + 1) << "</text>\n";
  }
  s << "<rect x=\"" << fmt(f.sx(cfg.bs_pos.x) - 6) << "\" y=\"" << fmt(f.sy(cfg.bs_pos.y) - 6)
    << "\" width=\"12\" height=\"12\" fill=\"#444\"/>\n"
    << "<text x=\"" << fmt(f.sx(cfg.bs_pos.x) + 9) << "\" y=\"" << fmt(f.sy(cfg.bs_pos.y) - 6)
    << "\" font-size=\"13\">BS</text>\n";
  const double ex = f.sx(cfg.eve_pos.x), ey = f.sy(cfg.eve_pos.y);
  s << "<path d=\"M" << fmt(ex - 6) << ' ' << fmt(ey - 6) << " L" << fmt(ex + 6) << ' '
    << fmt(ey + 6) << " M" << fmt(ex - 6) << ' ' << fmt(ey + 6) << " L" << fmt(ex + 6) << ' '
    << fmt(ey - 6) << "\" stroke=\"#c22\" stroke-width=\"3\"/>\n"
    << "<text x=\"" << fmt(ex + 9) << "\" y=\"" << fmt(ey - 6)
    << "\" font-size=\"13\" fill=\"#c22\">Eve</text>\n";

  s << "<text x=\"70\" y=\"26\" font-size=\"13\" fill=\"#999\">dashed: initial path</text>\n"
    << "<text x=\"230\" y=\"26\" font-size=\"13\" fill=\"#1f5fbf\">solid: optimized "
       "path</text>\n"
    << "<text x=\"420\" y=\"26\" font-size=\"13\">black: silent slot</text>\n";
  s << "</svg>\n";
  return s.str();
}

namespace {

std::string chart(const std::string& x_label, const std::string& y_label,
                  const std::vector<Series>& series) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;
  for (const auto& ser : series) {
    for (double v : ser.x) expand(x0, x1, v);
    for (double v : ser.y) expand(y0, y1, v);
  }
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) y1 = y0 + std::max(1e-300, std::abs(y0));
  const double pad = 0.05 * (y1 - y0);
  Frame f{x0, x1, y0 - pad, y1 + pad, 80.0, 680.0, 40.0, 560.0};

  static const char* colors[] = {"#1f5fbf", "#c22222", "#2a8f2a", "#b8860b", "#7733aa",
                                 "#00777a"};
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"620\" "
       "viewBox=\"0 0 720 620\">\n"
    << "<rect width=\"720\" height=\"620\" fill=\"white\"/>\n"
    << "<rect x=\"80\" y=\"40\" width=\"600\" height=\"520\" fill=\"none\" "
       "stroke=\"#888\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double yv = f.y0 + (f.y1 - f.y0) * i / 4.0;
    const double py = f.sy(yv);
    s << "<line x1=\"80\" y1=\"" << fmt(py) << "\" x2=\"680\" y2=\"" << fmt(py)
      << "\" stroke=\"#eee\"/>\n"
      << "<text x=\"74\" y=\"" << fmt(py + 4) << "\" text-anchor=\"end\" font-size=\"12\">"
      << fmt(yv) << "</text>\n";
    const double xv = f.x0 + (f.x1 - f.x0) * i / 4.0;
    const double px = f.sx(xv);
    s << "<text x=\"" << fmt(px) << "\" y=\"578\" text-anchor=\"middle\" font-size=\"12\">"
      << fmt(xv) << "</text>\n";
  }
  s << "<text x=\"380\" y=\"604\" text-anchor=\"middle\" font-size=\"14\">" << x_label
    << "</text>\n"
    << "<text x=\"20\" y=\"300\" text-anchor=\"middle\" font-size=\"14\" "
       "transform=\"rotate(-90 20 300)\">"
    << y_label << "</text>\n";

  for (size_t i = 0; i < series.size(); ++i) {
    const char* color = colors[i % 6];
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (size_t j = 0; j < series[i].x.size(); ++j)
      s << fmt(f.sx(series[i].x[j])) << ',' << fmt(f.sy(series[i].y[j])) << ' ';
    s << "\"/>\n";
    for (size_t j = 0; j < series[i].x.size(); ++j)
      s << "<circle cx=\"" << fmt(f.sx(series[i].x[j])) << "\" cy=\""
        << fmt(f.sy(series[i].y[j])) << "\" r=\"3.5\" fill=\"" << color << "\"/>\n";
    s << "<text x=\"96\" y=\"" << fmt(56.0 + 18.0 * static_cast<double>(i))
      << "\" font-size=\"13\" fill=\"" << color << "\">" << series[i].label << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace

std::string convergence_svg(const std::vector<Series>& series) {
  return chart("outer iteration", "secrecy energy efficiency [(bits/s/Hz)/W]", series);
}

std::string line_plot_svg(const std::string& x_label, const std::string& y_label,
                          const std::vector<Series>& series) {
  return chart(x_label, y_label, series);
}

}  // namespace uavris
