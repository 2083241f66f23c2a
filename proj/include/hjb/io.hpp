#pragma once

#include "hjb/baseline.hpp"
#include "hjb/rollout.hpp"
#include "hjb/trainer.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

namespace hjb {

namespace detail {
inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << std::setprecision(17);
  return out;
}
}  // namespace detail

// Stable interchange format: one row per grid point, columns
//   s, z0..z{d-1}, u0..u{a-1}, ell, c_hjt
inline void write_trajectory_csv(const std::string& path, const Vec& s_grid,
                                 const Mat& Z, const Mat& U, const Vec& ell,
                                 const Vec& c_hjt) {
  const int n = static_cast<int>(s_grid.size());
  if (Z.cols() != n || ell.size() != n || c_hjt.size() != n)
    throw ConfigError("trajectory CSV: column count mismatch");
  auto out = detail::open_out(path);
  out << "s";
  for (int i = 0; i < Z.rows(); ++i) out << ",z" << i;
  for (int i = 0; i < U.rows(); ++i) out << ",u" << i;
  out << ",ell,c_hjt\n";
  for (int k = 0; k < n; ++k) {
    out << s_grid[k];
    for (int i = 0; i < Z.rows(); ++i) out << ',' << Z(i, k);
    for (int i = 0; i < U.rows(); ++i)
      out << ',' << (k < U.cols() ? U(i, k) : 0.0);
    out << ',' << ell[k] << ',' << c_hjt[k] << '\n';
  }
}

inline void write_trajectory_csv(const std::string& path,
                                 const RolloutResult& r) {
  write_trajectory_csv(path, r.s_grid, r.Z, r.U, r.ell_path, r.c_path);
}

inline void write_trajectory_csv(const std::string& path,
                                 const BaselineResult& r) {
  write_trajectory_csv(path, r.s_grid, r.Z, r.U, r.ell_path,
                       Vec::Zero(r.s_grid.size()));
}

inline void write_train_log_csv(const std::string& path,
                                const std::vector<TrainLogRow>& log) {
  auto out = detail::open_out(path);
  out << "iter,lr,train_total,train_ell,train_G,train_c_hjt,train_c_hjfin,"
         "train_c_hjgrad,wall_ms,val_objective,val_ell,val_G,val_max_W,"
         "val_max_Q\n";
  for (const auto& r : log) {
    out << r.iter << ',' << r.lr << ',' << r.train_total << ',' << r.train.ell
        << ',' << r.train.G << ',' << r.train.c_hjt << ',' << r.train.c_hjfin
        << ',' << r.train.c_hjgrad << ',' << r.wall_ms;
    if (r.has_val)
      out << ',' << r.val.objective() << ',' << r.val.ell << ',' << r.val.G
          << ',' << r.val.max_W << ',' << r.val.max_Q;
    else
      out << ",,,,,";
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Minimal SVG line/scatter plots (hand-rolled; no plotting dependency).
// ---------------------------------------------------------------------------

struct SvgSeries {
  std::string label;
  std::string color = "#1f77b4";
  std::vector<double> x, y;
  bool points_only = false;
};

inline void write_svg_plot(const std::string& path,
                           const std::vector<SvgSeries>& series,
                           const std::string& title = "",
                           const std::string& xlabel = "",
                           const std::string& ylabel = "") {
  const double W = 640, H = 480, ml = 70, mr = 20, mt = 40, mb = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (xmin > xmax) { xmin = 0; xmax = 1; }
  if (ymin > ymax) { ymin = 0; ymax = 1; }
  if (xmax == xmin) { xmax = xmin + 1; }
  if (ymax == ymin) { ymax = ymin + 1; }
  auto px = [&](double x) {
    return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr);
  };
  auto py = [&](double y) {
    return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb);
  };

  auto out = detail::open_out(path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W
      << "' height='" << H << "'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n";
  // axes
  out << "<line x1='" << ml << "' y1='" << H - mb << "' x2='" << W - mr
      << "' y2='" << H - mb << "' stroke='black'/>\n"
      << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='"
      << H - mb << "' stroke='black'/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = xmin + t * (xmax - xmin) / 4;
    const double yv = ymin + t * (ymax - ymin) / 4;
    out << "<text x='" << px(xv) << "' y='" << H - mb + 18
        << "' font-size='11' text-anchor='middle'>" << std::setprecision(4)
        << xv << "</text>\n"
        << "<text x='" << ml - 6 << "' y='" << py(yv) + 4
        << "' font-size='11' text-anchor='end'>" << yv << "</text>\n"
        << std::setprecision(17);
  }
  if (!title.empty())
    out << "<text x='" << W / 2 << "' y='" << mt - 14
        << "' font-size='15' text-anchor='middle'>" << title << "</text>\n";
  if (!xlabel.empty())
    out << "<text x='" << W / 2 << "' y='" << H - 10
        << "' font-size='12' text-anchor='middle'>" << xlabel << "</text>\n";
  if (!ylabel.empty())
    out << "<text x='16' y='" << H / 2
        << "' font-size='12' text-anchor='middle' transform='rotate(-90 16 "
        << H / 2 << ")'>" << ylabel << "</text>\n";

  int li = 0;
  for (const auto& s : series) {
    if (!s.points_only && s.x.size() > 1) {
      out << "<polyline fill='none' stroke='" << s.color
          << "' stroke-width='1.5' points='";
      for (size_t i = 0; i < s.x.size(); ++i)
        out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
      out << "'/>\n";
    }
    for (size_t i = 0; i < s.x.size(); ++i)
      out << "<circle cx='" << px(s.x[i]) << "' cy='" << py(s.y[i])
          << "' r='2.5' fill='" << s.color << "'/>\n";
    if (!s.label.empty())
      out << "<text x='" << W - mr - 150 << "' y='" << mt + 16 * (li++)
          << "' font-size='12' fill='" << s.color << "'>" << s.label
          << "</text>\n";
  }
  out << "</svg>\n";
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
  auto out = detail::open_out(path);
  out << j.dump(1) << "\n";
}

}  // namespace hjb
