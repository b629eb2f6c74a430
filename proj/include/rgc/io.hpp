#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rgc/homology.hpp"
#include "rgc/limits.hpp"
#include "rgc/pointproc.hpp"
#include "rgc/stats.hpp"

namespace rgc {

// Full-precision number formatting shared by every writer.
inline std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream s;
  s.precision(17);
  s << x;
  return s.str();
}

inline void write_points_csv(std::ostream& out, const PointConfiguration& cfg) {
  const int d = cfg.dim();
  out << "id";
  for (int c = 0; c < d; ++c) out << ",x" << c;
  out << ",in_window\n";
  for (std::size_t i = 0; i < cfg.points().size(); ++i) {
    out << i;
    for (double x : cfg.points()[i]) out << ',' << fmt(x);
    out << ',' << (cfg.in_window(i) ? 1 : 0) << '\n';
  }
}

inline void write_estimates_csv(std::ostream& out, const std::vector<EstimateRecord>& recs) {
  out << "statistic,model,n,r,replicates,mean,variance,ci_half_width,seed,excluded\n";
  for (const auto& r : recs)
    out << r.statistic << ',' << r.model << ',' << fmt(r.n) << ',' << fmt(r.r) << ',' << r.replicates << ','
        << fmt(r.mean) << ',' << fmt(r.variance) << ',' << fmt(r.ci_half_width) << ',' << r.seed << ','
        << r.excluded << '\n';
}

inline void write_complex(std::ostream& out, const SimplicialComplex& k, ComplexKind kind,
                          const PointSet& pts) {
  std::vector<FilteredSimplex> s;
  for (int p = 0; p <= k.max_dim(); ++p)
    for (std::size_t i = 0; i < k.count(p); ++i) {
      FilteredSimplex x;
      x.dim = p;
      auto v = k.face(p, i);
      std::copy(v.begin(), v.end(), x.v.begin());
      x.birth = face_birth(kind, pts, v);
      s.push_back(x);
    }
  Filtration(k.vertex_count(), k.max_dim(), 0.0, std::move(s)).write(out);
}

// Horizontal bars grouped by dimension, birth-sorted within each group.
inline void write_barcode_svg(std::ostream& out, const Barcode& bc, const std::string& title = "") {
  const double width = 640, left = 40, right = 20, bar_h = 4, gap = 2, group_gap = 18;
  double tmax = 0;
  for (const auto& b : bc.bars) tmax = std::max(tmax, b.essential() ? b.birth : b.death);
  if (tmax <= 0) tmax = 1;
  const double span = tmax * 1.1;
  std::vector<std::vector<Bar>> groups(bc.max_dim + 1);
  for (const auto& b : bc.bars)
    if (b.dim <= bc.max_dim) groups[b.dim].push_back(b);
  for (auto& g : groups)
    std::sort(g.begin(), g.end(), [](const Bar& a, const Bar& b) { return a.birth < b.birth; });
  double height = 40;
  for (const auto& g : groups)
    if (!g.empty()) height += g.size() * (bar_h + gap) + group_gap;
  auto x = [&](double t) { return left + (width - left - right) * std::min(t, span) / span; };
  const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"};
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) out << "<text x=\"" << left << "\" y=\"16\" font-size=\"12\">" << title << "</text>\n";
  double y = 28;
  for (std::size_t p = 0; p < groups.size(); ++p) {
    if (groups[p].empty()) continue;
    out << "<text x=\"4\" y=\"" << y + 8 << "\" font-size=\"10\">H" << p << "</text>\n";
    for (const auto& b : groups[p]) {
      const double end = b.essential() ? span : b.death;
      out << "<rect x=\"" << fmt(x(b.birth)) << "\" y=\"" << y << "\" width=\""
          << fmt(std::max(0.5, x(end) - x(b.birth))) << "\" height=\"" << bar_h << "\" fill=\""
          << colours[p % 5] << "\"/>\n";
      y += bar_h + gap;
    }
    y += group_gap;
  }
  out << "<text x=\"" << left << "\" y=\"" << height - 4 << "\" font-size=\"10\">0</text>\n";
  out << "<text x=\"" << width - right - 30 << "\" y=\"" << height - 4 << "\" font-size=\"10\">" << fmt(span)
      << "</text>\n</svg>\n";
}

// Log-log scatter with error bars and the fitted line, slope annotated.
inline void write_loglog_svg(std::ostream& out, const std::vector<ScalingPoint>& pts, const LineFit& fit,
                             const std::string& title = "") {
  const double w = 480, h = 360, m = 50;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& p : pts) {
    if (p.r <= 0 || p.estimate <= 0) continue;
    x0 = std::min(x0, std::log(p.r));
    x1 = std::max(x1, std::log(p.r));
    const double lo = std::log(std::max(p.estimate - p.se, p.estimate * 1e-3));
    y0 = std::min(y0, lo);
    y1 = std::max(y1, std::log(p.estimate + p.se));
  }
  if (!(x1 > x0)) x1 = x0 + 1;
  if (!(y1 > y0)) y1 = y0 + 1;
  auto X = [&](double lx) { return m + (w - 2 * m) * (lx - x0) / (x1 - x0); };
  auto Y = [&](double ly) { return h - m - (h - 2 * m) * (ly - y0) / (y1 - y0); };
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << m << "\" y=\"20\" font-size=\"12\">" << title << " slope=" << fmt(fit.slope)
      << " se=" << fmt(fit.slope_se) << "</text>\n";
  out << "<line x1=\"" << X(x0) << "\" y1=\"" << Y(fit.intercept + fit.slope * x0) << "\" x2=\"" << X(x1)
      << "\" y2=\"" << Y(fit.intercept + fit.slope * x1) << "\" stroke=\"gray\"/>\n";
  for (const auto& p : pts) {
    if (p.r <= 0 || p.estimate <= 0) continue;
    const double cx = X(std::log(p.r)), cy = Y(std::log(p.estimate));
    const double lo = std::log(std::max(p.estimate - p.se, p.estimate * 1e-3));
    out << "<line x1=\"" << cx << "\" y1=\"" << Y(lo) << "\" x2=\"" << cx << "\" y2=\""
        << Y(std::log(p.estimate + p.se)) << "\" stroke=\"black\"/>\n";
    out << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
  }
  out << "<text x=\"" << m << "\" y=\"" << h - 10 << "\" font-size=\"10\">log r</text>\n</svg>\n";
}

// Reads coordinate rows. A header line is optional; when its first column is
// `id` (the layout written by write_points_csv) that column is skipped.
inline PointSet read_points_csv(std::istream& in, int d) {
  PointSet pts(d);
  std::string line;
  int lineno = 0;
  std::size_t skip = 0;
  std::vector<double> p(d);
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream s(line);
    for (std::string cell; std::getline(s, cell, ',');) cells.push_back(cell);
    if (lineno == 1 && !cells.empty()) {
      char* end = nullptr;
      std::strtod(cells[0].c_str(), &end);
      if (end == cells[0].c_str()) {
        skip = cells[0] == "id" ? 1 : 0;
        continue;
      }
    }
    require(cells.size() >= skip + d, errc::config,
            "points file line " + std::to_string(lineno) + ": expected " + std::to_string(d) + " coordinates");
    for (int c = 0; c < d; ++c) {
      const auto& cell = cells[skip + c];
      char* end = nullptr;
      p[c] = std::strtod(cell.c_str(), &end);
      require(end != cell.c_str(), errc::config,
              "points file line " + std::to_string(lineno) + ": '" + cell + "' is not a number");
    }
    pts.push_back(p);
  }
  return pts;
}

}  // namespace rgc
