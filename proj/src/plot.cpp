#include "sprec/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "sprec/error.hpp"

namespace sprec {

namespace {

constexpr double kPlotW = 320, kPlotH = 320;
constexpr double kLeft = 56, kTop = 40, kRight = 80, kBottom = 48;
constexpr double kPanelW = kLeft + kPlotW + kRight;
constexpr double kPanelH = kTop + kPlotH + kBottom;

std::string color_for(double rate) {
  // Viridis, sampled at 0, .25, .5, .75, 1.
  static constexpr std::array<std::array<double, 3>, 5> stops{{
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
  const double t = std::clamp(rate, 0.0, 1.0) * 4.0;
  const int i = std::min(3, int(t));
  const double f = t - i;
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                int(std::lround(stops[i][0] + f * (stops[i + 1][0] - stops[i][0]))),
                int(std::lround(stops[i][1] + f * (stops[i + 1][1] - stops[i][1]))),
                int(std::lround(stops[i][2] + f * (stops[i + 1][2] - stops[i][2]))));
  return buf;
}

const char* curve_stroke(CurveKind kind) {
  switch (kind) {
    case CurveKind::ml_necessary: return "#000000";
    case CurveKind::mc_sufficient: return "#000000";
    case CurveKind::mc_highsnr: return "#d62728";
    case CurveKind::lasso: return "#ffffff";
    case CurveKind::capacity: return "#ff7f0e";
  }
  return "#000000";
}

const char* curve_dash(CurveKind kind) {
  switch (kind) {
    case CurveKind::mc_highsnr: return "6,3";
    case CurveKind::lasso: return "2,2";
    case CurveKind::capacity: return "8,2,2,2";
    default: return "none";
  }
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

struct PanelKey {
  Index n;
  double snr, mar;
  EstimatorKind est;
  auto operator<=>(const PanelKey&) const = default;
};

std::string file_token(double v) {
  std::string s = num(v);
  std::replace(s.begin(), s.end(), '.', 'p');
  return s;
}

std::string render_panel(const PanelKey& key, std::span<const CellResult> rows,
                         std::span<const CurveKind> curves) {
  std::set<Index> kset, mset;
  std::map<std::pair<Index, Index>, double> rate;
  for (const auto& r : rows) {
    kset.insert(r.cell.k);
    mset.insert(r.cell.m);
    if (r.status == CellStatus::ok && !std::isnan(r.success_rate))
      rate[{r.cell.k, r.cell.m}] = r.success_rate;
  }
  const std::vector<Index> ks(kset.begin(), kset.end());
  const std::vector<Index> ms(mset.begin(), mset.end());
  const double cw = kPlotW / double(ks.size());
  const double ch = kPlotH / double(ms.size());

  // Row i has m = ms[i] and is drawn bottom-up.
  auto row_center_y = [&](double row) { return kTop + kPlotH - (row + 0.5) * ch; };
  auto m_to_row = [&](double m) {
    if (ms.size() == 1) return m >= double(ms[0]) ? 0.0 : -1.0;
    auto it = std::lower_bound(ms.begin(), ms.end(), m,
                               [](Index a, double b) { return double(a) < b; });
    std::size_t hi = std::clamp<std::size_t>(it - ms.begin(), 1, ms.size() - 1);
    const double m0 = double(ms[hi - 1]), m1 = double(ms[hi]);
    return double(hi - 1) + (m - m0) / (m1 - m0);
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kPanelW
     << "\" height=\"" << kPanelH << "\" viewBox=\"0 0 " << kPanelW << " "
     << kPanelH << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kLeft + kPlotW / 2 << "\" y=\"20\" text-anchor=\"middle\" "
     << "font-size=\"13\">(" << num(key.snr) << ", " << num(key.mar) << ") "
     << to_string(key.est) << ", n=" << key.n << "</text>\n";
  os << "<defs><clipPath id=\"plotarea\"><rect x=\"" << kLeft << "\" y=\"" << kTop
     << "\" width=\"" << kPlotW << "\" height=\"" << kPlotH
     << "\"/></clipPath></defs>\n";

  for (std::size_t ki = 0; ki < ks.size(); ++ki) {
    for (std::size_t mi = 0; mi < ms.size(); ++mi) {
      const auto it = rate.find({ks[ki], ms[mi]});
      const std::string fill = it == rate.end() ? kHoleColor : color_for(it->second);
      os << "<rect class=\"" << (it == rate.end() ? "hole" : "cell") << "\" x=\""
         << num(kLeft + ki * cw) << "\" y=\""
         << num(kTop + kPlotH - (mi + 1) * ch) << "\" width=\"" << num(cw)
         << "\" height=\"" << num(ch) << "\" fill=\"" << fill << "\"";
      if (it != rate.end()) os << " data-rate=\"" << num(it->second) << "\"";
      os << "/>\n";
    }
  }
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kPlotW
     << "\" height=\"" << kPlotH << "\" fill=\"none\" stroke=\"black\"/>\n";

  // Axes.
  const std::size_t kstride = std::max<std::size_t>(1, ks.size() / 10);
  for (std::size_t ki = 0; ki < ks.size(); ki += kstride)
    os << "<text x=\"" << num(kLeft + (ki + 0.5) * cw) << "\" y=\""
       << kTop + kPlotH + 14 << "\" text-anchor=\"middle\">" << ks[ki] << "</text>\n";
  const std::size_t mstride = std::max<std::size_t>(1, ms.size() / 10);
  for (std::size_t mi = 0; mi < ms.size(); mi += mstride)
    os << "<text x=\"" << kLeft - 4 << "\" y=\"" << num(row_center_y(double(mi)) + 4)
       << "\" text-anchor=\"end\">" << ms[mi] << "</text>\n";
  os << "<text x=\"" << kLeft + kPlotW / 2 << "\" y=\"" << kPanelH - 12
     << "\" text-anchor=\"middle\">k</text>\n";
  os << "<text x=\"14\" y=\"" << kTop + kPlotH / 2 << "\" text-anchor=\"middle\" "
     << "transform=\"rotate(-90 14 " << kTop + kPlotH / 2 << ")\">m</text>\n";

  // Threshold curves.
  for (CurveKind kind : curves) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
      if (!curve_defined(kind, key.n, ks[ki])) continue;
      const double mar = ks[ki] == 1 ? 1.0 : key.mar;
      const double m = threshold_m(kind, key.n, ks[ki], key.snr, mar);
      pts.emplace_back(kLeft + (ki + 0.5) * cw, row_center_y(m_to_row(m)));
    }
    if (pts.empty()) continue;
    os << "<polyline class=\"curve\" data-kind=\"" << to_string(kind)
       << "\" clip-path=\"url(#plotarea)\" fill=\"none\" stroke=\""
       << curve_stroke(kind) << "\" stroke-width=\"2\" stroke-dasharray=\""
       << curve_dash(kind) << "\" points=\"";
    for (const auto& [x, y] : pts) os << num(x) << "," << num(y) << " ";
    os << "\"/>\n";
  }

  // Color bar.
  const double bx = kLeft + kPlotW + 16;
  for (int i = 0; i < 50; ++i)
    os << "<rect x=\"" << bx << "\" y=\"" << num(kTop + kPlotH - (i + 1) * kPlotH / 50)
       << "\" width=\"14\" height=\"" << num(kPlotH / 50 + 0.5) << "\" fill=\""
       << color_for((i + 0.5) / 50) << "\"/>\n";
  for (double v : {0.0, 0.5, 1.0})
    os << "<text x=\"" << bx + 18 << "\" y=\"" << num(kTop + kPlotH - v * kPlotH + 4)
       << "\">" << num(v) << "</text>\n";
  os << "<rect x=\"" << bx << "\" y=\"" << kTop + kPlotH + 10
     << "\" width=\"14\" height=\"10\" fill=\"" << kHoleColor << "\"/>"
     << "<text x=\"" << bx + 18 << "\" y=\"" << kTop + kPlotH + 19
     << "\">missing</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace

PlotDocument overlay_curves(std::span<const CellResult> results,
                            std::span<const CurveKind> curves) {
  std::map<PanelKey, std::vector<CellResult>> groups;
  for (const auto& r : results)
    groups[{r.cell.n, r.cell.snr, r.cell.mar, r.cell.estimator}].push_back(r);

  PlotDocument doc;
  for (const auto& [key, rows] : groups) {
    PlotPanel panel;
    panel.title = "(" + num(key.snr) + ", " + num(key.mar) + ") " +
                  std::string(to_string(key.est)) + " n=" + std::to_string(key.n);
    panel.filename = "panel_" + std::string(to_string(key.est)) + "_n" +
                     std::to_string(key.n) + "_snr" + file_token(key.snr) +
                     "_mar" + file_token(key.mar) + ".svg";
    panel.svg = render_panel(key, rows, curves);
    doc.panels.push_back(std::move(panel));
  }

  const std::size_t cols = std::min<std::size_t>(3, std::max<std::size_t>(1, doc.panels.size()));
  const std::size_t rows = (doc.panels.size() + cols - 1) / cols;
  std::ostringstream sheet;
  sheet << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << cols * kPanelW
        << "\" height=\"" << std::max<std::size_t>(1, rows) * kPanelH << "\">\n";
  for (std::size_t i = 0; i < doc.panels.size(); ++i) {
    std::string inner = doc.panels[i].svg;
    // Panels share the clip id; make it unique inside the sheet.
    const std::string id = "plotarea" + std::to_string(i);
    for (std::size_t p; (p = inner.find("plotarea\"")) != std::string::npos;)
      inner.replace(p, 9, id + "\"");
    for (std::size_t p; (p = inner.find("#plotarea)")) != std::string::npos;)
      inner.replace(p, 10, "#" + id + ")");
    sheet << "<g transform=\"translate(" << (i % cols) * kPanelW << ","
          << (i / cols) * kPanelH << ")\">\n" << inner << "</g>\n";
  }
  sheet << "</svg>\n";
  doc.sheet_svg = sheet.str();

  std::ostringstream html;
  html << "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>Support "
          "recovery success rates</title></head><body>\n<h1>Success rate "
          "heatmaps</h1>\n<p><img src=\"sheet.svg\" alt=\"all panels\"></p>\n<ul>\n";
  for (const auto& p : doc.panels)
    html << "<li><a href=\"" << p.filename << "\">" << p.title << "</a></li>\n";
  html << "</ul>\n</body></html>\n";
  doc.index_html = html.str();
  return doc;
}

void write_plot(const PlotDocument& doc, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto put = [&](const std::string& name, const std::string& body) {
    std::ofstream out(dir / name);
    if (!out) throw std::runtime_error("plot: cannot write " + (dir / name).string());
    out << body;
  };
  for (const auto& p : doc.panels) put(p.filename, p.svg);
  put("sheet.svg", doc.sheet_svg);
  put("index.html", doc.index_html);
}

}  // namespace sprec
