#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sprec/harness.hpp"
#include "sprec/theory.hpp"

namespace sprec {

struct PlotPanel {
  std::string title;
  std::string filename;
  std::string svg;
};

struct PlotDocument {
  std::vector<PlotPanel> panels;  // one per (n, snr, mar, estimator)
  std::string sheet_svg;          // all panels side by side
  std::string index_html;
};

// Success-rate heatmaps (x = k, y = m, fixed 0..1 color scale) with the
// requested threshold curves drawn on top. Cells absent from the table, or
// not "ok", are painted in a separate hole color.
PlotDocument overlay_curves(std::span<const CellResult> results,
                            std::span<const CurveKind> curves);

// Writes every panel, sheet.svg and index.html into `dir`.
void write_plot(const PlotDocument& doc, const std::filesystem::path& dir);

inline constexpr const char* kHoleColor = "#ff00ff";

}  // namespace sprec
