#pragma once

#include <string>
#include <vector>

#include "oscal/metrics.hpp"

namespace oscal {

struct DiagramOptions {
  int width = 480;
  int height = 420;
  std::string title;  // drawn above the plot when non-empty
};

struct DiagramRect {
  double x, y, w, h;  // SVG user units, y grows downward
};

/// Pixel geometry of a reliability diagram, exposed so tests can check the
/// rendered bars against the diagonal without parsing XML.
struct DiagramLayout {
  DiagramRect plot;                 // plot area
  std::vector<DiagramRect> bars;    // one per nonempty bin: accuracy height
  std::vector<DiagramRect> gaps;    // |accuracy - avg_conf| shading
  double diag_x0, diag_y0, diag_x1, diag_y1;
  double x_of(double confidence) const;
  double y_of(double accuracy) const;
};

DiagramLayout diagram_layout(const ReliabilityTable& table, const DiagramOptions& opt);

/// Deterministic text output: accuracy bars, the perfect-calibration
/// diagonal, and shaded confidence/accuracy gaps.
std::string render_reliability_svg(const ReliabilityTable& table,
                                   const DiagramOptions& opt = {});

}  // namespace oscal
