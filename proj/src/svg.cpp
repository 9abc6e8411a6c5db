#include <algorithm>
#include <cstdio>

#include "oscal/error.hpp"
#include "oscal/svg.hpp"

namespace oscal {
namespace {

constexpr double kMarginLeft = 52.0;
constexpr double kMarginRight = 16.0;
constexpr double kMarginTop = 30.0;
constexpr double kMarginBottom = 44.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

}  // namespace

double DiagramLayout::x_of(double confidence) const {
  return plot.x + confidence * plot.w;
}

double DiagramLayout::y_of(double accuracy) const {
  return plot.y + (1.0 - accuracy) * plot.h;
}

DiagramLayout diagram_layout(const ReliabilityTable& table, const DiagramOptions& opt) {
  if (table.bins.empty()) throw InvalidArgument("diagram: empty reliability table");
  if (opt.width < 120 || opt.height < 120)
    throw InvalidArgument("diagram: canvas too small (need >= 120x120)");

  DiagramLayout l;
  l.plot = {kMarginLeft, kMarginTop, opt.width - kMarginLeft - kMarginRight,
            opt.height - kMarginTop - kMarginBottom};
  l.diag_x0 = l.x_of(0.0);
  l.diag_y0 = l.y_of(0.0);
  l.diag_x1 = l.x_of(1.0);
  l.diag_y1 = l.y_of(1.0);

  for (const auto& b : table.bins) {
    if (b.count == 0) continue;
    const double x = l.x_of(b.lo);
    const double w = l.x_of(b.hi) - x;
    l.bars.push_back({x, l.y_of(b.accuracy), w, l.y_of(0.0) - l.y_of(b.accuracy)});
    const double top = std::max(b.accuracy, b.avg_conf);
    const double bottom = std::min(b.accuracy, b.avg_conf);
    if (top > bottom)
      l.gaps.push_back({x, l.y_of(top), w, l.y_of(bottom) - l.y_of(top)});
  }
  return l;
}

std::string render_reliability_svg(const ReliabilityTable& table,
                                   const DiagramOptions& opt) {
  const DiagramLayout l = diagram_layout(table, opt);

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(opt.width) + "\" height=\"" + std::to_string(opt.height) +
         "\" viewBox=\"0 0 " + std::to_string(opt.width) + " " +
         std::to_string(opt.height) + "\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(opt.width) +
         "\" height=\"" + std::to_string(opt.height) + "\" fill=\"white\"/>\n";

  // grid + tick labels every 0.2
  for (int t = 0; t <= 5; ++t) {
    const double f = t / 5.0;
    const double gx = l.x_of(f);
    const double gy = l.y_of(f);
    svg += "<line x1=\"" + num(gx) + "\" y1=\"" + num(l.y_of(0.0)) + "\" x2=\"" +
           num(gx) + "\" y2=\"" + num(l.y_of(1.0)) +
           "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg += "<line x1=\"" + num(l.x_of(0.0)) + "\" y1=\"" + num(gy) + "\" x2=\"" +
           num(l.x_of(1.0)) + "\" y2=\"" + num(gy) +
           "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + num(gx) + "\" y=\"" + num(l.y_of(0.0) + 16.0) +
           "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" +
           num(f) + "</text>\n";
    svg += "<text x=\"" + num(l.x_of(0.0) - 6.0) + "\" y=\"" + num(gy + 4.0) +
           "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" +
           num(f) + "</text>\n";
  }

  for (const auto& g : l.gaps)
    svg += "<rect class=\"gap\" x=\"" + num(g.x) + "\" y=\"" + num(g.y) +
           "\" width=\"" + num(g.w) + "\" height=\"" + num(g.h) +
           "\" fill=\"#d62728\" fill-opacity=\"0.35\"/>\n";
  for (const auto& b : l.bars)
    svg += "<rect class=\"bar\" x=\"" + num(b.x) + "\" y=\"" + num(b.y) +
           "\" width=\"" + num(b.w) + "\" height=\"" + num(b.h) +
           "\" fill=\"#4878a8\" fill-opacity=\"0.8\" stroke=\"#2b4a6f\" "
           "stroke-width=\"1\"/>\n";

  svg += "<line class=\"diagonal\" x1=\"" + num(l.diag_x0) + "\" y1=\"" +
         num(l.diag_y0) + "\" x2=\"" + num(l.diag_x1) + "\" y2=\"" + num(l.diag_y1) +
         "\" stroke=\"#444444\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\"/>\n";
  svg += "<rect x=\"" + num(l.plot.x) + "\" y=\"" + num(l.plot.y) + "\" width=\"" +
         num(l.plot.w) + "\" height=\"" + num(l.plot.h) +
         "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

  svg += "<text x=\"" + num(l.plot.x + l.plot.w / 2.0) + "\" y=\"" +
         num(l.y_of(0.0) + 34.0) +
         "\" font-family=\"sans-serif\" font-size=\"13\" "
         "text-anchor=\"middle\">confidence</text>\n";
  svg += "<text x=\"14\" y=\"" + num(l.plot.y + l.plot.h / 2.0) +
         "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
         "transform=\"rotate(-90 14 " + num(l.plot.y + l.plot.h / 2.0) +
         ")\">accuracy</text>\n";
  if (!opt.title.empty())
    svg += "<text x=\"" + num(l.plot.x + l.plot.w / 2.0) +
           "\" y=\"19\" font-family=\"sans-serif\" font-size=\"13\" "
           "text-anchor=\"middle\">" + xml_escape(opt.title) + "</text>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace oscal
