#include <cmath>
#include <fmt/format.h>

#include "dirbr/cli.hpp"

namespace dirbr::cli {
namespace {

constexpr double kHalfSqrt3 = 0.86602540378443864676;

std::string xml_escape(const std::string& s) {
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

}  // namespace

TernaryPoint ternary_point(const std::array<double, 3>& composition) {
  double total = 0.0;
  for (double v : composition) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw DataError(fmt::format("composition part {} is negative or not finite", v));
    }
    total += v;
  }
  if (!(total > 0.0)) throw DataError("composition parts sum to zero");
  const double y2 = composition[1] / total;
  const double y3 = composition[2] / total;
  return {y2 + 0.5 * y3, kHalfSqrt3 * y3};
}

std::string ternary_svg(const std::vector<std::array<double, 3>>& rows,
                        const std::array<std::string, 3>& labels) {
  // Triangle side is `side` pixels; SVG y grows downward so plot y is flipped.
  constexpr double side = 400.0;
  constexpr double margin = 60.0;
  const double height = kHalfSqrt3 * side;
  const auto px = [&](TernaryPoint p) {
    return std::pair{margin + p.x * side, margin + height - p.y * side};
  };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{1:.0f}\" "
      "viewBox=\"0 0 {0:.0f} {1:.0f}\">\n",
      side + 2 * margin, height + 2 * margin);
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  const auto [ax, ay] = px({0.0, 0.0});
  const auto [bx, by] = px({1.0, 0.0});
  const auto [cx, cy] = px({0.5, kHalfSqrt3});
  svg += fmt::format(
      "<polygon points=\"{:.3f},{:.3f} {:.3f},{:.3f} {:.3f},{:.3f}\" fill=\"none\" "
      "stroke=\"black\" stroke-width=\"1.5\"/>\n",
      ax, ay, bx, by, cx, cy);

  // Light grid at 0.2 steps, parallel to each side.
  svg += "<g stroke=\"#cccccc\" stroke-width=\"0.5\">\n";
  for (int k = 1; k < 5; ++k) {
    const double t = 0.2 * k;
    const std::array<std::pair<std::array<double, 3>, std::array<double, 3>>, 3> lines = {{
        {{t, 1 - t, 0}, {t, 0, 1 - t}},
        {{1 - t, t, 0}, {0, t, 1 - t}},
        {{1 - t, 0, t}, {0, 1 - t, t}},
    }};
    for (const auto& [from, to] : lines) {
      const auto [x1, y1] = px(ternary_point(from));
      const auto [x2, y2] = px(ternary_point(to));
      svg += fmt::format("<line x1=\"{:.3f}\" y1=\"{:.3f}\" x2=\"{:.3f}\" y2=\"{:.3f}\"/>\n", x1,
                         y1, x2, y2);
    }
  }
  svg += "</g>\n";

  svg += "<g font-family=\"sans-serif\" font-size=\"14\">\n";
  svg += fmt::format("<text x=\"{:.3f}\" y=\"{:.3f}\" text-anchor=\"end\">{}</text>\n", ax - 6,
                     ay + 18, xml_escape(labels[0]));
  svg += fmt::format("<text x=\"{:.3f}\" y=\"{:.3f}\" text-anchor=\"start\">{}</text>\n", bx + 6,
                     by + 18, xml_escape(labels[1]));
  svg += fmt::format("<text x=\"{:.3f}\" y=\"{:.3f}\" text-anchor=\"middle\">{}</text>\n", cx,
                     cy - 10, xml_escape(labels[2]));
  svg += "</g>\n";

  svg += "<g fill=\"#1f77b4\" fill-opacity=\"0.8\">\n";
  for (const auto& row : rows) {
    const auto [x, y] = px(ternary_point(row));
    svg += fmt::format("<circle cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"3.5\"/>\n", x, y);
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

}  // namespace dirbr::cli
