// SPDX-License-Identifier: Apache-2.0
#include "oddkit/render.hpp"

#include "oddkit/lexer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

namespace oddkit {

namespace {

constexpr std::array<const char*, 6> kNodeColors{"#1f4e79", "#7f3f98", "#b8860b",
                                                 "#2e7d32", "#8b0000", "#455a64"};

const char* category_color(CategoryLabel c) {
  switch (c) {
    case CategoryLabel::Nominal: return "#2e7d32";
    case CategoryLabel::EdgeCase: return "#1565c0";
    case CategoryLabel::FeasibleCornerCase: return "#6a1b9a";
    case CategoryLabel::InfeasibleCornerCase: return "#c62828";
    case CategoryLabel::Outlier: return "#ef6c00";
    case CategoryLabel::Inlier: return "#00838f";
    case CategoryLabel::Novelty: return "#ad1457";
  }
  return "#000000";
}

std::string num(double v) { return format_canonical(std::round(v * 100) / 100); }

std::string escape(std::string_view s) {
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

/// Member vertices of a 2D convex polytope in counter-clockwise order.
std::vector<Eigen::Vector2d> ordered(const ConvexPolytope& m) {
  std::vector<Eigen::Vector2d> pts;
  for (Eigen::Index c = 0; c < m.vertices.cols(); ++c) pts.emplace_back(m.vertices.col(c));
  if (pts.empty()) return pts;
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  for (const auto& p : pts) center += p;
  center /= double(pts.size());
  std::sort(pts.begin(), pts.end(), [&](const auto& a, const auto& b) {
    return std::atan2(a(1) - center(1), a(0) - center(0)) <
           std::atan2(b(1) - center(1), b(0) - center(0));
  });
  return pts;
}

std::vector<std::vector<Eigen::Vector2d>> loops(const OddNode& node) {
  std::vector<std::vector<Eigen::Vector2d>> out;
  if (const auto* poly = std::get_if<Polygon2D>(&node.region)) {
    out.emplace_back();
    for (Eigen::Index c = 0; c < poly->vertices.cols(); ++c) out.back().emplace_back(poly->vertices.col(c));
  } else {
    for (const auto& m : std::get<PolytopeUnion>(node.region).members) out.push_back(ordered(m));
  }
  return out;
}

}  // namespace

std::string render_svg(const SpecDocument& doc, const std::vector<std::string>& names,
                       const Dataset* data, const std::vector<RowLabel>* labels,
                       const RenderOptions& options) {
  std::vector<const OddNode*> nodes;
  if (names.empty()) {
    for (const auto& n : doc.nodes) nodes.push_back(&n);
  } else {
    for (const auto& name : names) {
      const OddNode* n = doc.find(name);
      if (!n) throw RenderError("unknown node '" + name + "'");
      nodes.push_back(n);
    }
  }
  if (nodes.empty()) throw RenderError("nothing to render");
  for (const OddNode* n : nodes) {
    if (n->dimension() != 2)
      throw RenderError("node '" + n->name + "' has " + std::to_string(n->dimension()) +
                        " parameters; only 2D nodes can be rendered");
    if (n->parameters[0].name != nodes[0]->parameters[0].name ||
        n->parameters[1].name != nodes[0]->parameters[1].name)
      throw RenderError("node '" + n->name + "' does not share the axes of '" + nodes[0]->name + "'");
  }
  const std::string xname = nodes[0]->parameters[0].name, yname = nodes[0]->parameters[1].name;
  if (labels && (!data || labels->size() != data->size()))
    throw RenderError("labels do not match the dataset");

  // Plot bounds: every node box and every point.
  Eigen::Vector2d lo = Eigen::Vector2d::Constant(INFINITY), hi = Eigen::Vector2d::Constant(-INFINITY);
  auto grow = [&](double x, double y) {
    lo = lo.cwiseMin(Eigen::Vector2d(x, y));
    hi = hi.cwiseMax(Eigen::Vector2d(x, y));
  };
  for (const OddNode* n : nodes) {
    grow(n->parameters[0].range.lo, n->parameters[1].range.lo);
    grow(n->parameters[0].range.hi, n->parameters[1].range.hi);
  }
  std::vector<Eigen::Vector2d> points;
  if (data) {
    for (const auto& p : data->rows) {
      const auto x = p.values.find(xname), y = p.values.find(yname);
      if (x == p.values.end() || y == p.values.end())
        throw RenderError("a data row lacks '" + xname + "' or '" + yname + "'");
      points.emplace_back(x->second, y->second);
      grow(x->second, y->second);
    }
  }
  Eigen::Vector2d span = (hi - lo).cwiseMax(1e-12);
  lo -= 0.05 * span;
  hi += 0.05 * span;
  span = hi - lo;

  const double margin = 60, legend_w = 190;
  const double pw = options.width - 2 * margin - legend_w, ph = options.height - 2 * margin;
  auto sx = [&](double x) { return margin + (x - lo(0)) / span(0) * pw; };
  auto sy = [&](double y) { return margin + ph - (y - lo(1)) / span(1) * ph; };

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(options.width) + "\" height=\"" +
       num(options.height) + "\" viewBox=\"0 0 " + num(options.width) + " " + num(options.height) +
       "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  if (!options.title.empty())
    s += "  <title>" + escape(options.title) + "</title>\n";
  s += "  <rect class=\"plot-area\" x=\"" + num(margin) + "\" y=\"" + num(margin) + "\" width=\"" +
       num(pw) + "\" height=\"" + num(ph) + "\" fill=\"#ffffff\" stroke=\"#999999\"/>\n";

  // Axes with five ticks each.
  s += "  <g class=\"axes\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = lo(0) + span(0) * i / 4, yv = lo(1) + span(1) * i / 4;
    s += "    <text x=\"" + num(sx(xv)) + "\" y=\"" + num(margin + ph + 18) +
         "\" text-anchor=\"middle\">" + format_canonical(std::round(xv * 1000) / 1000) + "</text>\n";
    s += "    <text x=\"" + num(margin - 6) + "\" y=\"" + num(sy(yv) + 4) +
         "\" text-anchor=\"end\">" + format_canonical(std::round(yv)) + "</text>\n";
  }
  s += "    <text class=\"axis-label\" x=\"" + num(margin + pw / 2) + "\" y=\"" +
       num(margin + ph + 40) + "\" text-anchor=\"middle\">" + escape(xname) + "</text>\n";
  s += "    <text class=\"axis-label\" x=\"16\" y=\"" + num(margin + ph / 2) +
       "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " + num(margin + ph / 2) + ")\">" +
       escape(yname) + "</text>\n";
  s += "  </g>\n";

  s += "  <g class=\"regions\">\n";
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const OddNode& n = *nodes[i];
    std::string d;
    for (const auto& loop : loops(n)) {
      for (std::size_t k = 0; k < loop.size(); ++k)
        d += (k ? " L" : (d.empty() ? "M" : " M")) + num(sx(loop[k](0))) + "," + num(sy(loop[k](1)));
      d += " Z";
    }
    s += "    <path class=\"region\" data-node=\"" + escape(n.name) + "\" data-level=\"" +
         std::string(to_string(n.level)) + "\" d=\"" + d + "\" fill=\"" +
         kNodeColors[i % kNodeColors.size()] + "\" fill-opacity=\"0.08\" stroke=\"" +
         kNodeColors[i % kNodeColors.size()] + "\" stroke-width=\"1.5\"" +
         (n.level == OddLevel::mlm_odd ? " stroke-dasharray=\"6 3\"" : "") + "/>\n";
  }
  s += "  </g>\n";

  std::set<CategoryLabel> present;
  if (data) {
    s += "  <g class=\"points\">\n";
    for (std::size_t r = 0; r < points.size(); ++r) {
      std::string cls = "point";
      std::string fill = "#000000";
      if (labels) {
        const CategoryLabel c = (*labels)[r].category.label;
        present.insert(c);
        cls += " cat-" + std::string(to_string(c));
        fill = category_color(c);
      }
      s += "    <circle class=\"" + cls + "\" data-row=\"" + std::to_string(r) + "\" cx=\"" +
           num(sx(points[r](0))) + "\" cy=\"" + num(sy(points[r](1))) + "\" r=\"4\" fill=\"" + fill +
           "\" stroke=\"#000000\" stroke-width=\"0.5\"/>\n";
    }
    s += "  </g>\n";
  }

  s += "  <g class=\"legend\">\n";
  double ly = margin + 10;
  const double lx = options.width - legend_w + 10;
  for (std::size_t i = 0; i < nodes.size(); ++i, ly += 18) {
    s += "    <g class=\"legend-entry legend-region\" data-node=\"" + escape(nodes[i]->name) +
         "\"><rect x=\"" + num(lx) + "\" y=\"" + num(ly - 9) + "\" width=\"14\" height=\"10\" fill=\"" +
         kNodeColors[i % kNodeColors.size()] + "\" fill-opacity=\"0.3\"/><text x=\"" + num(lx + 20) +
         "\" y=\"" + num(ly) + "\">" + escape(nodes[i]->name) + "</text></g>\n";
  }
  ly += 8;
  for (auto c : kAllCategories) {
    if (!present.count(c)) continue;
    s += "    <g class=\"legend-entry legend-category\" data-category=\"" + std::string(to_string(c)) +
         "\"><circle cx=\"" + num(lx + 7) + "\" cy=\"" + num(ly - 4) + "\" r=\"4\" fill=\"" +
         category_color(c) + "\"/><text x=\"" + num(lx + 20) + "\" y=\"" + num(ly) + "\">" +
         std::string(to_string(c)) + "</text></g>\n";
    ly += 18;
  }
  s += "  </g>\n";
  s += "</svg>\n";
  return s;
}

}  // namespace oddkit
