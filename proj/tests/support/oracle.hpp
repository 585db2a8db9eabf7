// SPDX-License-Identifier: Apache-2.0
//
// Independent reference implementations for tests. Nothing here calls the
// library's geometry: containment uses the winding number in long double,
// boundary distance is recomputed per segment, and polytopes are checked
// facet by facet in normalized coordinates.
#pragma once

#include "oddkit/classifier.hpp"
#include "oddkit/dataset.hpp"
#include "oddkit/dsl.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#ifndef ODDKIT_DATA_DIR
#error "ODDKIT_DATA_DIR must point at the data directory"
#endif

namespace oddkit::test {

inline std::string data_path(const std::string& name) {
  return std::string(ODDKIT_DATA_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline SpecDocument load_spec(const std::string& name) {
  ParseResult r = parse_spec(read_file(data_path(name)));
  if (!r.ok()) throw std::runtime_error("corpus spec " + name + " does not parse");
  return r.document;
}

inline Dataset load_dataset(const std::string& name, const OddNode& node) {
  DatasetParse r = parse_dataset(read_file(data_path(name)), node);
  if (!r.ok()) throw std::runtime_error("corpus dataset " + name + " does not parse");
  return r.dataset;
}

inline bool has(const std::vector<std::string>& items, const std::string& item) {
  return std::find(items.begin(), items.end(), item) != items.end();
}

inline DataPoint pt(double mach, double alt) {
  DataPoint p;
  p.values = {{"Mach", mach}, {"Alt", alt}};
  return p;
}

struct Normalized2 {
  long double x, y;
};

inline std::vector<Normalized2> normalized_loop(const OddNode& node) {
  const auto& poly = std::get<Polygon2D>(node.region);
  std::vector<Normalized2> out;
  for (Eigen::Index i = 0; i < poly.vertices.cols(); ++i) {
    out.push_back({(poly.vertices(0, i) - node.parameters[0].range.lo) /
                       static_cast<long double>(node.parameters[0].range.span()),
                   (poly.vertices(1, i) - node.parameters[1].range.lo) /
                       static_cast<long double>(node.parameters[1].range.span())});
  }
  return out;
}

inline Normalized2 normalized_point(const OddNode& node, double x, double y) {
  return {(x - node.parameters[0].range.lo) / static_cast<long double>(node.parameters[0].range.span()),
          (y - node.parameters[1].range.lo) / static_cast<long double>(node.parameters[1].range.span())};
}

/// Winding number of the loop around p; nonzero means inside.
inline int winding_number(const std::vector<Normalized2>& loop, Normalized2 p) {
  int wn = 0;
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Normalized2 a = loop[i], b = loop[(i + 1) % n];
    const long double side = (b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y);
    if (a.y <= p.y) {
      if (b.y > p.y && side > 0) ++wn;
    } else if (b.y <= p.y && side < 0) {
      --wn;
    }
  }
  return wn;
}

inline long double segment_distance(Normalized2 a, Normalized2 b, Normalized2 p) {
  const long double dx = b.x - a.x, dy = b.y - a.y;
  const long double len2 = dx * dx + dy * dy;
  long double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0;
  t = std::clamp<long double>(t, 0, 1);
  const long double ex = a.x + t * dx - p.x, ey = a.y + t * dy - p.y;
  return std::sqrt(ex * ex + ey * ey);
}

inline long double loop_distance(const std::vector<Normalized2>& loop, Normalized2 p) {
  long double best = std::numeric_limits<long double>::infinity();
  for (std::size_t i = 0; i < loop.size(); ++i)
    best = std::min(best, segment_distance(loop[i], loop[(i + 1) % loop.size()], p));
  return best;
}

/// Minimum normalized facet slack over the polytope; >= 0 inside. The
/// absolute value bounds the distance to the nearest facet plane.
inline long double polytope_slack(const OddNode& node, const ConvexPolytope& poly,
                                  const Eigen::VectorXd& x) {
  long double worst = std::numeric_limits<long double>::infinity();
  for (Eigen::Index r = 0; r < poly.normals.rows(); ++r) {
    long double dot = 0, norm2 = 0, shift = 0;
    for (std::size_t k = 0; k < node.dimension(); ++k) {
      const long double a = poly.normals(r, static_cast<Eigen::Index>(k));
      const long double span = node.parameters[k].range.span();
      const long double lo = node.parameters[k].range.lo;
      const long double u = (x(static_cast<Eigen::Index>(k)) - lo) / span;
      dot += a * span * u;
      norm2 += a * span * a * span;
      shift += a * lo;
    }
    worst = std::min(worst, (poly.offsets(r) - shift - dot) / std::sqrt(norm2));
  }
  return worst;
}

enum class OracleContainment { inside, outside, band };

/// Containment with a band of half-width `band` around the boundary in
/// which the oracle abstains.
inline OracleContainment oracle_locate(const OddNode& node, const Eigen::VectorXd& x,
                                       long double band) {
  if (const auto* poly = std::get_if<Polygon2D>(&node.region)) {
    (void)poly;
    const auto loop = normalized_loop(node);
    const Normalized2 p = normalized_point(node, x(0), x(1));
    if (loop_distance(loop, p) <= band) return OracleContainment::band;
    return winding_number(loop, p) != 0 ? OracleContainment::inside : OracleContainment::outside;
  }
  const auto& uni = std::get<PolytopeUnion>(node.region);
  bool near = false;
  for (const auto& m : uni.members) {
    const long double s = polytope_slack(node, m, x);
    if (s > band) return OracleContainment::inside;
    if (s >= -band) near = true;
  }
  return near ? OracleContainment::band : OracleContainment::outside;
}

inline bool oracle_inside(const OddNode& node, const Eigen::VectorXd& x, double tol = 1e-9) {
  return oracle_locate(node, x, tol) != OracleContainment::outside;
}

inline Eigen::VectorXd values_of(const DataPoint& p, const OddNode& node) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(node.dimension()));
  for (std::size_t k = 0; k < node.dimension(); ++k)
    x(static_cast<Eigen::Index>(k)) = p.values.at(node.parameters[k].name);
  return x;
}

inline std::size_t oracle_extremes(const OddNode& node, const Eigen::VectorXd& x, double tol) {
  std::size_t k = 0;
  for (std::size_t i = 0; i < node.dimension(); ++i) {
    const auto& r = node.parameters[i].range;
    const double v = x(static_cast<Eigen::Index>(i));
    const double band = tol * r.span();
    if (std::abs(v - r.lo) <= band || std::abs(v - r.hi) <= band) ++k;
  }
  return k;
}

/// Geometric category only: the decision table for points without
/// provenance or hidden values.
inline CategoryLabel oracle_geometric(const OddNode& node, const Eigen::VectorXd& x,
                                      double tol = 1e-9) {
  const std::size_t k = oracle_extremes(node, x, tol);
  if (oracle_inside(node, x, tol)) {
    if (k == 0) return CategoryLabel::Nominal;
    return k == 1 ? CategoryLabel::EdgeCase : CategoryLabel::FeasibleCornerCase;
  }
  return k >= 2 ? CategoryLabel::InfeasibleCornerCase : CategoryLabel::Outlier;
}

inline Kind oracle_kind(const Chain& chain, const DataPoint& p, bool sampled, double tol = 1e-9) {
  if (oracle_inside(chain.mlm, values_of(p, chain.mlm), tol)) return sampled ? Kind::InS : Kind::OutS;
  return oracle_inside(chain.mlc, values_of(p, chain.mlc), tol) ? Kind::OutMOD : Kind::OutCOD;
}

}  // namespace oddkit::test
