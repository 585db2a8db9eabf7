// SPDX-License-Identifier: Apache-2.0
#include "oddkit/model.hpp"

#include "oddkit/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>

namespace oddkit {

namespace {

template <typename E, std::size_t N>
bool lookup(std::string_view text, const std::array<std::pair<std::string_view, E>, N>& table,
            E& out) {
  for (const auto& [name, value] : table) {
    if (name == text) {
      out = value;
      return true;
    }
  }
  return false;
}

constexpr std::array<std::pair<std::string_view, DimensionClass>, 3> kDimensionClasses{{
    {"environmental", DimensionClass::environmental},
    {"operational", DimensionClass::operational},
    {"system_health", DimensionClass::system_health},
}};
constexpr std::array<std::pair<std::string_view, OddLevel>, 4> kLevels{{
    {"system_od", OddLevel::system_od},
    {"subsystem_odd", OddLevel::subsystem_odd},
    {"mlc_odd", OddLevel::mlc_odd},
    {"mlm_odd", OddLevel::mlm_odd},
}};
constexpr std::array<std::pair<std::string_view, OddVariant>, 2> kVariants{{
    {"as_specified", OddVariant::as_specified},
    {"as_operated", OddVariant::as_operated},
}};

template <typename E, std::size_t N>
std::string_view name_of(E value, const std::array<std::pair<std::string_view, E>, N>& table) {
  for (const auto& [name, v] : table)
    if (v == value) return name;
  return "?";
}

Eigen::Matrix2Xd normalized_loop(const OddNode& node, const Polygon2D& poly) {
  const Eigen::Vector2d lo = node.box_lo().head<2>();
  const Eigen::Vector2d span = node.box_span().head<2>();
  return (poly.vertices.colwise() - lo).array().colwise() / span.array();
}

double min_slack(const ConvexPolytope& normalized, const Eigen::VectorXd& u) {
  if (normalized.normals.rows() == 0) return std::numeric_limits<double>::infinity();
  return geom::facet_slack(normalized.normals, normalized.offsets, u).minCoeff();
}

}  // namespace

bool operator==(const Polygon2D& a, const Polygon2D& b) {
  return a.vertices.cols() == b.vertices.cols() && a.vertices == b.vertices;
}

bool operator==(const ConvexPolytope& a, const ConvexPolytope& b) {
  auto same = [](const auto& x, const auto& y) {
    return x.rows() == y.rows() && x.cols() == y.cols() && x == y;
  };
  return same(a.normals, b.normals) && same(a.offsets, b.offsets) &&
         same(a.vertices, b.vertices);
}

bool operator==(const PolytopeUnion& a, const PolytopeUnion& b) { return a.members == b.members; }

std::string_view to_string(DimensionClass c) { return name_of(c, kDimensionClasses); }
std::string_view to_string(OddLevel l) { return name_of(l, kLevels); }
std::string_view to_string(OddVariant v) { return name_of(v, kVariants); }

std::string_view to_string(DistributionKind k) {
  switch (k) {
    case DistributionKind::uniform: return "uniform";
    case DistributionKind::triangular: return "triangular";
    case DistributionKind::empirical_histogram: return "histogram";
  }
  return "?";
}

std::string_view to_string(Containment c) {
  switch (c) {
    case Containment::inside: return "inside";
    case Containment::on_boundary: return "on_boundary";
    case Containment::outside: return "outside";
  }
  return "?";
}

bool parse_enum(std::string_view text, DimensionClass& out) {
  return lookup(text, kDimensionClasses, out);
}
bool parse_enum(std::string_view text, OddLevel& out) { return lookup(text, kLevels, out); }
bool parse_enum(std::string_view text, OddVariant& out) { return lookup(text, kVariants, out); }

std::optional<std::size_t> OddNode::index_of(std::string_view param) const {
  for (std::size_t i = 0; i < parameters.size(); ++i)
    if (parameters[i].name == param) return i;
  return std::nullopt;
}

const Transform* OddNode::preprocessing_for(std::string_view param) const {
  for (const auto& t : preprocessing)
    if (t.parameter == param) return &t;
  return nullptr;
}

Eigen::VectorXd OddNode::box_lo() const {
  Eigen::VectorXd lo(parameters.size());
  for (std::size_t i = 0; i < parameters.size(); ++i) lo(Eigen::Index(i)) = parameters[i].range.lo;
  return lo;
}

Eigen::VectorXd OddNode::box_span() const {
  Eigen::VectorXd span(parameters.size());
  for (std::size_t i = 0; i < parameters.size(); ++i)
    span(Eigen::Index(i)) = parameters[i].range.span();
  return span;
}

Eigen::VectorXd coordinates(const DataPoint& p, const OddNode& node) {
  Eigen::VectorXd x(node.parameters.size());
  for (std::size_t i = 0; i < node.parameters.size(); ++i) {
    const auto it = p.values.find(node.parameters[i].name);
    if (it == p.values.end()) throw MissingParameter(node.parameters[i].name);
    x(Eigen::Index(i)) = it->second;
  }
  return x;
}

Eigen::VectorXd normalize(const OddNode& node, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return ((x - node.box_lo()).array() / node.box_span().array()).matrix();
}

Eigen::VectorXd denormalize(const OddNode& node, const Eigen::Ref<const Eigen::VectorXd>& u) {
  return node.box_lo() + u.cwiseProduct(node.box_span());
}

DataPoint make_point(const OddNode& node, const Eigen::Ref<const Eigen::VectorXd>& x) {
  DataPoint p;
  for (std::size_t i = 0; i < node.parameters.size(); ++i)
    p.values[node.parameters[i].name] = x(Eigen::Index(i));
  return p;
}

ConvexPolytope normalized_polytope(const OddNode& node, const ConvexPolytope& poly) {
  const Eigen::VectorXd lo = node.box_lo();
  const Eigen::VectorXd span = node.box_span();
  ConvexPolytope out;
  // a.x <= b with x = lo + span.u  =>  (a.span).u <= b - a.lo
  out.normals = poly.normals * span.asDiagonal();
  out.offsets = poly.offsets - poly.normals * lo;
  const Eigen::VectorXd norms = out.normals.rowwise().norm();
  for (Eigen::Index i = 0; i < out.normals.rows(); ++i) {
    if (norms(i) > 0) {
      out.normals.row(i) /= norms(i);
      out.offsets(i) /= norms(i);
    }
  }
  out.vertices = (poly.vertices.colwise() - lo).array().colwise() / span.array();
  return out;
}

Containment locate(const OddNode& node, const Eigen::Ref<const Eigen::VectorXd>& x,
                   Tolerance tol) {
  const Eigen::VectorXd u = normalize(node, x);
  if (const auto* poly = std::get_if<Polygon2D>(&node.region)) {
    const Eigen::Matrix2Xd loop = normalized_loop(node, *poly);
    const Eigen::Vector2d q = u.head<2>();
    if (geom::loop_boundary_distance(loop, q) <= tol.relative) return Containment::on_boundary;
    return geom::even_odd_contains(loop, q) ? Containment::inside : Containment::outside;
  }
  const auto& uni = std::get<PolytopeUnion>(node.region);
  bool near = false;
  for (const auto& member : uni.members) {
    const double s = min_slack(normalized_polytope(node, member), u);
    if (s > tol.relative) return Containment::inside;
    if (s >= -tol.relative) near = true;
  }
  return near ? Containment::on_boundary : Containment::outside;
}

Containment point_in_region(const DataPoint& p, const OddNode& node, Tolerance tol) {
  return locate(node, coordinates(p, node), tol);
}

Containment point_in_region(const DataPoint& p, const OddNode& node) {
  return point_in_region(p, node, node.tolerance);
}

std::size_t count_at_extreme(const OddNode& node, const Eigen::Ref<const Eigen::VectorXd>& x,
                             Tolerance tol) {
  std::size_t k = 0;
  for (std::size_t i = 0; i < node.parameters.size(); ++i) {
    const auto& r = node.parameters[i].range;
    const double band = tol.relative * r.span();
    const double v = x(Eigen::Index(i));
    if (std::abs(v - r.lo) <= band || std::abs(v - r.hi) <= band) ++k;
  }
  return k;
}

std::vector<std::string> params_at_extreme(const DataPoint& p, const OddNode& node,
                                           Tolerance tol) {
  const Eigen::VectorXd x = coordinates(p, node);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < node.parameters.size(); ++i) {
    const auto& r = node.parameters[i].range;
    const double band = tol.relative * r.span();
    const double v = x(Eigen::Index(i));
    if (std::abs(v - r.lo) <= band || std::abs(v - r.hi) <= band)
      out.push_back(node.parameters[i].name);
  }
  return out;
}

std::vector<std::string> params_at_extreme(const DataPoint& p, const OddNode& node) {
  return params_at_extreme(p, node, node.tolerance);
}

Eigen::MatrixXd region_vertex_matrix(const OddNode& node) {
  if (const auto* poly = std::get_if<Polygon2D>(&node.region)) return poly->vertices;
  const auto& uni = std::get<PolytopeUnion>(node.region);
  const Eigen::VectorXd span = node.box_span();
  std::vector<Eigen::VectorXd> kept;
  for (const auto& member : uni.members) {
    for (Eigen::Index c = 0; c < member.vertices.cols(); ++c) {
      const Eigen::VectorXd v = member.vertices.col(c);
      const bool dup = std::any_of(kept.begin(), kept.end(), [&](const Eigen::VectorXd& k) {
        return ((k - v).array() / span.array()).abs().maxCoeff() <= node.tolerance.relative;
      });
      if (!dup) kept.push_back(v);
    }
  }
  Eigen::MatrixXd out(Eigen::Index(node.dimension()), Eigen::Index(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) out.col(Eigen::Index(c)) = kept[c];
  return out;
}

std::vector<DataPoint> region_vertices(const OddNode& node) {
  const Eigen::MatrixXd v = region_vertex_matrix(node);
  std::vector<DataPoint> out;
  out.reserve(std::size_t(v.cols()));
  for (Eigen::Index c = 0; c < v.cols(); ++c) out.push_back(make_point(node, v.col(c)));
  return out;
}

double boundary_distance(const OddNode& node, const Eigen::Ref<const Eigen::VectorXd>& x) {
  const Eigen::VectorXd u = normalize(node, x);
  if (const auto* poly = std::get_if<Polygon2D>(&node.region)) {
    const Eigen::Vector2d q = u.head<2>();
    return geom::loop_boundary_distance(normalized_loop(node, *poly), q);
  }
  const auto& uni = std::get<PolytopeUnion>(node.region);
  double depth = -1.0;
  double gap = std::numeric_limits<double>::infinity();
  for (const auto& member : uni.members) {
    const ConvexPolytope n = normalized_polytope(node, member);
    const double s = min_slack(n, u);
    if (s >= 0) {
      depth = std::max(depth, s);
    } else if (depth < 0) {
      gap = std::min(gap, (geom::project_onto_polytope(n.normals, n.offsets, u) - u).norm());
    }
  }
  return depth >= 0 ? depth : gap;
}

double distance_to_boundary(const DataPoint& p, const OddNode& node) {
  return boundary_distance(node, coordinates(p, node));
}

Eigen::VectorXd halton(std::size_t index, std::size_t dim) {
  static constexpr std::array<unsigned, 16> kPrimes{2,  3,  5,  7,  11, 13, 17, 19,
                                                    23, 29, 31, 37, 41, 43, 47, 53};
  Eigen::VectorXd out(static_cast<Eigen::Index>(dim));
  for (std::size_t d = 0; d < dim; ++d) {
    const unsigned base = kPrimes[d % kPrimes.size()];
    double f = 1.0, r = 0.0;
    for (std::size_t i = index; i > 0; i /= base) {
      f /= base;
      r += f * double(i % base);
    }
    out(Eigen::Index(d)) = r;
  }
  return out;
}

ContainmentCheck contains_node(const OddNode& inner, const OddNode& outer, std::size_t samples,
                               Tolerance tol) {
  for (const auto& p : outer.parameters) {
    if (!inner.index_of(p.name))
      throw IncompatibleParameters("node '" + outer.name + "' uses parameter '" + p.name +
                                   "' that '" + inner.name + "' lacks");
  }
  auto fails = [&](const DataPoint& p) {
    return point_in_region(p, outer, tol) == Containment::outside;
  };
  for (const auto& v : region_vertices(inner)) {
    if (fails(v)) return {false, v};
  }
  const std::size_t dim = inner.dimension();
  const std::size_t max_draws = std::max<std::size_t>(samples * 1000, 10000);
  std::size_t accepted = 0;
  for (std::size_t i = 1; i <= max_draws && accepted < samples; ++i) {
    const Eigen::VectorXd x = denormalize(inner, halton(i, dim));
    if (locate(inner, x, tol) == Containment::outside) continue;
    ++accepted;
    DataPoint p = make_point(inner, x);
    if (fails(p)) return {false, std::move(p)};
  }
  return {};
}

std::vector<NodeIssue> validate_node(const OddNode& node) {
  std::vector<NodeIssue> issues;
  auto add = [&](std::string code, std::string msg) {
    issues.push_back({std::move(code), "node '" + node.name + "': " + std::move(msg)});
  };
  if (node.parameters.empty()) add("E012", "no parameters declared");

  std::set<std::string> seen;
  bool ranges_ok = true;
  for (const auto& p : node.parameters) {
    if (!seen.insert(p.name).second) add("E002", "duplicate parameter '" + p.name + "'");
    if (!std::isfinite(p.range.lo) || !std::isfinite(p.range.hi)) {
      add("E005", "parameter '" + p.name + "' has a non-finite range");
      ranges_ok = false;
    } else if (p.range.lo > p.range.hi) {
      add("E005", "parameter '" + p.name + "' range lo > hi");
      ranges_ok = false;
    }
    if (p.distribution) {
      const auto& d = *p.distribution;
      if (d.kind == DistributionKind::triangular && (d.mode < p.range.lo || d.mode > p.range.hi))
        add("E013", "triangular mode of '" + p.name + "' lies outside its range");
      if (d.kind == DistributionKind::empirical_histogram) {
        const bool negative = std::any_of(d.weights.begin(), d.weights.end(),
                                          [](double w) { return !(w >= 0); });
        double total = 0;
        for (double w : d.weights) total += w;
        if (d.weights.empty() || negative || !(total > 0))
          add("E013", "histogram of '" + p.name + "' needs non-negative weights with positive sum");
      }
    }
  }
  for (const auto& t : node.preprocessing) {
    if (!node.index_of(t.parameter))
      add("E003", "preprocess refers to unknown parameter '" + t.parameter + "'");
    try {
      t.validate();
    } catch (const std::invalid_argument& e) {
      add("E013", e.what());
    }
  }
  if (node.parameters.empty() || !ranges_ok) return issues;

  const double tol = node.tolerance.relative;
  const Eigen::Index dim = Eigen::Index(node.dimension());
  auto outside_box = [&](const Eigen::MatrixXd& vertices) {
    const Eigen::VectorXd lo = node.box_lo();
    const Eigen::VectorXd span = node.box_span();
    const Eigen::ArrayXXd u = (vertices.colwise() - lo).array().colwise() / span.array();
    return (u < -tol).any() || (u > 1.0 + tol).any();
  };

  if (const auto* poly = std::get_if<Polygon2D>(&node.region)) {
    if (dim != 2) {
      add("E010", "polygon regions need exactly 2 parameters, node has " + std::to_string(dim));
      return issues;
    }
    if (poly->vertices.cols() < 3) {
      add("E004", "polygon needs at least 3 vertices");
      return issues;
    }
    const Eigen::Matrix2Xd loop = normalized_loop(node, *poly);
    if (std::abs(geom::signed_area(loop)) <= tol)
      add("E004", "polygon has zero area");
    else if (!geom::is_simple_loop<double>(loop, 1e-12))
      add("E004", "polygon is self-intersecting");
    if (outside_box(poly->vertices)) add("E006", "polygon leaves the parameter box");
    return issues;
  }

  const auto& uni = std::get<PolytopeUnion>(node.region);
  if (uni.members.empty()) add("E004", "polytope union has no members");
  for (std::size_t m = 0; m < uni.members.size(); ++m) {
    const auto& member = uni.members[m];
    const std::string where = "polytope " + std::to_string(m + 1);
    if (member.normals.cols() != dim || member.vertices.rows() != dim) {
      add("E010", where + " coefficients do not match the " + std::to_string(dim) +
                      " declared parameters");
      continue;
    }
    if (member.normals.rows() == 0 || member.vertices.cols() == 0) {
      add("E004", where + " needs halfspaces and vertices");
      continue;
    }
    if ((member.normals.rowwise().norm().array() == 0).any()) {
      add("E004", where + " has a zero halfspace normal");
      continue;
    }
    const ConvexPolytope n = normalized_polytope(node, member);
    for (Eigen::Index c = 0; c < n.vertices.cols(); ++c) {
      if (min_slack(n, n.vertices.col(c)) < -tol) {
        add("E004", where + " vertex " + std::to_string(c + 1) + " violates its halfspaces");
        break;
      }
    }
    if (outside_box(member.vertices)) add("E006", where + " leaves the parameter box");
  }
  return issues;
}

}  // namespace oddkit
