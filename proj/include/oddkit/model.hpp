// SPDX-License-Identifier: Apache-2.0
//
// Domain model: parameters, regions, ODD nodes and data points, plus the
// point/region queries every classification decision is built from.
//
// Regions are closed sets. All tolerances are relative to each
// parameter's admissible span: geometry runs in box-normalized
// coordinates u = (x - lo) / (hi - lo), where a tolerance is absolute.
#pragma once

#include "oddkit/transform.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace oddkit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingParameter : public Error {
 public:
  explicit MissingParameter(std::string parameter)
      : Error("missing value for parameter '" + parameter + "'"),
        parameter_(std::move(parameter)) {}
  [[nodiscard]] const std::string& parameter() const { return parameter_; }

 private:
  std::string parameter_;
};

class IncompatibleParameters : public Error {
 public:
  using Error::Error;
};

/// Relative tolerance, as a fraction of each parameter's admissible span.
struct Tolerance {
  double relative = 1e-9;
  friend bool operator==(const Tolerance&, const Tolerance&) = default;
};

enum class DimensionClass { environmental, operational, system_health };
enum class DistributionKind { uniform, triangular, empirical_histogram };
enum class OddLevel { system_od, subsystem_odd, mlc_odd, mlm_odd };
enum class OddVariant { as_specified, as_operated };
enum class Containment { inside, on_boundary, outside };

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  /// Degenerate intervals scale by one so normalization stays finite.
  [[nodiscard]] double span() const { return hi > lo ? hi - lo : 1.0; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct Distribution {
  DistributionKind kind = DistributionKind::uniform;
  double mode = 0.0;            // triangular
  std::vector<double> weights;  // empirical_histogram, equal-width bins over the range
  friend bool operator==(const Distribution&, const Distribution&) = default;
};

struct Parameter {
  std::string name;
  std::string unit;
  DimensionClass dimension_class = DimensionClass::operational;
  Interval range;
  std::optional<Distribution> distribution;
  friend bool operator==(const Parameter&, const Parameter&) = default;
};

/// Simple polygon over exactly two parameters, in node parameter order.
struct Polygon2D {
  Eigen::Matrix2Xd vertices;
};

/// Convex polytope { x : normals * x <= offsets } with its vertices listed
/// explicitly (one column per vertex).
struct ConvexPolytope {
  Eigen::MatrixXd normals;
  Eigen::VectorXd offsets;
  Eigen::MatrixXd vertices;
};

struct PolytopeUnion {
  std::vector<ConvexPolytope> members;
};

using Region = std::variant<Polygon2D, PolytopeUnion>;

bool operator==(const Polygon2D& a, const Polygon2D& b);
bool operator==(const ConvexPolytope& a, const ConvexPolytope& b);
bool operator==(const PolytopeUnion& a, const PolytopeUnion& b);

struct OddNode {
  std::string name;
  OddLevel level = OddLevel::mlm_odd;
  OddVariant variant = OddVariant::as_specified;
  std::vector<Parameter> parameters;
  Region region;
  std::optional<std::string> allocates;
  std::optional<std::string> extends;
  /// Declared preprocessing, one entry per parameter at most.
  std::vector<Transform> preprocessing;
  Tolerance tolerance;

  [[nodiscard]] std::optional<std::size_t> index_of(std::string_view param) const;
  [[nodiscard]] const Transform* preprocessing_for(std::string_view param) const;
  [[nodiscard]] std::size_t dimension() const { return parameters.size(); }
  [[nodiscard]] Eigen::VectorXd box_lo() const;
  [[nodiscard]] Eigen::VectorXd box_span() const;

  friend bool operator==(const OddNode&, const OddNode&) = default;
};

struct DataPoint {
  std::map<std::string, double> values;
  std::map<std::string, double> provenance_raw;  // empty: no provenance
  std::map<std::string, double> hidden_values;   // empty: none
  std::optional<bool> in_sample;
  friend bool operator==(const DataPoint&, const DataPoint&) = default;
};

struct Dataset {
  std::vector<DataPoint> rows;
  /// Oracle category labels carried by the `label` column, when present.
  std::vector<std::optional<std::string>> oracle_labels;
  [[nodiscard]] std::size_t size() const { return rows.size(); }
  [[nodiscard]] bool empty() const { return rows.empty(); }
};

std::string_view to_string(DimensionClass c);
std::string_view to_string(DistributionKind k);
std::string_view to_string(OddLevel l);
std::string_view to_string(OddVariant v);
std::string_view to_string(Containment c);
bool parse_enum(std::string_view text, DimensionClass& out);
bool parse_enum(std::string_view text, OddLevel& out);
bool parse_enum(std::string_view text, OddVariant& out);

// ---------------------------------------------------------------------------
// Coordinates

/// Parameter values of `p` in node order. Throws MissingParameter.
Eigen::VectorXd coordinates(const DataPoint& p, const OddNode& node);

/// Box-normalized coordinates of a physical point.
Eigen::VectorXd normalize(const OddNode& node, const Eigen::Ref<const Eigen::VectorXd>& x);
Eigen::VectorXd denormalize(const OddNode& node, const Eigen::Ref<const Eigen::VectorXd>& u);

DataPoint make_point(const OddNode& node, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Polytope in normalized coordinates with unit-norm facet normals, so facet
/// slack is a Euclidean distance in normalized units.
ConvexPolytope normalized_polytope(const OddNode& node, const ConvexPolytope& poly);

// ---------------------------------------------------------------------------
// Queries

Containment point_in_region(const DataPoint& p, const OddNode& node, Tolerance tol);
Containment point_in_region(const DataPoint& p, const OddNode& node);
Containment locate(const OddNode& node, const Eigen::Ref<const Eigen::VectorXd>& x,
                   Tolerance tol);

/// Parameters sitting at their admissible lo or hi within tol * span, in
/// node parameter order. Values beyond the tolerance band never count.
std::vector<std::string> params_at_extreme(const DataPoint& p, const OddNode& node,
                                           Tolerance tol);
std::vector<std::string> params_at_extreme(const DataPoint& p, const OddNode& node);
std::size_t count_at_extreme(const OddNode& node, const Eigen::Ref<const Eigen::VectorXd>& x,
                             Tolerance tol);

/// Polygon loop, or the deduplicated union of listed polytope vertices.
std::vector<DataPoint> region_vertices(const OddNode& node);
Eigen::MatrixXd region_vertex_matrix(const OddNode& node);

/// Minimal normalized distance from the point to the region boundary.
/// Exact for polygons and for points outside a polytope union; for points
/// inside a union it is the depth within the deepest containing member.
double distance_to_boundary(const DataPoint& p, const OddNode& node);
double boundary_distance(const OddNode& node, const Eigen::Ref<const Eigen::VectorXd>& x);

struct ContainmentCheck {
  bool contained = true;
  std::optional<DataPoint> witness;
};

/// Sampling check, not a decision procedure: every inner vertex plus
/// `samples` quasi-random interior points of `inner` are tested against
/// `outer` (projected onto outer's parameters). Throws
/// IncompatibleParameters when outer uses a parameter inner lacks.
ContainmentCheck contains_node(const OddNode& inner, const OddNode& outer, std::size_t samples,
                               Tolerance tol = {});

/// Halton sequence point in [0,1)^dim, index >= 1.
Eigen::VectorXd halton(std::size_t index, std::size_t dim);

// ---------------------------------------------------------------------------
// Validation

struct NodeIssue {
  std::string code;  // E004 degenerate region, E005 range, E006 outside box, E010 arity
  std::string message;
};

/// Structural checks on a single node; hierarchy checks live in the DSL.
std::vector<NodeIssue> validate_node(const OddNode& node);

}  // namespace oddkit
