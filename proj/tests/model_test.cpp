// SPDX-License-Identifier: Apache-2.0
#include "oddkit/geometry.hpp"
#include "oddkit/model.hpp"
#include "oddkit/rng.hpp"
#include "support/oracle.hpp"

#include <gtest/gtest.h>

#include <algorithm>

namespace oddkit {
namespace {

using test::pt;

class CorpusModel : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { doc_ = new SpecDocument(test::load_spec("flight_envelope.odd")); }
  static void TearDownTestSuite() {
    delete doc_;
    doc_ = nullptr;
  }
  static const OddNode& node(const char* name) { return *doc_->find(name); }
  static SpecDocument* doc_;
};

SpecDocument* CorpusModel::doc_ = nullptr;

OddNode unit_square() {
  OddNode n;
  n.name = "sq";
  n.parameters = {{"x", "", DimensionClass::operational, {0, 1}, std::nullopt},
                  {"y", "", DimensionClass::operational, {0, 1}, std::nullopt}};
  Polygon2D poly;
  poly.vertices.resize(2, 4);
  poly.vertices << 0, 1, 1, 0, 0, 0, 1, 1;
  n.region = poly;
  return n;
}

DataPoint xy(double x, double y) {
  DataPoint p;
  p.values = {{"x", x}, {"y", y}};
  return p;
}

TEST_F(CorpusModel, NamedPointsLocateAsExpected) {
  EXPECT_EQ(point_in_region(pt(0.225, 14000), node("MLMODD")), Containment::inside);
  EXPECT_EQ(point_in_region(pt(0.1, 0), node("MLMODD")), Containment::on_boundary);
  EXPECT_EQ(point_in_region(pt(0.4, -1300), node("MLMODD")), Containment::outside);
  EXPECT_EQ(point_in_region(pt(0.4, -1300), node("MLCODD_spec")), Containment::on_boundary);
  EXPECT_EQ(point_in_region(pt(0.5, -1300), node("MLCODD_spec")), Containment::outside);
  EXPECT_EQ(point_in_region(pt(0.5, -1300), node("MLCODD_oper")), Containment::on_boundary);
  EXPECT_EQ(point_in_region(pt(0.0, 15000), node("MLCODD_spec")), Containment::outside);
}

TEST_F(CorpusModel, BoundaryBandIsRelativeToSpan) {
  const OddNode& mlm = node("MLMODD");
  // 1e-10 of the Alt span below the floor is within the default band.
  EXPECT_EQ(point_in_region(pt(0.1, -1.5e-6), mlm), Containment::on_boundary);
  EXPECT_EQ(point_in_region(pt(0.1, -1.0), mlm), Containment::outside);
  EXPECT_EQ(point_in_region(pt(0.1, -1.0), mlm, Tolerance{1e-3}), Containment::on_boundary);
}

TEST_F(CorpusModel, MissingParameterThrows) {
  DataPoint p;
  p.values = {{"Mach", 0.1}};
  EXPECT_THROW(point_in_region(p, node("MLMODD")), MissingParameter);
}

TEST_F(CorpusModel, ExtremesIgnoreValuesBeyondTheRange) {
  const OddNode& mlm = node("MLMODD");
  EXPECT_EQ(params_at_extreme(pt(0.4, 0), mlm), (std::vector<std::string>{"Mach", "Alt"}));
  EXPECT_EQ(params_at_extreme(pt(0.1, 0), mlm), (std::vector<std::string>{"Alt"}));
  EXPECT_EQ(params_at_extreme(pt(0.4, -1300), mlm), (std::vector<std::string>{"Mach"}));
  EXPECT_TRUE(params_at_extreme(pt(0.2, 7000), mlm).empty());
}

TEST_F(CorpusModel, PolygonVerticesAreTheLoop) {
  const auto v = region_vertices(node("MLMODD"));
  ASSERT_EQ(v.size(), 5u);
  EXPECT_EQ(v[0], pt(0, 0));
  EXPECT_EQ(v[3], pt(0.2, 15000));
}

TEST_F(CorpusModel, BoundaryDistanceAgreesWithOracle) {
  Rng rng(7);
  for (const char* name : {"SOD", "MLCODD_spec", "MLCODD_oper", "MLMODD"}) {
    const OddNode& n = node(name);
    const auto loop = test::normalized_loop(n);
    for (int i = 0; i < 2000; ++i) {
      const double m = rng.uniform(-0.1, 1.0), a = rng.uniform(-3000, 47000);
      const double got = distance_to_boundary(pt(m, a), n);
      const double want = static_cast<double>(test::loop_distance(loop, test::normalized_point(n, m, a)));
      ASSERT_NEAR(got, want, 1e-12) << name << " at " << m << "," << a;
    }
  }
}

TEST_F(CorpusModel, BoundaryDistanceIsZeroOnVertices) {
  for (const auto& v : region_vertices(node("MLCODD_spec")))
    EXPECT_LE(distance_to_boundary(v, node("MLCODD_spec")), 1e-15);
}

TEST_F(CorpusModel, AllocationContainmentSampling) {
  EXPECT_TRUE(contains_node(node("MLMODD"), node("MLCODD_spec"), 500).contained);
  const ContainmentCheck oper = contains_node(node("MLCODD_oper"), node("MLCODD_spec"), 500);
  ASSERT_FALSE(oper.contained);
  ASSERT_TRUE(oper.witness.has_value());
  EXPECT_NE(point_in_region(*oper.witness, node("MLCODD_spec")), Containment::inside);
}

TEST_F(CorpusModel, CorpusNodesValidate) {
  for (const auto& n : doc_->nodes) EXPECT_TRUE(validate_node(n).empty()) << n.name;
}

TEST(Model, HaltonIsDeterministicAndInUnitCube) {
  for (std::size_t i = 1; i < 200; ++i) {
    const Eigen::VectorXd h = halton(i, 3);
    EXPECT_EQ(h, halton(i, 3));
    EXPECT_TRUE((h.array() >= 0).all() && (h.array() < 1).all());
  }
  EXPECT_DOUBLE_EQ(halton(1, 2)(0), 0.5);
  EXPECT_NEAR(halton(1, 2)(1), 1.0 / 3.0, 1e-15);
}

TEST(Model, NormalizeRoundTrips) {
  OddNode n = unit_square();
  n.parameters[0].range = {-5, 15};
  n.parameters[1].range = {100, 300};
  Eigen::Vector2d x(3.0, 250.0);
  const Eigen::VectorXd u = normalize(n, x);
  EXPECT_NEAR(u(0), 0.4, 1e-15);
  EXPECT_NEAR(u(1), 0.75, 1e-15);
  EXPECT_TRUE(denormalize(n, u).isApprox(x));
}

TEST(Model, DegenerateIntervalNormalizesFinitely) {
  Interval i{2.0, 2.0};
  EXPECT_EQ(i.span(), 1.0);
}

TEST(Model, ValidationRejectsBadNodes) {
  auto codes = [](const OddNode& n) {
    std::vector<std::string> out;
    for (const auto& i : validate_node(n)) out.push_back(i.code);
    return out;
  };
  OddNode flipped = unit_square();
  flipped.parameters[0].range = {1, 0};
  EXPECT_TRUE(test::has(codes(flipped), "E005"));

  OddNode bow = unit_square();
  std::get<Polygon2D>(bow.region).vertices << 0, 1, 0, 1, 0, 1, 1, 0;
  EXPECT_EQ(codes(bow), std::vector<std::string>{"E004"});

  OddNode flat = unit_square();
  std::get<Polygon2D>(flat.region).vertices << 0, 0.5, 1, 0.75, 0, 0.5, 1, 0.75;
  EXPECT_EQ(codes(flat), std::vector<std::string>{"E004"});

  OddNode wide = unit_square();
  std::get<Polygon2D>(wide.region).vertices(0, 1) = 2.0;
  EXPECT_EQ(codes(wide), std::vector<std::string>{"E006"});

  OddNode dup = unit_square();
  dup.parameters[1].name = "x";
  EXPECT_TRUE(test::has(codes(dup), "E002"));
}

TEST(Model, NonConvexPolygonNotch) {
  OddNode n = unit_square();
  // U shape: notch from the top between x = 0.4 and 0.6 down to y = 0.3.
  auto& v = std::get<Polygon2D>(n.region).vertices;
  v.resize(2, 8);
  v << 0, 1, 1, 0.6, 0.6, 0.4, 0.4, 0,  //
      0, 0, 1, 1, 0.3, 0.3, 1, 1;
  ASSERT_TRUE(validate_node(n).empty());
  EXPECT_EQ(point_in_region(xy(0.5, 0.6), n), Containment::outside);
  EXPECT_EQ(point_in_region(xy(0.5, 0.2), n), Containment::inside);
  EXPECT_EQ(point_in_region(xy(0.5, 0.3), n), Containment::on_boundary);
  EXPECT_EQ(point_in_region(xy(0.2, 0.9), n), Containment::inside);
  EXPECT_NEAR(distance_to_boundary(xy(0.5, 0.6), n), 0.1, 1e-12);
}

OddNode two_boxes() {
  OddNode n;
  n.name = "boxes";
  n.parameters = {{"x", "", DimensionClass::operational, {0, 2}, std::nullopt},
                  {"y", "", DimensionClass::operational, {0, 1}, std::nullopt},
                  {"z", "", DimensionClass::operational, {0, 1}, std::nullopt}};
  auto box = [](double x0, double x1) {
    ConvexPolytope p;
    p.normals.resize(6, 3);
    p.normals << 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1;
    p.offsets.resize(6);
    p.offsets << x1, -x0, 1, 0, 1, 0;
    p.vertices.resize(3, 8);
    for (int i = 0; i < 8; ++i)
      p.vertices.col(i) << ((i & 1) ? x1 : x0), ((i & 2) ? 1 : 0), ((i & 4) ? 1 : 0);
    return p;
  };
  n.region = PolytopeUnion{{box(0, 1), box(1, 2)}};
  return n;
}

TEST(Model, PolytopeUnionMembership) {
  const OddNode n = two_boxes();
  ASSERT_TRUE(validate_node(n).empty());
  DataPoint p;
  p.values = {{"x", 1.5}, {"y", 0.5}, {"z", 0.5}};
  EXPECT_EQ(point_in_region(p, n), Containment::inside);
  p.values["x"] = 1.0;  // shared face, interior of the union
  EXPECT_NE(point_in_region(p, n), Containment::outside);
  p.values["x"] = 2.5;
  EXPECT_EQ(point_in_region(p, n), Containment::outside);
  // Shared vertices are listed once.
  EXPECT_EQ(region_vertices(n).size(), 12u);
}

TEST(Model, PolytopeDistanceOutsideIsEuclideanInNormalizedUnits) {
  const OddNode n = two_boxes();
  DataPoint p;
  p.values = {{"x", 2.2}, {"y", 1.3}, {"z", 0.5}};
  // Normalized: x overshoot 0.1, y overshoot 0.3.
  EXPECT_NEAR(distance_to_boundary(p, n), std::hypot(0.1, 0.3), 1e-9);
}

TEST(Geometry, DykstraProjectsOntoSimplex) {
  Eigen::Matrix<double, 3, 2> a;
  a << -1, 0, 0, -1, 1, 1;
  Eigen::Vector3d b(0, 0, 1);
  Eigen::Vector2d x(2, 2);
  const Eigen::VectorXd y = geom::project_onto_polytope(a, b, x);
  EXPECT_NEAR(y(0), 0.5, 1e-9);
  EXPECT_NEAR(y(1), 0.5, 1e-9);
}

TEST(Geometry, SimpleLoopDetection) {
  geom::Loop2<double> square(2, 4);
  square << 0, 1, 1, 0, 0, 0, 1, 1;
  EXPECT_TRUE(geom::is_simple_loop(square, 1e-12));
  geom::Loop2<double> bow(2, 4);
  bow << 0, 1, 0, 1, 0, 1, 1, 0;
  EXPECT_FALSE(geom::is_simple_loop(bow, 1e-12));
  EXPECT_NEAR(geom::signed_area(square), 1.0, 1e-15);
}

}  // namespace
}  // namespace oddkit
