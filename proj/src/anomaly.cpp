// SPDX-License-Identifier: Apache-2.0
#include "oddkit/anomaly.hpp"

#include "oddkit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace oddkit {

DataPoint inject_inlier(const DataPoint& p, const Transform& t, const OddNode& node,
                        Tolerance tol) {
  t.validate();
  const auto idx = node.index_of(t.parameter);
  if (!idx) throw Rejected("node '" + node.name + "' has no parameter '" + t.parameter + "'");
  if (!node.preprocessing_for(t.parameter))
    throw Rejected("node '" + node.name + "' declares no preprocessing for '" + t.parameter +
                   "', so corruption cannot be recognized");
  const auto it = p.values.find(t.parameter);
  if (it == p.values.end()) throw MissingParameter(t.parameter);

  DataPoint out;
  out.values = p.values;
  out.provenance_raw = p.values;
  out.hidden_values = p.hidden_values;
  out.in_sample = p.in_sample;
  out.values[t.parameter] = t.apply(it->second);

  if (point_in_region(out, node, tol) == Containment::outside)
    throw Rejected("corrupted point lands outside node '" + node.name + "'");
  if (classify_category(out, node, nullptr, tol).label != CategoryLabel::Inlier)
    throw Rejected("corruption of '" + t.parameter +
                   "' matches the declared preprocessing within tolerance");
  return out;
}

DataPoint make_novelty(const DataPoint& base, const Chain& chain, Tolerance tol) {
  if (!chain.extended) throw MissingExtension();
  const OddNode& ext = *chain.extended;
  const Eigen::VectorXd x = coordinates(base, ext);
  if (locate(ext, x, tol) != Containment::outside)
    throw Rejected("point lies inside extended node '" + ext.name + "'");

  DataPoint out;
  for (const auto& param : ext.parameters) {
    const double v = base.values.at(param.name);
    if (chain.mlm.index_of(param.name))
      out.values[param.name] = v;
    else
      out.hidden_values[param.name] = v;
  }
  for (const auto& param : chain.mlm.parameters) {
    if (!out.values.count(param.name)) throw MissingParameter(param.name);
  }
  if (out.hidden_values.empty())
    throw Rejected("extended node '" + ext.name + "' adds no parameter");
  if (point_in_region(out, chain.mlm, tol) == Containment::outside)
    throw Rejected("projection lies outside '" + chain.mlm.name + "'");
  return out;
}

std::string_view to_string(SampleMode m) {
  switch (m) {
    case SampleMode::nominal_interior: return "nominal_interior";
    case SampleMode::edge: return "edge";
    case SampleMode::feasible_corner: return "feasible_corner";
    case SampleMode::outlier_ring: return "outlier_ring";
  }
  return "?";
}

bool parse_enum(std::string_view text, SampleMode& out) {
  for (auto m : {SampleMode::nominal_interior, SampleMode::edge, SampleMode::feasible_corner,
                 SampleMode::outlier_ring}) {
    if (to_string(m) == text) {
      out = m;
      return true;
    }
  }
  return false;
}

namespace {

double draw(const Parameter& p, Rng& rng) {
  const double lo = p.range.lo, hi = p.range.hi;
  if (!p.distribution || hi <= lo) return rng.uniform(lo, hi);
  const Distribution& d = *p.distribution;
  switch (d.kind) {
    case DistributionKind::uniform:
      return rng.uniform(lo, hi);
    case DistributionKind::triangular: {
      const double c = std::clamp(d.mode, lo, hi);
      const double u = rng.uniform();
      const double f = (c - lo) / (hi - lo);
      return u < f ? lo + std::sqrt(u * (hi - lo) * (c - lo))
                   : hi - std::sqrt((1 - u) * (hi - lo) * (hi - c));
    }
    case DistributionKind::empirical_histogram: {
      const double total = std::accumulate(d.weights.begin(), d.weights.end(), 0.0);
      if (d.weights.empty() || !(total > 0)) return rng.uniform(lo, hi);
      double target = rng.uniform() * total;
      std::size_t bin = 0;
      while (bin + 1 < d.weights.size() && target >= d.weights[bin]) target -= d.weights[bin++];
      const double width = (hi - lo) / double(d.weights.size());
      return lo + width * (double(bin) + rng.uniform());
    }
  }
  return rng.uniform(lo, hi);
}

CategoryLabel label_of(const OddNode& node, const Eigen::VectorXd& x) {
  return classify_category(make_point(node, x), node, nullptr, node.tolerance).label;
}

/// Admissible edge points in normalized coordinates, before filtering.
std::vector<Eigen::VectorXd> edge_candidates(const OddNode& node, const SampleOptions& options,
                                             Rng& rng) {
  std::vector<Eigen::VectorXd> out;
  const std::size_t steps = std::max<std::size_t>(options.edge_slice_points, 2);
  const double eps = node.tolerance.relative;
  const Eigen::MatrixXd verts = region_vertex_matrix(node);
  const Eigen::VectorXd lo = node.box_lo(), span = node.box_span();
  const Eigen::MatrixXd u = (verts.colwise() - lo).array().colwise() / span.array();

  if (std::holds_alternative<Polygon2D>(node.region)) {
    const Eigen::Index m = u.cols();
    for (Eigen::Index i = 0; i < 2; ++i) {
      const Eigen::Index j = 1 - i;
      for (double side : {0.0, 1.0}) {
        std::vector<double> ts;
        for (Eigen::Index e = 0; e < m; ++e) {
          const Eigen::Vector2d a = u.col(e), b = u.col((e + 1) % m);
          const double da = a(i) - side, db = b(i) - side;
          if (std::abs(da) <= eps) ts.push_back(a(j));
          if (std::abs(db) <= eps) ts.push_back(b(j));
          if (da * db < 0) ts.push_back(a(j) + (b(j) - a(j)) * da / (da - db));
        }
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
        auto emit = [&](double t) {
          Eigen::Vector2d v;
          v(i) = side;
          v(j) = t;
          out.emplace_back(v);
        };
        for (std::size_t k = 0; k < ts.size(); ++k) {
          emit(ts[k]);
          if (k + 1 == ts.size()) continue;
          for (std::size_t s = 1; s + 1 < steps; ++s)
            emit(ts[k] + (ts[k + 1] - ts[k]) * double(s) / double(steps - 1));
        }
      }
    }
    return out;
  }

  // Faces on x_i = lo/hi: Dirichlet mixtures of the member vertices lying there.
  const auto& uni = std::get<PolytopeUnion>(node.region);
  for (const auto& member : uni.members) {
    const Eigen::MatrixXd mu =
        (member.vertices.colwise() - lo).array().colwise() / span.array();
    for (Eigen::Index i = 0; i < mu.rows(); ++i) {
      for (double side : {0.0, 1.0}) {
        std::vector<Eigen::Index> face;
        for (Eigen::Index c = 0; c < mu.cols(); ++c)
          if (std::abs(mu(i, c) - side) <= 1e-9) face.push_back(c);
        if (face.empty()) continue;
        for (auto c : face) out.emplace_back(mu.col(c));
        for (std::size_t s = 0; s < steps; ++s) {
          Eigen::VectorXd acc = Eigen::VectorXd::Zero(mu.rows());
          double total = 0;
          for (auto c : face) {
            const double w = rng.exponential();
            acc += w * mu.col(c);
            total += w;
          }
          acc /= total;
          acc(i) = side;
          out.push_back(acc);
        }
      }
    }
  }
  return out;
}

}  // namespace

std::vector<DataPoint> sample_region(const OddNode& node, std::size_t n, SampleMode mode,
                                     std::uint64_t seed, const SampleOptions& options) {
  Rng rng(seed);
  std::vector<DataPoint> out;
  out.reserve(n);
  const Eigen::VectorXd lo = node.box_lo(), span = node.box_span();
  const auto dim = static_cast<Eigen::Index>(node.dimension());

  auto rejection = [&](auto&& propose, CategoryLabel want) {
    const std::size_t budget = std::max<std::size_t>(n * options.max_draws_per_point, 100000);
    for (std::size_t tries = 0; out.size() < n; ++tries) {
      if (tries == budget)
        throw EmptyStratum(std::string(to_string(mode)) + " on node '" + node.name + "': " +
                           std::to_string(out.size()) + " of " + std::to_string(n) +
                           " points after " + std::to_string(budget) + " draws");
      const Eigen::VectorXd x = propose();
      if (label_of(node, x) == want) out.push_back(make_point(node, x));
    }
  };

  switch (mode) {
    case SampleMode::nominal_interior:
      rejection(
          [&] {
            Eigen::VectorXd x(dim);
            for (Eigen::Index i = 0; i < dim; ++i) x(i) = draw(node.parameters[std::size_t(i)], rng);
            return x;
          },
          CategoryLabel::Nominal);
      break;
    case SampleMode::outlier_ring: {
      const double pad = options.ring_inflation / 2;
      rejection(
          [&] {
            Eigen::VectorXd x(dim);
            for (Eigen::Index i = 0; i < dim; ++i)
              x(i) = lo(i) + span(i) * rng.uniform(-pad, 1 + pad);
            return x;
          },
          CategoryLabel::Outlier);
      break;
    }
    case SampleMode::feasible_corner: {
      std::vector<Eigen::VectorXd> corners;
      const Eigen::MatrixXd verts = region_vertex_matrix(node);
      for (Eigen::Index c = 0; c < verts.cols(); ++c)
        if (label_of(node, verts.col(c)) == CategoryLabel::FeasibleCornerCase)
          corners.emplace_back(verts.col(c));
      if (corners.empty())
        throw EmptyStratum("node '" + node.name + "' has no vertex with two or more extremes");
      for (std::size_t k = 0; k < n; ++k) out.push_back(make_point(node, corners[k % corners.size()]));
      break;
    }
    case SampleMode::edge: {
      std::vector<Eigen::VectorXd> pool;
      for (const auto& u : edge_candidates(node, options, rng)) {
        const Eigen::VectorXd x = lo + span.cwiseProduct(u);
        if (label_of(node, x) == CategoryLabel::EdgeCase) pool.push_back(x);
      }
      if (pool.empty())
        throw EmptyStratum("node '" + node.name + "' has no edge point on any extreme slice");
      for (std::size_t k = 0; k < n; ++k) out.push_back(make_point(node, pool[rng.index(pool.size())]));
      break;
    }
  }
  return out;
}

}  // namespace oddkit
