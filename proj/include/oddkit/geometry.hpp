// SPDX-License-Identifier: Apache-2.0
//
// Geometry primitives over Eigen expressions. Everything here works in
// whatever coordinates the caller supplies; the model layer feeds it
// box-normalized coordinates so that absolute tolerances here behave as
// relative tolerances on the physical parameters.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace oddkit::geom {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

/// Polygon vertex loop, one column per vertex, implicitly closed.
template <typename Scalar>
using Loop2 = Eigen::Matrix<Scalar, 2, Eigen::Dynamic>;

template <typename Scalar>
Scalar cross2(const Vec2<Scalar>& a, const Vec2<Scalar>& b) {
  return a.x() * b.y() - a.y() * b.x();
}

/// Shoelace area; positive for counter-clockwise loops.
template <typename Derived>
typename Derived::Scalar signed_area(const Eigen::MatrixBase<Derived>& loop) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = loop.cols();
  Scalar twice = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index j = (i + 1) % n;
    twice += loop(0, i) * loop(1, j) - loop(0, j) * loop(1, i);
  }
  return twice / Scalar(2);
}

template <typename DerivedP, typename DerivedA, typename DerivedB>
typename DerivedP::Scalar point_segment_distance(const Eigen::MatrixBase<DerivedP>& p,
                                                 const Eigen::MatrixBase<DerivedA>& a,
                                                 const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedP::Scalar;
  const auto ab = (b - a).eval();
  const Scalar len2 = ab.squaredNorm();
  if (len2 == Scalar(0)) return (p - a).norm();
  const Scalar t = std::clamp<Scalar>((p - a).dot(ab) / len2, Scalar(0), Scalar(1));
  return (p - (a + t * ab)).norm();
}

/// Minimum distance from `p` to any edge of the closed loop.
template <typename DerivedL, typename DerivedP>
typename DerivedL::Scalar loop_boundary_distance(const Eigen::MatrixBase<DerivedL>& loop,
                                                 const Eigen::MatrixBase<DerivedP>& p) {
  using Scalar = typename DerivedL::Scalar;
  const Eigen::Index n = loop.cols();
  Scalar best = std::numeric_limits<Scalar>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index j = (i + 1) % n;
    best = std::min(best, point_segment_distance(p, loop.col(i), loop.col(j)));
  }
  return best;
}

/// Even-odd crossing test. Boundary points get an arbitrary but
/// deterministic answer; callers resolve the boundary band first.
template <typename DerivedL, typename DerivedP>
bool even_odd_contains(const Eigen::MatrixBase<DerivedL>& loop,
                       const Eigen::MatrixBase<DerivedP>& p) {
  const Eigen::Index n = loop.cols();
  bool inside = false;
  for (Eigen::Index i = 0, j = n - 1; i < n; j = i++) {
    const auto xi = loop(0, i), yi = loop(1, i);
    const auto xj = loop(0, j), yj = loop(1, j);
    if ((yi > p.y()) != (yj > p.y())) {
      const auto x_cross = xj + (p.y() - yj) * (xi - xj) / (yi - yj);
      if (p.x() < x_cross) inside = !inside;
    }
  }
  return inside;
}

/// Orientation of c relative to the directed line a->b, with `eps` slack.
template <typename Scalar>
int orientation(const Vec2<Scalar>& a, const Vec2<Scalar>& b, const Vec2<Scalar>& c,
                Scalar eps) {
  const Scalar v = cross2<Scalar>(b - a, c - a);
  if (v > eps) return 1;
  if (v < -eps) return -1;
  return 0;
}

template <typename Scalar>
bool on_segment(const Vec2<Scalar>& a, const Vec2<Scalar>& b, const Vec2<Scalar>& c,
                Scalar eps) {
  return c.x() <= std::max(a.x(), b.x()) + eps && c.x() >= std::min(a.x(), b.x()) - eps &&
         c.y() <= std::max(a.y(), b.y()) + eps && c.y() >= std::min(a.y(), b.y()) - eps;
}

/// Closed-segment intersection, touching and collinear overlap included.
template <typename Scalar>
bool segments_intersect(const Vec2<Scalar>& p1, const Vec2<Scalar>& p2,
                        const Vec2<Scalar>& q1, const Vec2<Scalar>& q2, Scalar eps) {
  const int o1 = orientation(p1, p2, q1, eps);
  const int o2 = orientation(p1, p2, q2, eps);
  const int o3 = orientation(q1, q2, p1, eps);
  const int o4 = orientation(q1, q2, p2, eps);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1, eps)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2, eps)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1, eps)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2, eps)) return true;
  return false;
}

/// True when no two non-adjacent edges meet and adjacent edges share only
/// their common vertex. O(n^2), fine for hand-written envelopes.
template <typename Scalar>
bool is_simple_loop(const Loop2<Scalar>& loop, Scalar eps) {
  const Eigen::Index n = loop.cols();
  if (n < 3) return false;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec2<Scalar> a = loop.col(i), b = loop.col((i + 1) % n);
    if ((b - a).norm() <= eps) return false;
    for (Eigen::Index k = i + 1; k < n; ++k) {
      const Vec2<Scalar> c = loop.col(k), d = loop.col((k + 1) % n);
      const bool adjacent = (k == i + 1) || (i == 0 && k == n - 1);
      if (!adjacent) {
        if (segments_intersect(a, b, c, d, eps)) return false;
        continue;
      }
      // Adjacent edges fold back on themselves when the far endpoint of
      // one lies on the other.
      const Vec2<Scalar> shared = (k == i + 1) ? b : a;
      const Vec2<Scalar> far_ab = (k == i + 1) ? a : b;
      const Vec2<Scalar> far_cd = (k == i + 1) ? d : c;
      if (orientation(shared, far_ab, far_cd, eps) == 0 &&
          (far_ab - shared).dot(far_cd - shared) > 0)
        return false;
    }
  }
  return true;
}

/// Signed slack of each facet, in the units of the facet normals' norm:
/// positive inside, negative outside. Rows of `normals` are facet normals.
template <typename DerivedN, typename DerivedB, typename DerivedX>
Eigen::Matrix<typename DerivedX::Scalar, Eigen::Dynamic, 1> facet_slack(
    const Eigen::MatrixBase<DerivedN>& normals, const Eigen::MatrixBase<DerivedB>& offsets,
    const Eigen::MatrixBase<DerivedX>& x) {
  return ((offsets - normals * x).array() / normals.rowwise().norm().array()).matrix();
}

/// Euclidean projection onto { y : normals*y <= offsets } by Dykstra's
/// alternating projections. Converges for any non-empty intersection.
template <typename DerivedN, typename DerivedB, typename DerivedX>
Eigen::Matrix<typename DerivedX::Scalar, Eigen::Dynamic, 1> project_onto_polytope(
    const Eigen::MatrixBase<DerivedN>& normals, const Eigen::MatrixBase<DerivedB>& offsets,
    const Eigen::MatrixBase<DerivedX>& x, int max_sweeps = 20000,
    typename DerivedX::Scalar stop = 1e-15) {
  using Scalar = typename DerivedX::Scalar;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index m = normals.rows();
  Vec y = x;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> increments =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(x.size(), m);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const Vec before = y;
    for (Eigen::Index i = 0; i < m; ++i) {
      const Vec shifted = y + increments.col(i);
      const auto a = normals.row(i).transpose();
      const Scalar excess = a.dot(shifted) - offsets(i);
      Vec projected = shifted;
      if (excess > 0) projected -= (excess / a.squaredNorm()) * a;
      increments.col(i) = shifted - projected;
      y = projected;
    }
    if ((y - before).squaredNorm() <= stop * stop) break;
  }
  return y;
}

}  // namespace oddkit::geom
