// SPDX-License-Identifier: Apache-2.0
//
// Synthetic anomalies and stratified samples, each closed-loop checked
// against the classifier: an accepted output always classifies into the
// stratum it was built for.
#pragma once

#include "oddkit/classifier.hpp"
#include "oddkit/model.hpp"
#include "oddkit/transform.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace oddkit {

class Rejected : public Error {
 public:
  using Error::Error;
};

class MissingExtension : public Error {
 public:
  MissingExtension() : Error("chain has no extended node") {}
};

class EmptyStratum : public Error {
 public:
  using Error::Error;
};

/// Applies `t` to p's values and records the originals as provenance.
/// Rejected when nothing changes beyond tolerance, when the node declares
/// no preprocessing for the parameter, or when the result leaves the node.
DataPoint inject_inlier(const DataPoint& p, const Transform& t, const OddNode& node,
                        Tolerance tol = {});

/// `base` covers the extended node's parameters. Accepted when base lies
/// outside the extended node and its projection lies inside the MLM; the
/// result carries the projection as values and the rest as hidden values.
DataPoint make_novelty(const DataPoint& base, const Chain& chain, Tolerance tol = {});

enum class SampleMode { nominal_interior, edge, feasible_corner, outlier_ring };

std::string_view to_string(SampleMode m);
bool parse_enum(std::string_view text, SampleMode& out);

struct SampleOptions {
  std::size_t edge_slice_points = 64;
  double ring_inflation = 0.2;  // total widening of each parameter range
  std::size_t max_draws_per_point = 10000;
};

/// Deterministic in (node, n, mode, seed). Outputs classify (without
/// context) as Nominal, EdgeCase, FeasibleCornerCase and Outlier
/// respectively. Throws EmptyStratum when the mode has no admissible point.
std::vector<DataPoint> sample_region(const OddNode& node, std::size_t n, SampleMode mode,
                                     std::uint64_t seed, const SampleOptions& options = {});

}  // namespace oddkit
