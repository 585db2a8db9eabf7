// SPDX-License-Identifier: Apache-2.0
//
// Static SVG of 2D ODD regions and categorized points. Output is a pure
// function of the inputs, so it can be compared byte for byte.
#pragma once

#include "oddkit/classifier.hpp"
#include "oddkit/dsl.hpp"

#include <string>
#include <vector>

namespace oddkit {

class RenderError : public Error {
 public:
  using Error::Error;
};

struct RenderOptions {
  double width = 800;
  double height = 600;
  std::string title;
};

/// One `<path class="region">` per node, in the given order (all nodes when
/// `nodes` is empty), points as `<circle class="point cat-<Category>">`
/// and a legend entry per node and per category present. Throws
/// RenderError unless every node models the same two parameters.
std::string render_svg(const SpecDocument& doc, const std::vector<std::string>& nodes,
                       const Dataset* data = nullptr,
                       const std::vector<RowLabel>* labels = nullptr,
                       const RenderOptions& options = {});

}  // namespace oddkit
