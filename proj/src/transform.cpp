// SPDX-License-Identifier: Apache-2.0
#include "oddkit/transform.hpp"

#include <cmath>

namespace oddkit {

void Transform::validate() const {
  if (kind == TransformKind::offset) {
    if (!std::isfinite(shift))
      throw std::invalid_argument("offset transform on '" + parameter + "' is not finite");
    return;
  }
  if (!std::isfinite(factor) || factor == 0.0)
    throw std::invalid_argument("transform on '" + parameter + "' needs a finite non-zero factor");
}

std::string_view to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::scale: return "scale";
    case TransformKind::offset: return "offset";
    case TransformKind::unit_swap: return "unit_swap";
  }
  return "?";
}

bool parse_transform_kind(std::string_view text, TransformKind& out) {
  if (text == "scale") out = TransformKind::scale;
  else if (text == "offset") out = TransformKind::offset;
  else if (text == "unit_swap") out = TransformKind::unit_swap;
  else return false;
  return true;
}

}  // namespace oddkit
