// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace oddkit {

enum class TransformKind { scale, offset, unit_swap };

/// Invertible per-parameter preprocessing step. Nodes declare the intended
/// pipeline with these; the anomaly lab uses them as corruptions.
struct Transform {
  TransformKind kind = TransformKind::scale;
  std::string parameter;
  double factor = 1.0;  // scale, unit_swap
  double shift = 0.0;   // offset

  static Transform identity(std::string parameter) {
    return {TransformKind::scale, std::move(parameter), 1.0, 0.0};
  }

  [[nodiscard]] double apply(double x) const {
    return kind == TransformKind::offset ? x + shift : x * factor;
  }

  [[nodiscard]] Transform inverse() const {
    Transform t = *this;
    if (kind == TransformKind::offset)
      t.shift = -shift;
    else
      t.factor = 1.0 / factor;
    return t;
  }

  [[nodiscard]] bool is_identity() const {
    return kind == TransformKind::offset ? shift == 0.0 : factor == 1.0;
  }

  /// Throws std::invalid_argument on a zero or non-finite factor.
  void validate() const;

  friend bool operator==(const Transform&, const Transform&) = default;
};

std::string_view to_string(TransformKind kind);
bool parse_transform_kind(std::string_view text, TransformKind& out);

}  // namespace oddkit
