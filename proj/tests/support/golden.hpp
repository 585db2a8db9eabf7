// SPDX-License-Identifier: Apache-2.0
//
// The worked flight-envelope examples: each named point with the category
// it must receive against each named node.
#pragma once

#include "oddkit/classifier.hpp"

#include <optional>
#include <string>
#include <vector>

namespace oddkit::test {

struct GoldenCase {
  double mach = 0.0;
  double alt = 0.0;
  std::optional<double> raw_alt;
  std::optional<double> temp;
  std::string node;
  CategoryLabel expected = CategoryLabel::Nominal;

  [[nodiscard]] DataPoint point() const {
    DataPoint p;
    p.values = {{"Mach", mach}, {"Alt", alt}};
    if (raw_alt) p.provenance_raw = {{"Alt", *raw_alt}};
    if (temp) p.hidden_values = {{"Temp", *temp}};
    return p;
  }
  [[nodiscard]] std::string describe() const {
    std::string s = "(" + std::to_string(mach) + ", " + std::to_string(alt);
    if (raw_alt) s += " | raw " + std::to_string(*raw_alt);
    if (temp) s += " | Temp " + std::to_string(*temp);
    return s + ") @" + node;
  }
};

inline std::vector<GoldenCase> golden_cases() {
  using C = CategoryLabel;
  return {
      {0.1, 0, {}, {}, "MLMODD", C::EdgeCase},
      {0.1, 0, {}, {}, "MLCODD_spec", C::Nominal},
      {0.0, 0, {}, {}, "MLMODD", C::FeasibleCornerCase},
      {0.0, 0, {}, {}, "MLCODD_spec", C::EdgeCase},
      {0.4, 0, {}, {}, "MLMODD", C::FeasibleCornerCase},
      {0.4, 0, {}, {}, "MLCODD_spec", C::EdgeCase},
      {0.4, -1300, {}, {}, "MLMODD", C::Outlier},
      {0.4, -1300, {}, {}, "MLCODD_spec", C::FeasibleCornerCase},
      {0.5, -1300, {}, {}, "MLCODD_spec", C::Outlier},
      {0.5, -1300, {}, {}, "MLCODD_oper", C::FeasibleCornerCase},
      {0.0, 15000, {}, {}, "MLMODD", C::InfeasibleCornerCase},
      {0.0, 15000, {}, {}, "MLCODD_spec", C::InfeasibleCornerCase},
      {0.35, 2000, 20000.0, {}, "MLMODD", C::Inlier},
      {0.3, 14000, {}, 20.0, "MLMODD", C::Novelty},
      {0.225, 14000, {}, {}, "MLMODD", C::Nominal},
  };
}

inline ChainNames corpus_chain_names() {
  return {"MLMODD", "MLCODD_spec", std::string("MLCODD_oper"), std::string("MLMODD_temp")};
}

}  // namespace oddkit::test
