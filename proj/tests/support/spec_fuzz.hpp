// SPDX-License-Identifier: Apache-2.0
//
// Random valid `.odd` documents for round-trip testing. Numbers carry at
// most seven significant digits so serialization is exact.
#pragma once

#include "oddkit/rng.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

namespace oddkit::test {

inline std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.7g", v);
  return buf;
}

/// Rounds to what num() prints, so later arithmetic sees the parsed value.
inline double rounded(double v) { return std::stod(num(v)); }

inline std::string fuzz_spec(std::uint64_t seed) {
  Rng rng(seed);
  std::string out = "# fuzz " + std::to_string(seed) + "\n";
  const std::size_t nodes = 1 + rng.index(5);
  const char* levels[] = {"subsystem_odd", "mlc_odd", "mlm_odd"};
  const char* classes[] = {"environmental", "operational", "system_health"};
  std::vector<std::string> names;
  bool have_sod = false;

  for (std::size_t i = 0; i < nodes; ++i) {
    const std::string name = "N" + std::to_string(i) + "_" + std::to_string(rng.index(1000));
    std::string header = "odd \"" + name + "\"";
    if (!have_sod && rng.index(3) == 0) {
      header += " level system_od";
      have_sod = true;
    } else {
      header += std::string(" level ") + levels[rng.index(3)];
    }
    if (rng.index(2) == 0) header += " variant as_operated";
    if (!names.empty() && rng.index(2) == 0) header += " allocates \"" + names[rng.index(names.size())] + "\"";
    out += header + " {\n";

    const bool polygon = rng.index(3) != 0;
    const std::size_t dim = polygon ? 2 : 2 + rng.index(2);
    std::vector<double> lo(dim), hi(dim);
    std::vector<std::string> params;
    for (std::size_t k = 0; k < dim; ++k) {
      lo[k] = rounded(rng.uniform(-1000, 1000));
      hi[k] = rounded(lo[k] + rng.uniform(0.5, 5000));
      params.push_back("p" + std::to_string(k));
      std::string line = "  param " + params[k] + " : u" + std::to_string(k) + " range [" + num(lo[k]) +
                         ", " + num(hi[k]) + "] class " + classes[rng.index(3)];
      switch (rng.index(4)) {
        case 0: line += " dist uniform"; break;
        case 1: line += " dist triangular " + num(rounded(rng.uniform(lo[k], hi[k]))); break;
        case 2: {
          line += " dist histogram [";
          const std::size_t bins = 1 + rng.index(5);
          for (std::size_t b = 0; b < bins; ++b)
            line += (b ? ", " : "") + num(rounded(rng.uniform(0.1, 10)));
          line += "]";
          break;
        }
        default: break;
      }
      out += line + "\n";
    }

    if (polygon) {
      // Convex loop on an ellipse inscribed in the box, angles well apart.
      const std::size_t n = 3 + rng.index(6);
      const double step = 2 * std::numbers::pi / static_cast<double>(n);
      const double phase = rng.uniform(0, step);
      out += "  region polygon {\n   ";
      for (std::size_t v = 0; v < n; ++v) {
        const double a = phase + step * (static_cast<double>(v) + rng.uniform(0.1, 0.6));
        const double cx = (lo[0] + hi[0]) / 2, cy = (lo[1] + hi[1]) / 2;
        const double x = rounded(cx + 0.45 * (hi[0] - lo[0]) * std::cos(a));
        const double y = rounded(cy + 0.45 * (hi[1] - lo[1]) * std::sin(a));
        out += " (" + num(x) + ", " + num(y) + ")";
      }
      out += "\n  }\n";
    } else {
      // One or two axis-aligned boxes inside the parameter box.
      const std::size_t members = 1 + rng.index(2);
      for (std::size_t m = 0; m < members; ++m) {
        std::vector<double> a(dim), b(dim);
        for (std::size_t k = 0; k < dim; ++k) {
          const double span = hi[k] - lo[k];
          a[k] = rounded(lo[k] + span * rng.uniform(0.0, 0.4));
          b[k] = rounded(lo[k] + span * rng.uniform(0.6, 1.0));
        }
        out += "  region polytope {\n";
        for (std::size_t k = 0; k < dim; ++k) {
          std::string up = "    halfspace", down = "    halfspace";
          for (std::size_t j = 0; j < dim; ++j) {
            up += j == k ? " 1" : " 0";
            down += j == k ? " -1" : " 0";
          }
          out += up + " <= " + num(b[k]) + "\n" + down + " <= " + num(-a[k]) + "\n";
        }
        for (std::size_t c = 0; c < (std::size_t{1} << dim); ++c) {
          out += "    vertex (";
          for (std::size_t k = 0; k < dim; ++k)
            out += (k ? ", " : "") + num(((c >> k) & 1) ? b[k] : a[k]);
          out += ")\n";
        }
        out += "  }\n";
      }
    }

    const char* transforms[] = {" identity", " scale ", " offset ", " unit_swap "};
    for (std::size_t k = 0; k < dim; ++k) {
      if (rng.index(2) == 0) continue;
      const std::size_t t = rng.index(4);
      out += "  preprocess " + params[k] + transforms[t];
      if (t != 0) out += num(rounded(rng.uniform(0.5, 4)));
      out += "\n";
    }
    if (rng.index(3) == 0) out += "  tolerance " + num(rounded(rng.uniform(1e-9, 1e-4))) + "\n";
    out += "}\n\n";
    names.push_back(name);
  }

  if (rng.index(2) == 0) {
    out += "monitorchain \"mc" + std::to_string(seed) + "\" {\n";
    out += "  chain \"" + names[rng.index(names.size())] + "\" \"" + names[rng.index(names.size())] + "\"\n";
    out += "  stream \"s.csv\"\n  seed " + std::to_string(rng.next() >> 1) + "\n";
    out += rng.index(2) ? "  stub bilinear [0, 1, 2.5]\n" : "  stub bilinear\n";
    out += "  monitor range action filter node \"" + names[0] + "\"\n";
    out += "  monitor extreme_value action mask tol " + num(rounded(rng.uniform(1e-9, 1e-3))) + "\n";
    out += "  monitor known_input action replace " + num(rounded(rng.uniform(-5, 5))) +
           " tol 1e-06 inputs { (1, 2) (3.5, 4) }\n";
    out += "  monitor cross_check action filter param p0 threshold 0.25 channel hidden\n";
    out += "  monitor output_range action failover lo -1 hi 3\n";
    out += "}\n";
  }
  return out;
}

}  // namespace oddkit::test
