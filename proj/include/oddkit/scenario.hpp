// SPDX-License-Identifier: Apache-2.0
//
// Plain configuration records for `monitorchain` blocks. The DSL fills
// them in; the monitor simulator turns them into a runnable chain.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace oddkit {

enum class MonitorKind {
  range_monitor,
  extreme_value_monitor,
  known_input_monitor,
  output_range_monitor,
  cross_check_monitor,
};

enum class ActionKind { filter, replace, mask, failover };
enum class ChannelKind { raw, hidden };

struct MonitorAction {
  ActionKind kind = ActionKind::filter;
  double value = 0.0;  // replace
  friend bool operator==(const MonitorAction&, const MonitorAction&) = default;
};

struct MonitorConfig {
  MonitorKind kind = MonitorKind::range_monitor;
  MonitorAction action;
  std::string node;                              // range, extreme_value
  double tolerance = 1e-9;                       // extreme_value, known_input (normalized)
  std::vector<std::vector<double>> known_inputs;  // known_input, in MLM parameter order
  double output_lo = 0.0;                        // output_range
  double output_hi = 0.0;
  std::string parameter;                         // cross_check
  double threshold = 0.5;
  ChannelKind channel = ChannelKind::raw;
  friend bool operator==(const MonitorConfig&, const MonitorConfig&) = default;
};

enum class StubKind { bilinear, lookup_table };

struct StubSpec {
  StubKind kind = StubKind::bilinear;
  /// Bilinear: c0, then one linear term per parameter, then one term per
  /// unordered parameter pair (i<j) in row-major order, all over
  /// box-normalized inputs. Missing trailing terms are zero; an empty list
  /// selects the default (sum of normalized inputs).
  std::vector<double> coefficients;
  /// Lookup table: grid axes in parameter order, values in row-major order
  /// (last axis fastest), multilinear interpolation between nodes.
  std::vector<std::pair<std::string, std::vector<double>>> axes;
  std::vector<double> table;
  friend bool operator==(const StubSpec&, const StubSpec&) = default;
};

struct ScenarioSpec {
  std::string name;
  std::string mlm;
  std::string mlc;
  std::optional<std::string> mlc_operated;
  std::optional<std::string> extended;
  std::string stream;  // dataset path, relative to the scenario file
  StubSpec stub;
  std::uint64_t seed = 0;
  std::vector<MonitorConfig> monitors;
  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

std::string_view to_string(MonitorKind kind);
std::string_view to_string(ActionKind kind);
std::string_view to_string(ChannelKind kind);
/// Accepts both `range` and `range_monitor` spellings.
bool parse_enum(std::string_view text, MonitorKind& out);
bool parse_enum(std::string_view text, ActionKind& out);
bool parse_enum(std::string_view text, ChannelKind& out);

/// Input-side monitors look only at inputs; output_range needs the model.
inline bool is_input_side(MonitorKind kind) { return kind != MonitorKind::output_range_monitor; }

}  // namespace oddkit
