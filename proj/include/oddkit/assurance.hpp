// SPDX-License-Identifier: Apache-2.0
//
// ERLA rule engine (effects, requirements, learning assurance,
// architecture per partition), coverage metrics and ODD update proposals.
//
// Rule files are line-oriented records:
//   rule { kinds [InMOD/OutS] categories [EdgeCase, FeasibleCornerCase]
//          E [mlm-malfunction] R [] L [] A [extreme-value-monitoring] }
//   na   { kinds [InMOD/OutS] categories [Outlier] }
// Codes are identifiers or strings. Codes prefixed `nn:` are non-normative
// placeholders for cells whose content the source analysis leaves open.
// Rule-base codes: E001 syntax, E011 unknown kind set or category,
// E301 overlapping cells, E302 reachable cell without rule, W301 unknown field.
#pragma once

#include "oddkit/classifier.hpp"
#include "oddkit/diagnostic.hpp"

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace oddkit {

struct ErlaRule {
  std::set<KindSet> kinds;
  std::set<CategoryLabel> categories;
  std::vector<std::string> effects;
  std::vector<std::string> requirements;
  std::vector<std::string> learning_assurance;
  std::vector<std::string> architecture;
  bool not_applicable = false;
  std::size_t line = 0;
  friend bool operator==(const ErlaRule&, const ErlaRule&) = default;
};

struct NotApplicable {
  friend bool operator==(const NotApplicable&, const NotApplicable&) = default;
};

using ErlaLookup = std::variant<NotApplicable, ErlaRule>;

class UnvalidatedRuleBase : public Error {
 public:
  UnvalidatedRuleBase() : Error("rule base used before successful validation") {}
};

class RuleBase {
 public:
  RuleBase() = default;
  explicit RuleBase(std::vector<ErlaRule> rules) : rules_(std::move(rules)) {}

  /// Checks overlap and totality over reachable_keys(); marks the base
  /// usable when no error is found.
  std::vector<Diagnostic> validate();
  [[nodiscard]] bool validated() const { return validated_; }
  [[nodiscard]] const std::vector<ErlaRule>& rules() const { return rules_; }

  /// The rule owning `key`, or NotApplicable for `na` cells and cells no
  /// partition can produce. Throws UnvalidatedRuleBase.
  [[nodiscard]] ErlaLookup lookup(const PartitionKey& key) const;

 private:
  std::vector<ErlaRule> rules_;
  bool validated_ = false;
};

ErlaLookup lookup_erla(const PartitionKey& key, const RuleBase& rules);

/// Every key partition_dataset can emit. InMOD rows are judged against the
/// MLM, so they are never Outlier or InfeasibleCornerCase; OutMOD rows are
/// judged against the MLC, so they are inside it and cannot be Novelty
/// (which needs MLM membership); OutCOD collapses to one bucket.
std::set<PartitionKey> reachable_keys();
std::set<PartitionKey> all_keys();

struct RuleParse {
  RuleBase rules;
  std::vector<Diagnostic> diagnostics;
  [[nodiscard]] bool ok() const { return !has_errors(diagnostics); }
};

/// Parses and validates.
RuleParse parse_rules(std::string_view text);
std::string_view default_rules_text();

// ---------------------------------------------------------------------------

struct PartitionSection {
  PartitionKey key;
  std::size_t count = 0;
  std::vector<std::size_t> sample_rows;  // at most five
  ErlaLookup erla;
};

struct AnalysisReport {
  std::vector<PartitionSection> sections;  // populated partitions in key order
  std::size_t rows = 0;
};

AnalysisReport analyze_partitions(const Dataset& ds, const Chain& chain, const RuleBase& rules,
                                  Tolerance tol);
AnalysisReport analyze_labels(const std::vector<RowLabel>& labels, const RuleBase& rules);
std::string render_text(const AnalysisReport& report);
/// kinds,category,count,sample_rows,applicable,effects,requirements,learning_assurance,architecture
std::string render_csv(const AnalysisReport& report);

// ---------------------------------------------------------------------------

struct CoverageOptions {
  std::size_t grid_n = 20;
  std::size_t grid_m = 20;
  double vertex_tolerance = 1e-3;  // normalized
};

struct CoverageReport {
  std::map<CategoryLabel, std::size_t> counts;
  double vertex_coverage = 0.0;
  double edge_coverage = 0.0;
  double interior_grid_coverage = 0.0;
  std::size_t vertices = 0, vertices_hit = 0;
  std::size_t edge_slices = 0, edge_slices_hit = 0;
  std::size_t grid_cells = 0, grid_cells_hit = 0;
  std::vector<CategoryLabel> empty_required_partitions;
};

/// Categories are judged against `node` alone. Vertex coverage counts
/// vertices with a row within the vertex tolerance; edge coverage counts
/// (parameter, lo|hi) slices touching the region that hold a row inside the
/// region; the grid spans the first two parameters and counts only cells
/// whose center lies in the region (projected for higher dimensions).
/// Required partitions: Nominal, plus EdgeCase and FeasibleCornerCase when
/// the region admits them.
CoverageReport coverage_report(const Dataset& ds, const OddNode& node,
                               const CoverageOptions& options = {});
std::string render_text(const CoverageReport& report);

// ---------------------------------------------------------------------------

class EmptyInput : public Error {
 public:
  EmptyInput() : Error("no observed points") {}
};

struct BoundProposal {
  std::string parameter;
  bool upper = true;
  double current = 0.0;
  double proposed = 0.0;
  std::size_t count = 0;  // points beyond the current bound
  double median = 0.0;    // of those points
  double outer_decile = 0.0;  // p90 for upper bounds, p10 for lower
};

struct ParameterCandidate {
  std::string parameter;
  std::size_t count = 0;  // rows carrying a hidden value for it
};

struct UpdateProposal {
  std::string node;
  std::vector<BoundProposal> bounds;
  std::vector<ParameterCandidate> candidates;
  [[nodiscard]] bool empty() const { return bounds.empty() && candidates.empty(); }
};

/// Advisory only. Each bound moves to the observed extremum of points
/// beyond it by more than the node tolerance. Throws EmptyInput.
UpdateProposal propose_odd_update(const Dataset& observed, const OddNode& node);
std::string render_text(const UpdateProposal& proposal);

}  // namespace oddkit
