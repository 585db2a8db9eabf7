// SPDX-License-Identifier: Apache-2.0
//
// The `.odd` specification language.
//
//   document  := (node | monitorchain)*
//   node      := 'odd' STRING attr* '{' statement* '}'
//   attr      := 'level' IDENT | 'variant' IDENT | 'allocates' STRING | 'extends' STRING
//   statement := 'param' IDENT ':' IDENT 'range' '[' NUM ',' NUM ']' ['class' IDENT] [dist]
//              | 'region' 'polygon' '{' point+ '}'
//              | 'region' 'polytope' '{' ('halfspace' NUM+ '<=' NUM | 'vertex' point)+ '}'
//              | 'preprocess' IDENT ('identity' | 'scale' NUM | 'offset' NUM | 'unit_swap' NUM)
//              | 'tolerance' NUM
//   dist      := 'dist' ('uniform' | 'triangular' NUM | 'histogram' '[' NUM (',' NUM)* ']')
//   point     := '(' NUM ',' NUM (',' NUM)* ')'
//
// Several `region polytope` blocks in one node form a union. Statements are
// line oriented; `#` comments run to end of line.
#pragma once

#include "oddkit/diagnostic.hpp"
#include "oddkit/model.hpp"
#include "oddkit/scenario.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace oddkit {

struct SpecDocument {
  std::vector<OddNode> nodes;
  std::vector<ScenarioSpec> scenarios;
  /// Keyed by node name, or `monitorchain:NAME` for scenarios.
  std::map<std::string, SourceSpan> source_map;

  [[nodiscard]] const OddNode* find(std::string_view name) const;
  [[nodiscard]] const ScenarioSpec* find_scenario(std::string_view name) const;
  [[nodiscard]] const OddNode* first_with_level(OddLevel level) const;
};

/// Structural identity: nodes and scenarios, ignoring source locations.
bool structurally_equal(const SpecDocument& a, const SpecDocument& b);

struct ParseResult {
  SpecDocument document;
  std::vector<Diagnostic> diagnostics;
  [[nodiscard]] bool ok() const { return !has_errors(diagnostics); }
};

/// Parses and validates a document. Reports every problem it can find in
/// one pass. Codes:
///   E001 syntax            E002 duplicate name      E003 unresolved reference
///   E004 degenerate region E005 range lo > hi       E006 region outside box
///   E007 several system_od E008 allocation cycle    E009 extends invariant
///   E010 arity mismatch    E011 invalid enum value  E012 missing params/region
///   E013 invalid transform or distribution
///   W001 unknown attribute W002 unknown statement
ParseResult parse_spec(std::string_view text);

/// Canonical text: attributes sorted by key, preprocess entries sorted by
/// parameter, numbers with up to nine significant digits.
std::string serialize_spec(const SpecDocument& doc);

/// Sampling check that each `allocates` child lies within its parent.
/// Produces W201 warnings; an ODD may legitimately exceed its parent.
std::vector<Diagnostic> check_allocations(const SpecDocument& doc, std::size_t samples = 256);

}  // namespace oddkit
