// SPDX-License-Identifier: Apache-2.0
//
// CSV datasets (RFC 4180 quoting, header required).
//
// Header columns map to parameters by exact name. Special columns:
//   raw:<param>     pre-processing value of <param>   (DataPoint::provenance_raw)
//   hidden:<param>  value of a parameter the node does not model (hidden_values)
//   in_sample       0/1/true/false                     (in_sample)
//   label           oracle category label carried with a stream
// Any other column is ignored with a W101 warning. Records before the
// header whose first field starts with '#' are comments.
#pragma once

#include "oddkit/diagnostic.hpp"
#include "oddkit/model.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace oddkit {

struct CsvTable {
  std::vector<std::vector<std::string>> records;
  std::vector<std::size_t> lines;  // 1-based starting line of each record
};

/// RFC 4180 reader: quoted fields, doubled quotes, CRLF or LF, embedded
/// newlines. Unterminated quotes yield E100.
CsvTable read_csv(std::string_view text, std::vector<Diagnostic>& diagnostics);
std::string csv_field(std::string_view value);

struct DatasetParse {
  Dataset dataset;
  std::vector<Diagnostic> diagnostics;
  /// CSV line of each kept row, parallel to dataset.rows.
  std::vector<std::size_t> source_lines;
  [[nodiscard]] bool ok() const { return !has_errors(diagnostics); }
};

/// Codes: E100 malformed CSV, E101 missing parameter column, E102 duplicate
/// column, W101 ignored column, W103 unparseable row (excluded), W104 wrong
/// field count (excluded). Numbers accept only '.' as decimal separator.
DatasetParse parse_dataset(std::string_view csv, const OddNode& node);

/// Writes `columns` as value columns, then raw:, hidden:, in_sample and
/// label columns for whatever provenance the rows carry. Numbers use the
/// shortest round-trip form.
std::string write_dataset(const Dataset& ds, const std::vector<std::string>& columns);
std::vector<std::string> parameter_names(const OddNode& node);

}  // namespace oddkit
