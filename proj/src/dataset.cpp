// SPDX-License-Identifier: Apache-2.0
#include "oddkit/dataset.hpp"

#include "oddkit/lexer.hpp"

#include <map>
#include <set>

namespace oddkit {

CsvTable read_csv(std::string_view text, std::vector<Diagnostic>& diagnostics) {
  CsvTable table;
  std::vector<std::string> record;
  std::string field;
  std::size_t i = 0, line = 1, record_line = 1;
  bool quoted = false, field_started = false, any = false;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    const bool blank = record.size() == 1 && record[0].empty();
    if (!blank) {
      table.records.push_back(std::move(record));
      table.lines.push_back(record_line);
    }
    record.clear();
    any = false;
  };

  while (i < text.size()) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          i += 2;
          continue;
        }
        quoted = false;
        ++i;
        continue;
      }
      if (c == '\n') ++line;
      field += c;
      ++i;
      continue;
    }
    if (!any) {
      record_line = line;
      any = true;
    }
    if (c == '"' && !field_started && field.empty()) {
      quoted = true;
      field_started = true;
      ++i;
      continue;
    }
    if (c == ',') {
      end_field();
      ++i;
      continue;
    }
    if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      ++i;
      continue;
    }
    if (c == '\n') {
      end_record();
      ++line;
      ++i;
      continue;
    }
    field += c;
    field_started = true;
    ++i;
  }
  if (quoted)
    diagnostics.push_back({Severity::error, "E100", "unterminated quoted field", {record_line, 1, line, 1}});
  if (any || !field.empty() || !record.empty()) end_record();
  return table;
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> parameter_names(const OddNode& node) {
  std::vector<std::string> out;
  for (const auto& p : node.parameters) out.push_back(p.name);
  return out;
}

namespace {

enum class ColumnRole { value, raw, hidden, in_sample, label, ignored };

struct Column {
  ColumnRole role = ColumnRole::ignored;
  std::string parameter;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

DatasetParse parse_dataset(std::string_view csv, const OddNode& node) {
  DatasetParse out;
  auto& diags = out.diagnostics;
  const CsvTable table = read_csv(csv, diags);
  if (table.records.empty()) {
    for (const auto& p : node.parameters)
      diags.push_back({Severity::error, "E101", "missing column for parameter '" + p.name + "'", {1, 1, 1, 1}});
    return out;
  }

  // Leading `#` records carry provenance such as generator seeds.
  std::size_t first = 0;
  while (first < table.records.size() && !table.records[first].empty() &&
         table.records[first][0].rfind('#', 0) == 0)
    ++first;
  if (first == table.records.size()) {
    for (const auto& p : node.parameters)
      diags.push_back({Severity::error, "E101", "missing column for parameter '" + p.name + "'", {1, 1, 1, 1}});
    return out;
  }
  const auto& header = table.records[first];
  const std::size_t header_line = table.lines[first];
  std::vector<Column> columns(header.size());
  std::set<std::string> seen;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name = trim(header[c]);
    const SourceSpan at{header_line, c + 1, header_line, c + 1};
    if (!seen.insert(name).second) {
      diags.push_back({Severity::error, "E102", "duplicate column '" + name + "'", at});
      continue;
    }
    Column& col = columns[c];
    if (name.rfind("raw:", 0) == 0) {
      col = {ColumnRole::raw, name.substr(4)};
    } else if (name.rfind("hidden:", 0) == 0) {
      col = {ColumnRole::hidden, name.substr(7)};
    } else if (name == "in_sample") {
      col.role = ColumnRole::in_sample;
    } else if (name == "label") {
      col.role = ColumnRole::label;
    } else if (node.index_of(name)) {
      col = {ColumnRole::value, name};
    } else {
      diags.push_back({Severity::warning, "W101", "column '" + name + "' ignored", at});
    }
  }
  for (const auto& p : node.parameters) {
    if (!seen.count(p.name))
      diags.push_back({Severity::error, "E101", "missing column for parameter '" + p.name + "'",
                       {header_line, 1, header_line, 1}});
  }
  if (has_errors(diags)) return out;

  bool labelled = false;
  for (const auto& col : columns) labelled = labelled || col.role == ColumnRole::label;

  for (std::size_t r = first + 1; r < table.records.size(); ++r) {
    const auto& rec = table.records[r];
    const std::size_t line = table.lines[r];
    if (rec.size() != header.size()) {
      diags.push_back({Severity::warning, "W104",
                       "row has " + std::to_string(rec.size()) + " fields, header has " +
                           std::to_string(header.size()) + "; row excluded",
                       {line, 1, line, 1}});
      continue;
    }
    DataPoint p;
    std::optional<std::string> label;
    std::string problem;
    for (std::size_t c = 0; c < rec.size() && problem.empty(); ++c) {
      const Column& col = columns[c];
      const std::string cell = trim(rec[c]);
      switch (col.role) {
        case ColumnRole::value:
        case ColumnRole::raw:
        case ColumnRole::hidden: {
          if (cell.empty() && col.role != ColumnRole::value) break;
          const auto v = parse_number(cell);
          if (!v) {
            problem = "unparseable number '" + cell + "' in column '" + header[c] + "'";
            break;
          }
          auto& target = col.role == ColumnRole::value ? p.values
                         : col.role == ColumnRole::raw ? p.provenance_raw
                                                       : p.hidden_values;
          target[col.parameter] = *v;
          break;
        }
        case ColumnRole::in_sample:
          if (cell == "1" || cell == "true") p.in_sample = true;
          else if (cell == "0" || cell == "false") p.in_sample = false;
          else if (!cell.empty()) problem = "in_sample must be 0, 1, true or false, found '" + cell + "'";
          break;
        case ColumnRole::label:
          if (!cell.empty()) label = cell;
          break;
        case ColumnRole::ignored:
          break;
      }
    }
    if (!problem.empty()) {
      diags.push_back({Severity::warning, "W103", problem + "; row excluded", {line, 1, line, 1}});
      continue;
    }
    out.dataset.rows.push_back(std::move(p));
    if (labelled) out.dataset.oracle_labels.push_back(std::move(label));
    out.source_lines.push_back(line);
  }
  return out;
}

std::string write_dataset(const Dataset& ds, const std::vector<std::string>& columns) {
  std::set<std::string> raw, hidden;
  bool in_sample = false;
  for (const auto& p : ds.rows) {
    for (const auto& [k, v] : p.provenance_raw) raw.insert(k);
    for (const auto& [k, v] : p.hidden_values) hidden.insert(k);
    in_sample = in_sample || p.in_sample.has_value();
  }
  const bool labelled = !ds.oracle_labels.empty();

  std::string out;
  auto sep = [&](bool& first) {
    if (!first) out += ',';
    first = false;
  };
  bool first = true;
  for (const auto& c : columns) sep(first), out += csv_field(c);
  for (const auto& c : raw) sep(first), out += csv_field("raw:" + c);
  for (const auto& c : hidden) sep(first), out += csv_field("hidden:" + c);
  if (in_sample) sep(first), out += "in_sample";
  if (labelled) sep(first), out += "label";
  out += '\n';

  auto cell = [](const std::map<std::string, double>& m, const std::string& k) {
    const auto it = m.find(k);
    return it == m.end() ? std::string() : format_shortest(it->second);
  };
  for (std::size_t r = 0; r < ds.rows.size(); ++r) {
    const auto& p = ds.rows[r];
    first = true;
    for (const auto& c : columns) sep(first), out += cell(p.values, c);
    for (const auto& c : raw) sep(first), out += cell(p.provenance_raw, c);
    for (const auto& c : hidden) sep(first), out += cell(p.hidden_values, c);
    if (in_sample) sep(first), out += p.in_sample ? (*p.in_sample ? "1" : "0") : "";
    if (labelled) {
      sep(first);
      if (r < ds.oracle_labels.size() && ds.oracle_labels[r]) out += csv_field(*ds.oracle_labels[r]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace oddkit
