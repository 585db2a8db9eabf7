// SPDX-License-Identifier: Apache-2.0
#include "oddkit/classifier.hpp"

#include "oddkit/dataset.hpp"
#include "oddkit/diagnostic.hpp"
#include "oddkit/lexer.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace oddkit {

KindSet kind_set(Kind k) {
  switch (k) {
    case Kind::InS: return KindSet::InMOD_InS;
    case Kind::OutS: return KindSet::InMOD_OutS;
    case Kind::OutMOD: return KindSet::InCOD_OutMOD;
    case Kind::OutCOD: return KindSet::OutCOD;
  }
  return KindSet::OutCOD;
}

std::string_view to_string(CategoryLabel c) {
  switch (c) {
    case CategoryLabel::Nominal: return "Nominal";
    case CategoryLabel::EdgeCase: return "EdgeCase";
    case CategoryLabel::FeasibleCornerCase: return "FeasibleCornerCase";
    case CategoryLabel::InfeasibleCornerCase: return "InfeasibleCornerCase";
    case CategoryLabel::Outlier: return "Outlier";
    case CategoryLabel::Inlier: return "Inlier";
    case CategoryLabel::Novelty: return "Novelty";
  }
  return "?";
}

std::string_view to_string(Kind k) {
  switch (k) {
    case Kind::InS: return "InS";
    case Kind::OutS: return "OutS";
    case Kind::OutMOD: return "OutMOD";
    case Kind::OutCOD: return "OutCOD";
  }
  return "?";
}

std::string_view to_string(KindSet k) {
  switch (k) {
    case KindSet::InMOD_InS: return "InMOD/InS";
    case KindSet::InMOD_OutS: return "InMOD/OutS";
    case KindSet::InCOD_OutMOD: return "InCOD/OutMOD";
    case KindSet::OutCOD: return "OutCOD";
  }
  return "?";
}

bool parse_enum(std::string_view text, CategoryLabel& out) {
  for (auto c : kAllCategories) {
    if (to_string(c) == text) {
      out = c;
      return true;
    }
  }
  return false;
}

bool parse_enum(std::string_view text, Kind& out) {
  for (auto k : {Kind::InS, Kind::OutS, Kind::OutMOD, Kind::OutCOD}) {
    if (to_string(k) == text) {
      out = k;
      return true;
    }
  }
  return false;
}

bool parse_enum(std::string_view text, KindSet& out) {
  for (auto k : kAllKindSets) {
    if (to_string(k) == text) {
      out = k;
      return true;
    }
  }
  return false;
}

std::string to_string(const PartitionKey& key) {
  return std::string(to_string(key.kinds)) + " x " + std::string(to_string(key.category));
}

// ---------------------------------------------------------------------------

SampleRegistry::SampleRegistry(const OddNode& mlm, const std::vector<DataPoint>& points,
                               Tolerance tol)
    : names_(parameter_names(mlm)), lo_(mlm.box_lo()), span_(mlm.box_span()),
      tol_(tol.relative) {
  for (const auto& p : points) {
    if (p.in_sample != true) continue;
    points_.push_back(normalize(mlm, coordinates(p, mlm)));
  }
  std::sort(points_.begin(), points_.end(),
            [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return a(0) < b(0); });
}

bool SampleRegistry::matches(const DataPoint& p) const {
  if (points_.empty()) return false;
  Eigen::VectorXd u(static_cast<Eigen::Index>(names_.size()));
  for (std::size_t i = 0; i < names_.size(); ++i) {
    const auto it = p.values.find(names_[i]);
    if (it == p.values.end()) throw MissingParameter(names_[i]);
    const auto k = static_cast<Eigen::Index>(i);
    u(k) = (it->second - lo_(k)) / span_(k);
  }
  const auto first = std::lower_bound(
      points_.begin(), points_.end(), u(0) - tol_,
      [](const Eigen::VectorXd& a, double v) { return a(0) < v; });
  for (auto it = first; it != points_.end() && (*it)(0) <= u(0) + tol_; ++it) {
    if (((*it) - u).cwiseAbs().maxCoeff() <= tol_) return true;
  }
  return false;
}

Chain make_chain(const SpecDocument& doc, const ChainNames& names,
                 const std::vector<DataPoint>& samples) {
  auto fetch = [&](const std::string& name) -> const OddNode& {
    const OddNode* n = doc.find(name);
    if (!n) throw ChainError("unknown node '" + name + "'");
    return *n;
  };
  Chain chain{fetch(names.mlm), fetch(names.mlc), std::nullopt, std::nullopt, std::nullopt, {}};

  // Walk allocates links from the MLM; the MLC must be reached.
  std::set<std::string> seen;
  const OddNode* cur = &chain.mlm;
  bool reached = false;
  while (cur && cur->allocates && seen.insert(cur->name).second) {
    if (*cur->allocates == names.mlc) {
      reached = true;
      break;
    }
    cur = doc.find(*cur->allocates);
  }
  if (!reached)
    throw ChainError("node '" + names.mlm + "' does not allocate to '" + names.mlc + "'");

  if (names.mlc_operated) {
    chain.mlc_operated = fetch(*names.mlc_operated);
    if (chain.mlc_operated->parameters.size() != chain.mlc.parameters.size())
      throw ChainError("as-operated node '" + *names.mlc_operated +
                       "' must model the same parameters as '" + names.mlc + "'");
  }
  if (names.extended) {
    chain.extended = fetch(*names.extended);
    if (chain.extended->extends != names.mlm)
      throw ChainError("node '" + *names.extended + "' does not extend '" + names.mlm + "'");
  }
  chain.system_od = [&]() -> std::optional<OddNode> {
    if (const OddNode* s = doc.first_with_level(OddLevel::system_od)) return *s;
    return std::nullopt;
  }();
  chain.registry = SampleRegistry(chain.mlm, samples, chain.mlm.tolerance);
  return chain;
}

// ---------------------------------------------------------------------------

namespace {

bool corrupted(const DataPoint& p, const OddNode& node, Tolerance tol) {
  bool any = false;
  for (const auto& [name, raw] : p.provenance_raw) {
    const auto idx = node.index_of(name);
    if (!idx) continue;
    const Transform* t = node.preprocessing_for(name);
    if (!t) throw MissingTransform(name, node.name);
    const auto it = p.values.find(name);
    if (it == p.values.end()) throw MissingParameter(name);
    const double span = node.parameters[*idx].range.span();
    if (std::abs(t->apply(raw) - it->second) / span > tol.relative) any = true;
  }
  return any;
}

bool novel(const DataPoint& p, const Chain& chain, Tolerance tol) {
  const OddNode& ext = *chain.extended;
  DataPoint combined;
  for (const auto& param : ext.parameters) {
    if (auto it = p.values.find(param.name); it != p.values.end()) {
      combined.values[param.name] = it->second;
    } else if (auto h = p.hidden_values.find(param.name); h != p.hidden_values.end()) {
      combined.values[param.name] = h->second;
    } else {
      return false;
    }
  }
  bool uses_hidden = false;
  for (const auto& [name, v] : p.hidden_values) uses_hidden = uses_hidden || ext.index_of(name);
  if (!uses_hidden) return false;
  for (const auto& param : chain.mlm.parameters) {
    if (!p.values.count(param.name)) return false;
  }
  if (point_in_region(p, chain.mlm, tol) == Containment::outside) return false;
  return point_in_region(combined, ext, tol) == Containment::outside;
}

}  // namespace

CategoryDetail classify_detail(const DataPoint& p, const OddNode& node, const Chain* context,
                               Tolerance tol) {
  CategoryDetail out;
  out.containment = point_in_region(p, node, tol);
  out.extremes = params_at_extreme(p, node, tol);
  const bool inside = out.containment != Containment::outside;

  const bool mismatched = !p.provenance_raw.empty() && corrupted(p, node, tol);
  if (inside && mismatched) {
    out.category.label = CategoryLabel::Inlier;
    return out;
  }
  if (inside && context && context->extended && !p.hidden_values.empty() &&
      novel(p, *context, tol)) {
    out.category.label = CategoryLabel::Novelty;
    return out;
  }
  const std::size_t k = out.extremes.size();
  if (inside) {
    out.category.label = k == 0   ? CategoryLabel::Nominal
                         : k == 1 ? CategoryLabel::EdgeCase
                                  : CategoryLabel::FeasibleCornerCase;
  } else {
    out.category.label = k >= 2 ? CategoryLabel::InfeasibleCornerCase : CategoryLabel::Outlier;
  }
  return out;
}

Category classify_category(const DataPoint& p, const OddNode& node, const Chain* context,
                           Tolerance tol) {
  return classify_detail(p, node, context, tol).category;
}

Category classify_category(const DataPoint& p, const OddNode& node) {
  return classify_category(p, node, nullptr, node.tolerance);
}

Kind classify_kind(const DataPoint& p, const Chain& chain, Tolerance tol) {
  if (point_in_region(p, chain.mlm, tol) != Containment::outside) {
    return p.in_sample == true || chain.registry.matches(p) ? Kind::InS : Kind::OutS;
  }
  return point_in_region(p, chain.mlc, tol) != Containment::outside ? Kind::OutMOD
                                                                     : Kind::OutCOD;
}

PartitionKey RowLabel::key() const {
  if (kind == Kind::OutCOD) return {KindSet::OutCOD, CategoryLabel::Outlier};
  return {kind_set(kind), category.label};
}

std::vector<RowLabel> label_rows(const Dataset& ds, const Chain& chain, Tolerance tol) {
  std::vector<RowLabel> out;
  out.reserve(ds.size());
  for (std::size_t r = 0; r < ds.size(); ++r) {
    const DataPoint& p = ds.rows[r];
    RowLabel label;
    label.row = r;
    label.kind = classify_kind(p, chain, tol);
    const bool in_mod = label.kind == Kind::InS || label.kind == Kind::OutS;
    const OddNode& node = in_mod ? chain.mlm : chain.mlc;
    const CategoryDetail detail = classify_detail(p, node, &chain, tol);
    label.category = detail.category;
    label.node = node.name;
    label.on_boundary = detail.containment == Containment::on_boundary;

    std::vector<std::string> notes;
    if (!detail.extremes.empty()) {
      std::string joined;
      for (const auto& e : detail.extremes) joined += (joined.empty() ? "" : "|") + e;
      notes.push_back("extremes=" + joined);
    }
    if (label.kind == Kind::OutCOD) {
      auto annotate = [&](const char* key, const std::optional<OddNode>& n) {
        if (!n) return;
        for (const auto& param : n->parameters) {
          if (!p.values.count(param.name)) return;
        }
        const Category c = classify_category(p, *n, &chain, tol);
        notes.push_back(std::string(key) + "=" + std::string(to_string(c.label)));
      };
      annotate("sod", chain.system_od);
      annotate("operated", chain.mlc_operated);
    }
    for (const auto& n : notes) label.annotations += (label.annotations.empty() ? "" : ";") + n;
    out.push_back(std::move(label));
  }
  return out;
}

std::string write_labels(const std::vector<RowLabel>& labels) {
  std::string out = "row,kind,category,node,on_boundary,annotations\n";
  for (const auto& l : labels) {
    out += std::to_string(l.row) + ',' + std::string(to_string(l.kind)) + ',' +
           std::string(to_string(l.category.label)) + ',' + csv_field(l.node) + ',' +
           (l.on_boundary ? "1" : "0") + ',' + csv_field(l.annotations) + '\n';
  }
  return out;
}

PartitionMap partition_from_labels(const std::vector<RowLabel>& labels) {
  PartitionMap out;
  for (const auto& l : labels) out[l.key()].push_back(l.row);
  return out;
}

PartitionMap partition_dataset(const Dataset& ds, const Chain& chain, Tolerance tol) {
  return partition_from_labels(label_rows(ds, chain, tol));
}

std::vector<KindClaim> read_kind_claims(std::string_view labels_csv) {
  std::vector<Diagnostic> diags;
  const CsvTable table = read_csv(labels_csv, diags);
  std::vector<KindClaim> out;
  if (table.records.empty()) return out;
  const auto& header = table.records.front();
  const auto col = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    return std::nullopt;
  };
  const auto row_col = col("row"), kind_col = col("kind");
  if (!row_col || !kind_col) throw Error("label file needs 'row' and 'kind' columns");
  for (std::size_t r = 1; r < table.records.size(); ++r) {
    const auto& rec = table.records[r];
    if (rec.size() <= std::max(*row_col, *kind_col)) continue;
    const auto row = parse_number(rec[*row_col]);
    if (!row || *row < 0 || *row != std::floor(*row)) continue;
    out.push_back({static_cast<std::size_t>(*row), rec[*kind_col]});
  }
  return out;
}

SetAlgebraReport verify_set_algebra(const Dataset& ds, const Chain& chain, Tolerance tol,
                                    const std::vector<KindClaim>* claims) {
  std::vector<std::vector<std::string>> claimed(ds.size());
  if (claims) {
    for (const auto& c : *claims) {
      if (c.row < ds.size()) claimed[c.row].push_back(c.kind);
    }
  } else {
    for (std::size_t r = 0; r < ds.size(); ++r)
      claimed[r].emplace_back(to_string(classify_kind(ds.rows[r], chain, tol)));
  }

  SetAlgebraReport report;
  auto violate = [&](std::size_t row, const char* identity) {
    report.violations.push_back({row, identity});
  };
  for (std::size_t r = 0; r < ds.size(); ++r) {
    const DataPoint& p = ds.rows[r];
    const std::set<std::string> kinds(claimed[r].begin(), claimed[r].end());
    std::set<Kind> parsed;
    for (const auto& k : kinds) {
      Kind kind;
      if (parse_enum(k, kind)) parsed.insert(kind);
    }
    if (parsed.empty()) {
      violate(r, "totality");
      continue;
    }
    if (kinds.size() > 1 || parsed.size() != kinds.size()) violate(r, "disjointness");

    const bool in_mod_geo = point_in_region(p, chain.mlm, tol) != Containment::outside;
    const bool in_cod_geo = point_in_region(p, chain.mlc, tol) != Containment::outside;
    const bool in_mod_label = parsed.count(Kind::InS) || parsed.count(Kind::OutS);
    const bool in_cod_label = in_mod_label || parsed.count(Kind::OutMOD);
    if (in_mod_label != in_mod_geo) violate(r, "InMOD = InS ∪ OutS");
    if (in_cod_label != in_cod_geo || (parsed.count(Kind::OutCOD) && in_cod_geo))
      violate(r, "InCOD = InMOD ∪ OutMOD");
    if (in_mod_geo) {
      const bool sampled = p.in_sample == true || chain.registry.matches(p);
      if (parsed.count(Kind::InS) != (sampled ? 1u : 0u) && in_mod_label)
        violate(r, "InS ⊆ sample registry");
    }
  }
  report.holds = report.violations.empty();
  return report;
}

}  // namespace oddkit
