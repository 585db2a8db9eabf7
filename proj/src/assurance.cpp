// SPDX-License-Identifier: Apache-2.0
#include "oddkit/assurance.hpp"

#include "oddkit/dataset.hpp"
#include "oddkit/geometry.hpp"
#include "oddkit/lexer.hpp"

#include "default_rules.inc"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

namespace oddkit {

std::string_view default_rules_text() { return kDefaultRules; }

std::set<PartitionKey> all_keys() {
  std::set<PartitionKey> out;
  for (auto k : kAllKindSets)
    for (auto c : kAllCategories) out.insert({k, c});
  return out;
}

std::set<PartitionKey> reachable_keys() {
  using C = CategoryLabel;
  std::set<PartitionKey> out;
  for (auto k : {KindSet::InMOD_InS, KindSet::InMOD_OutS})
    for (auto c : {C::Nominal, C::EdgeCase, C::FeasibleCornerCase, C::Inlier, C::Novelty})
      out.insert({k, c});
  for (auto c : {C::Nominal, C::EdgeCase, C::FeasibleCornerCase, C::Inlier})
    out.insert({KindSet::InCOD_OutMOD, c});
  out.insert({KindSet::OutCOD, C::Outlier});
  return out;
}

std::vector<Diagnostic> RuleBase::validate() {
  std::vector<Diagnostic> diags;
  std::map<PartitionKey, const ErlaRule*> owner;
  for (const auto& rule : rules_) {
    for (auto k : rule.kinds) {
      for (auto c : rule.categories) {
        const PartitionKey key{k, c};
        const auto [it, fresh] = owner.emplace(key, &rule);
        if (!fresh)
          diags.push_back({Severity::error, "E301",
                           "cell " + to_string(key) + " already claimed by the record on line " +
                               std::to_string(it->second->line),
                           {rule.line, 1, rule.line, 1}});
      }
    }
  }
  for (const auto& key : reachable_keys()) {
    if (!owner.count(key))
      diags.push_back({Severity::error, "E302", "reachable cell " + to_string(key) + " has no rule",
                       {1, 1, 1, 1}});
  }
  validated_ = !has_errors(diags);
  return diags;
}

ErlaLookup RuleBase::lookup(const PartitionKey& key) const {
  if (!validated_) throw UnvalidatedRuleBase();
  for (const auto& rule : rules_) {
    if (rule.kinds.count(key.kinds) && rule.categories.count(key.category)) {
      if (rule.not_applicable) return NotApplicable{};
      return rule;
    }
  }
  return NotApplicable{};
}

ErlaLookup lookup_erla(const PartitionKey& key, const RuleBase& rules) {
  return rules.lookup(key);
}

// ---------------------------------------------------------------------------

namespace {

struct SyntaxFailure {};

class RuleParser {
 public:
  RuleParser(std::string_view text, std::vector<Diagnostic>& diags)
      : diags_(diags), cursor_(tokenize(text, diags)) {}

  std::vector<ErlaRule> parse() {
    std::vector<ErlaRule> rules;
    while (!cursor_.done()) {
      const Token& head = cursor_.peek();
      try {
        if (cursor_.at_word("rule") || cursor_.at_word("na")) {
          rules.push_back(record());
        } else {
          error(head, "E001", "expected 'rule' or 'na', found " + show(head));
          throw SyntaxFailure{};
        }
      } catch (const SyntaxFailure&) {
        while (!cursor_.done() && !cursor_.at(TokenKind::rbrace)) {
          cursor_.next();
          if ((cursor_.at_word("rule") || cursor_.at_word("na")) && cursor_.peek().column == 1) break;
        }
        cursor_.accept(TokenKind::rbrace);
      }
    }
    return rules;
  }

 private:
  static std::string show(const Token& t) {
    if (t.kind == TokenKind::identifier || t.kind == TokenKind::number) return "'" + t.text + "'";
    return std::string(describe(t.kind));
  }

  void error(const Token& t, std::string code, std::string message) {
    diags_.push_back({Severity::error, std::move(code), std::move(message),
                      {t.line, t.column, t.line, t.column}});
  }

  std::vector<Token> list() {
    if (!cursor_.accept(TokenKind::lbracket)) {
      error(cursor_.peek(), "E001", "expected '[', found " + show(cursor_.peek()));
      throw SyntaxFailure{};
    }
    std::vector<Token> out;
    while (!cursor_.accept(TokenKind::rbracket)) {
      const Token& t = cursor_.peek();
      if (t.kind != TokenKind::identifier && t.kind != TokenKind::string) {
        error(t, "E001", "expected a code or ']', found " + show(t));
        throw SyntaxFailure{};
      }
      out.push_back(cursor_.next());
      cursor_.accept(TokenKind::comma);
    }
    return out;
  }

  template <typename E>
  std::set<E> labels(const char* what) {
    std::set<E> out;
    for (const auto& t : list()) {
      E v{};
      if (parse_enum(t.text, v))
        out.insert(v);
      else
        error(t, "E011", "unknown " + std::string(what) + " '" + t.text + "'");
    }
    return out;
  }

  std::vector<std::string> codes() {
    std::vector<std::string> out;
    for (const auto& t : list()) out.push_back(t.text);
    return out;
  }

  ErlaRule record() {
    const Token& head = cursor_.next();
    ErlaRule rule;
    rule.line = head.line;
    rule.not_applicable = head.text == "na";
    if (!cursor_.accept(TokenKind::lbrace)) {
      error(cursor_.peek(), "E001", "expected '{', found " + show(cursor_.peek()));
      throw SyntaxFailure{};
    }
    bool kinds = false, categories = false;
    while (!cursor_.accept(TokenKind::rbrace)) {
      const Token& field = cursor_.peek();
      if (field.kind != TokenKind::identifier) {
        error(field, "E001", "expected a field name or '}', found " + show(field));
        throw SyntaxFailure{};
      }
      cursor_.next();
      if (field.text == "kinds") {
        rule.kinds = labels<KindSet>("kind set");
        kinds = true;
      } else if (field.text == "categories") {
        rule.categories = labels<CategoryLabel>("category");
        categories = true;
      } else if (field.text == "E" && !rule.not_applicable) {
        rule.effects = codes();
      } else if (field.text == "R" && !rule.not_applicable) {
        rule.requirements = codes();
      } else if (field.text == "L" && !rule.not_applicable) {
        rule.learning_assurance = codes();
      } else if (field.text == "A" && !rule.not_applicable) {
        rule.architecture = codes();
      } else {
        diags_.push_back({Severity::warning, "W301", "unknown field '" + field.text + "' ignored",
                          {field.line, field.column, field.line, field.column}});
        list();
      }
    }
    if (!kinds || !categories)
      error(head, "E001", "record needs both 'kinds' and 'categories'");
    return rule;
  }

  std::vector<Diagnostic>& diags_;
  TokenCursor cursor_;
};

}  // namespace

RuleParse parse_rules(std::string_view text) {
  RuleParse out;
  RuleParser parser(text, out.diagnostics);
  out.rules = RuleBase(parser.parse());
  if (!has_errors(out.diagnostics)) {
    for (auto& d : out.rules.validate()) out.diagnostics.push_back(std::move(d));
  }
  std::stable_sort(out.diagnostics.begin(), out.diagnostics.end(),
                   [](const Diagnostic& a, const Diagnostic& b) {
                     return std::tie(a.location.line, a.location.column) <
                            std::tie(b.location.line, b.location.column);
                   });
  return out;
}

// ---------------------------------------------------------------------------

AnalysisReport analyze_labels(const std::vector<RowLabel>& labels, const RuleBase& rules) {
  AnalysisReport report;
  report.rows = labels.size();
  for (const auto& [key, rows] : partition_from_labels(labels)) {
    PartitionSection s{key, rows.size(), {}, rules.lookup(key)};
    s.sample_rows.assign(rows.begin(), rows.begin() + std::ptrdiff_t(std::min<std::size_t>(rows.size(), 5)));
    report.sections.push_back(std::move(s));
  }
  return report;
}

AnalysisReport analyze_partitions(const Dataset& ds, const Chain& chain, const RuleBase& rules,
                                  Tolerance tol) {
  if (!rules.validated()) throw UnvalidatedRuleBase();
  return analyze_labels(label_rows(ds, chain, tol), rules);
}

namespace {

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += sep;
    out += s;
  }
  return out;
}

std::string join_rows(const std::vector<std::size_t>& rows) {
  std::string out;
  for (auto r : rows) out += (out.empty() ? "" : ";") + std::to_string(r);
  return out;
}

}  // namespace

std::string render_text(const AnalysisReport& report) {
  std::ostringstream os;
  os << "partition analysis: " << report.rows << " rows, " << report.sections.size()
     << " populated partitions\n";
  for (const auto& s : report.sections) {
    os << "\n[" << to_string(s.key.kinds) << " | " << to_string(s.key.category) << "]\n";
    os << "  count:  " << s.count << "\n";
    os << "  rows:   " << join_rows(s.sample_rows) << (s.count > s.sample_rows.size() ? ";..." : "")
       << "\n";
    if (const auto* rule = std::get_if<ErlaRule>(&s.erla)) {
      os << "  E: " << join(rule->effects, ", ") << "\n";
      os << "  R: " << join(rule->requirements, ", ") << "\n";
      os << "  L: " << join(rule->learning_assurance, ", ") << "\n";
      os << "  A: " << join(rule->architecture, ", ") << "\n";
    } else {
      os << "  not applicable\n";
    }
  }
  return os.str();
}

std::string render_csv(const AnalysisReport& report) {
  std::string out =
      "kinds,category,count,sample_rows,applicable,effects,requirements,learning_assurance,"
      "architecture\n";
  for (const auto& s : report.sections) {
    const auto* rule = std::get_if<ErlaRule>(&s.erla);
    auto field = [&](std::vector<std::string> ErlaRule::*member) {
      return csv_field(rule ? join(rule->*member, ";") : std::string());
    };
    out += std::string(to_string(s.key.kinds)) + ',' + std::string(to_string(s.key.category)) +
           ',' + std::to_string(s.count) + ',' + csv_field(join_rows(s.sample_rows)) + ',' +
           (rule ? "1" : "0") + ',' + field(&ErlaRule::effects) + ',' +
           field(&ErlaRule::requirements) + ',' + field(&ErlaRule::learning_assurance) + ',' +
           field(&ErlaRule::architecture) + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

/// Whether the normalized 2D point lies in the projection of the region
/// onto its first two parameters.
bool projected_contains(const OddNode& node, const Eigen::Vector2d& u, double eps) {
  const auto& uni = std::get<PolytopeUnion>(node.region);
  const Eigen::VectorXd lo = node.box_lo(), span = node.box_span();
  for (const auto& m : uni.members) {
    const Eigen::MatrixXd mu = ((m.vertices.colwise() - lo).array().colwise() / span.array())
                                   .topRows(2);
    // Projection of a convex polytope is the hull of its projected vertices.
    std::vector<Eigen::Vector2d> pts;
    for (Eigen::Index c = 0; c < mu.cols(); ++c) pts.emplace_back(mu.col(c));
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
      return a(0) < b(0) || (a(0) == b(0) && a(1) < b(1));
    });
    if (pts.size() < 3) continue;
    std::vector<Eigen::Vector2d> hull(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      while (k >= 2 && geom::cross2<double>(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
      hull[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
      while (k >= t && geom::cross2<double>(hull[k - 1] - hull[k - 2], pts[i - 1] - hull[k - 2]) <= 0) --k;
      hull[k++] = pts[i - 1];
    }
    hull.resize(k - 1);
    if (hull.size() < 3) continue;
    bool inside = true;
    for (std::size_t i = 0; i < hull.size() && inside; ++i) {
      const Eigen::Vector2d e = hull[(i + 1) % hull.size()] - hull[i];
      inside = geom::cross2<double>(e, u - hull[i]) >= -eps * e.norm();
    }
    if (inside) return true;
  }
  return false;
}

}  // namespace

CoverageReport coverage_report(const Dataset& ds, const OddNode& node,
                               const CoverageOptions& options) {
  CoverageReport rep;
  for (auto c : kAllCategories) rep.counts[c] = 0;
  const Tolerance tol = node.tolerance;
  const auto dim = static_cast<Eigen::Index>(node.dimension());
  const Eigen::VectorXd lo = node.box_lo(), span = node.box_span();

  std::vector<Eigen::VectorXd> inside_u;  // rows not outside the region
  std::vector<Eigen::VectorXd> all_u;
  for (const auto& p : ds.rows) {
    const Eigen::VectorXd x = coordinates(p, node);
    const Eigen::VectorXd u = normalize(node, x);
    ++rep.counts[classify_category(p, node, nullptr, tol).label];
    all_u.push_back(u);
    if (locate(node, x, tol) != Containment::outside) inside_u.push_back(u);
  }

  // Vertices.
  const Eigen::MatrixXd verts = region_vertex_matrix(node);
  rep.vertices = std::size_t(verts.cols());
  bool has_corner = false;
  for (Eigen::Index c = 0; c < verts.cols(); ++c) {
    const Eigen::VectorXd v = normalize(node, verts.col(c));
    has_corner = has_corner || count_at_extreme(node, verts.col(c), tol) >= 2;
    for (const auto& u : all_u) {
      if ((u - v).norm() <= options.vertex_tolerance) {
        ++rep.vertices_hit;
        break;
      }
    }
  }

  // Extreme slices that touch the region.
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (double side : {0.0, 1.0}) {
      bool touches = false;
      for (Eigen::Index c = 0; c < verts.cols() && !touches; ++c)
        touches = std::abs((verts(i, c) - lo(i)) / span(i) - side) <= tol.relative;
      if (!touches) continue;
      ++rep.edge_slices;
      for (const auto& u : inside_u) {
        if (std::abs(u(i) - side) <= tol.relative) {
          ++rep.edge_slices_hit;
          break;
        }
      }
    }
  }

  // Interior grid over the first two parameters.
  const std::size_t gn = std::max<std::size_t>(options.grid_n, 1);
  const std::size_t gm = dim >= 2 ? std::max<std::size_t>(options.grid_m, 1) : 1;
  std::vector<char> eligible(gn * gm, 0), hit(gn * gm, 0);
  for (std::size_t a = 0; a < gn; ++a) {
    for (std::size_t b = 0; b < gm; ++b) {
      Eigen::Vector2d c((double(a) + 0.5) / double(gn), (double(b) + 0.5) / double(gm));
      bool in = false;
      if (dim <= 2) {
        Eigen::VectorXd u(dim);
        u(0) = c(0);
        if (dim == 2) u(1) = c(1);
        in = locate(node, denormalize(node, u), tol) != Containment::outside;
      } else {
        in = projected_contains(node, c, tol.relative);
      }
      eligible[a * gm + b] = in;
    }
  }
  for (const auto& u : inside_u) {
    const auto cell = [](double v, std::size_t n) {
      return std::min<std::size_t>(n - 1, std::size_t(std::clamp(v, 0.0, 1.0) * double(n)));
    };
    const std::size_t a = cell(u(0), gn), b = dim >= 2 ? cell(u(1), gm) : 0;
    hit[a * gm + b] = 1;
  }
  for (std::size_t i = 0; i < eligible.size(); ++i) {
    rep.grid_cells += eligible[i] ? 1 : 0;
    rep.grid_cells_hit += eligible[i] && hit[i] ? 1 : 0;
  }

  auto frac = [](std::size_t a, std::size_t b) { return b ? double(a) / double(b) : 0.0; };
  rep.vertex_coverage = frac(rep.vertices_hit, rep.vertices);
  rep.edge_coverage = frac(rep.edge_slices_hit, rep.edge_slices);
  rep.interior_grid_coverage = frac(rep.grid_cells_hit, rep.grid_cells);

  std::vector<CategoryLabel> required{CategoryLabel::Nominal};
  if (rep.edge_slices > 0) required.push_back(CategoryLabel::EdgeCase);
  if (has_corner) required.push_back(CategoryLabel::FeasibleCornerCase);
  for (auto c : required)
    if (rep.counts[c] == 0) rep.empty_required_partitions.push_back(c);
  return rep;
}

std::string render_text(const CoverageReport& r) {
  std::ostringstream os;
  os << "vertex_coverage=" << r.vertex_coverage << " (" << r.vertices_hit << "/" << r.vertices
     << ")\n";
  os << "edge_coverage=" << r.edge_coverage << " (" << r.edge_slices_hit << "/" << r.edge_slices
     << ")\n";
  os << "interior_grid_coverage=" << r.interior_grid_coverage << " (" << r.grid_cells_hit << "/"
     << r.grid_cells << ")\n";
  for (const auto& [c, n] : r.counts) os << "count." << to_string(c) << "=" << n << "\n";
  os << "empty_required_partitions=";
  for (std::size_t i = 0; i < r.empty_required_partitions.size(); ++i)
    os << (i ? "," : "") << to_string(r.empty_required_partitions[i]);
  os << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------

namespace {

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * double(v.size() - 1);
  const auto i = std::size_t(std::floor(pos));
  const double f = pos - double(i);
  return i + 1 < v.size() ? v[i] * (1 - f) + v[i + 1] * f : v[i];
}

}  // namespace

UpdateProposal propose_odd_update(const Dataset& observed, const OddNode& node) {
  if (observed.empty()) throw EmptyInput();
  UpdateProposal out;
  out.node = node.name;
  for (const auto& param : node.parameters) {
    const double span = param.range.span(), band = node.tolerance.relative * span;
    std::vector<double> above, below;
    for (const auto& p : observed.rows) {
      const auto it = p.values.find(param.name);
      if (it == p.values.end()) continue;
      if (it->second > param.range.hi + band) above.push_back(it->second);
      if (it->second < param.range.lo - band) below.push_back(it->second);
    }
    if (!below.empty()) {
      out.bounds.push_back({param.name, false, param.range.lo,
                            *std::min_element(below.begin(), below.end()), below.size(),
                            quantile(below, 0.5), quantile(below, 0.1)});
    }
    if (!above.empty()) {
      out.bounds.push_back({param.name, true, param.range.hi,
                            *std::max_element(above.begin(), above.end()), above.size(),
                            quantile(above, 0.5), quantile(above, 0.9)});
    }
  }
  std::map<std::string, std::size_t> hidden;
  for (const auto& p : observed.rows)
    for (const auto& [name, v] : p.hidden_values)
      if (!node.index_of(name)) ++hidden[name];
  for (const auto& [name, n] : hidden) out.candidates.push_back({name, n});
  return out;
}

std::string render_text(const UpdateProposal& proposal) {
  std::ostringstream os;
  os << "advisory update proposal for '" << proposal.node << "'\n";
  if (proposal.empty()) os << "  no change proposed\n";
  for (const auto& b : proposal.bounds) {
    os << "  range " << b.parameter << (b.upper ? " hi " : " lo ") << format_shortest(b.current)
       << " -> " << format_shortest(b.proposed) << "  (" << b.count << " points beyond, median "
       << format_shortest(b.median) << ", " << (b.upper ? "p90 " : "p10 ")
       << format_shortest(b.outer_decile) << ")\n";
  }
  for (const auto& c : proposal.candidates)
    os << "  candidate parameter " << c.parameter << "  (" << c.count
       << " rows carry hidden values)\n";
  return os.str();
}

}  // namespace oddkit
