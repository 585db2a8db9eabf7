// SPDX-License-Identifier: Apache-2.0
#include "oddkit/dsl.hpp"

#include "oddkit/lexer.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

namespace oddkit {

// ---------------------------------------------------------------------------
// Scenario enum spellings

std::string_view to_string(MonitorKind kind) {
  switch (kind) {
    case MonitorKind::range_monitor: return "range_monitor";
    case MonitorKind::extreme_value_monitor: return "extreme_value_monitor";
    case MonitorKind::known_input_monitor: return "known_input_monitor";
    case MonitorKind::output_range_monitor: return "output_range_monitor";
    case MonitorKind::cross_check_monitor: return "cross_check_monitor";
  }
  return "?";
}

std::string_view to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::filter: return "filter";
    case ActionKind::replace: return "replace";
    case ActionKind::mask: return "mask";
    case ActionKind::failover: return "failover";
  }
  return "?";
}

std::string_view to_string(ChannelKind kind) {
  return kind == ChannelKind::raw ? "raw" : "hidden";
}

bool parse_enum(std::string_view text, MonitorKind& out) {
  for (auto k : {MonitorKind::range_monitor, MonitorKind::extreme_value_monitor,
                 MonitorKind::known_input_monitor, MonitorKind::output_range_monitor,
                 MonitorKind::cross_check_monitor}) {
    const std::string_view full = to_string(k);
    if (text == full || text == full.substr(0, full.size() - std::string_view("_monitor").size())) {
      out = k;
      return true;
    }
  }
  return false;
}

bool parse_enum(std::string_view text, ActionKind& out) {
  for (auto k : {ActionKind::filter, ActionKind::replace, ActionKind::mask, ActionKind::failover}) {
    if (text == to_string(k)) {
      out = k;
      return true;
    }
  }
  return false;
}

bool parse_enum(std::string_view text, ChannelKind& out) {
  if (text == "raw") out = ChannelKind::raw;
  else if (text == "hidden") out = ChannelKind::hidden;
  else return false;
  return true;
}

// ---------------------------------------------------------------------------
// SpecDocument

const OddNode* SpecDocument::find(std::string_view name) const {
  for (const auto& n : nodes)
    if (n.name == name) return &n;
  return nullptr;
}

const ScenarioSpec* SpecDocument::find_scenario(std::string_view name) const {
  for (const auto& s : scenarios)
    if (s.name == name) return &s;
  return nullptr;
}

const OddNode* SpecDocument::first_with_level(OddLevel level) const {
  for (const auto& n : nodes)
    if (n.level == level) return &n;
  return nullptr;
}

bool structurally_equal(const SpecDocument& a, const SpecDocument& b) {
  return a.nodes == b.nodes && a.scenarios == b.scenarios;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

struct SyntaxFailure {};

class SpecParser {
 public:
  explicit SpecParser(std::string_view text) : cursor_(tokenize(text, result_.diagnostics)) {}

  ParseResult run() {
    while (!cursor_.done()) {
      if (cursor_.at_word("odd")) {
        parse_node();
      } else if (cursor_.at_word("monitorchain")) {
        parse_scenario();
      } else {
        const Token& t = cursor_.peek();
        error(t, "E001", "expected 'odd' or 'monitorchain', found " + show(t));
        resync_top_level();
      }
    }
    validate();
    std::stable_sort(result_.diagnostics.begin(), result_.diagnostics.end(),
                     [](const Diagnostic& x, const Diagnostic& y) {
                       return std::tie(x.location.line, x.location.column) <
                              std::tie(y.location.line, y.location.column);
                     });
    return std::move(result_);
  }

 private:
  struct NodeState {
    bool has_region = false;
    bool polygon = false;
    SourceSpan span;
  };

  // -- diagnostics ----------------------------------------------------------

  static std::string show(const Token& t) {
    if (t.kind == TokenKind::end_of_input) return "end of input";
    if (t.kind == TokenKind::string) return "\"" + t.text + "\"";
    return "'" + t.text + "'";
  }

  void diag(Severity sev, const Token& t, std::string code, std::string message) {
    result_.diagnostics.push_back(
        {sev, std::move(code), std::move(message), {t.line, t.column, t.line, t.column + t.text.size()}});
  }
  void error(const Token& t, std::string code, std::string message) {
    diag(Severity::error, t, std::move(code), std::move(message));
  }
  void error_at(const SourceSpan& span, std::string code, std::string message) {
    result_.diagnostics.push_back({Severity::error, std::move(code), std::move(message), span});
  }

  [[noreturn]] void fail(const Token& t, const std::string& expected) {
    error(t, "E001", "expected " + expected + ", found " + show(t));
    throw SyntaxFailure{};
  }

  const Token& expect(TokenKind kind) {
    if (!cursor_.at(kind)) fail(cursor_.peek(), std::string(describe(kind)));
    return cursor_.next();
  }
  void expect_word(std::string_view word) {
    if (!cursor_.at_word(word)) fail(cursor_.peek(), "'" + std::string(word) + "'");
    cursor_.next();
  }
  std::string identifier() { return expect(TokenKind::identifier).text; }
  std::string string_literal() { return expect(TokenKind::string).text; }
  double number() { return expect(TokenKind::number).number; }

  std::vector<double> number_list() {
    expect(TokenKind::lbracket);
    std::vector<double> out;
    if (cursor_.accept(TokenKind::rbracket)) return out;
    out.push_back(number());
    while (cursor_.accept(TokenKind::comma)) out.push_back(number());
    expect(TokenKind::rbracket);
    return out;
  }

  std::vector<double> point() {
    expect(TokenKind::lparen);
    std::vector<double> out{number()};
    expect(TokenKind::comma);
    out.push_back(number());
    while (cursor_.accept(TokenKind::comma)) out.push_back(number());
    expect(TokenKind::rparen);
    return out;
  }

  template <typename E>
  E enum_value(std::string_view what) {
    const Token& t = cursor_.peek();
    const std::string text = identifier();
    E out{};
    if (!parse_enum(text, out)) {
      error(t, "E011", "invalid " + std::string(what) + " '" + text + "'");
      throw SyntaxFailure{};
    }
    return out;
  }

  void resync_top_level() {
    while (!cursor_.done()) {
      cursor_.next();
      if ((cursor_.at_word("odd") || cursor_.at_word("monitorchain")) && cursor_.peek().column == 1)
        return;
    }
  }

  /// After a header error: continue with the body when its '{' is near.
  bool resync_header() {
    while (!cursor_.done()) {
      if (cursor_.accept(TokenKind::lbrace)) return true;
      if ((cursor_.at_word("odd") || cursor_.at_word("monitorchain")) &&
          cursor_.peek().column == 1)
        return false;
      cursor_.next();
    }
    return false;
  }

  /// Runs `statement` for each line of a block body until '}'.
  template <typename F>
  void block_body(const Token& opener, F&& statement) {
    while (!cursor_.at(TokenKind::rbrace)) {
      if (cursor_.done()) {
        error(opener, "E001", "unterminated block opened here");
        return;
      }
      const std::size_t line = cursor_.peek().line;
      try {
        statement();
      } catch (const SyntaxFailure&) {
        cursor_.skip_line(line);
      }
    }
    cursor_.next();
  }

  // -- nodes ----------------------------------------------------------------

  void parse_node() {
    const Token& keyword = cursor_.next();
    OddNode node;
    NodeState state;
    state.span = {keyword.line, keyword.column, keyword.line, keyword.column};
    const std::size_t errors_before = result_.diagnostics.size();
    bool body = true;
    try {
      node.name = string_literal();
      while (!cursor_.at(TokenKind::lbrace)) parse_attribute(node);
      cursor_.next();
    } catch (const SyntaxFailure&) {
      body = resync_header();
    }
    if (body) {
      const Token& opener = keyword;
      block_body(opener, [&] { parse_statement(node, state); });
    }
    const Token& last = cursor_.peek();
    state.span.end_line = last.line;
    state.span.end_column = last.column;
    if (!state.has_region && !node.parameters.empty())
      error_at(state.span, "E012", "node '" + node.name + "' declares no region");
    if (!node.name.empty() && !result_.document.source_map.count(node.name))
      result_.document.source_map[node.name] = state.span;
    spans_.push_back(state.span);
    // A node that lost statements to syntax errors would only cascade.
    syntax_clean_.push_back(!has_errors({result_.diagnostics.begin() + static_cast<std::ptrdiff_t>(errors_before),
                                         result_.diagnostics.end()}));
    result_.document.nodes.push_back(std::move(node));
  }

  void parse_attribute(OddNode& node) {
    const Token& key = cursor_.peek();
    if (key.kind != TokenKind::identifier) fail(key, "attribute or '{'");
    cursor_.next();
    if (key.text == "level") {
      node.level = enum_value<OddLevel>("level");
    } else if (key.text == "variant") {
      node.variant = enum_value<OddVariant>("variant");
    } else if (key.text == "allocates") {
      node.allocates = string_literal();
    } else if (key.text == "extends") {
      node.extends = string_literal();
    } else {
      diag(Severity::warning, key, "W001", "unknown attribute '" + key.text + "' ignored");
      if (cursor_.at(TokenKind::string) || cursor_.at(TokenKind::number) ||
          (cursor_.at(TokenKind::identifier) && cursor_.peek().line == key.line))
        cursor_.next();
    }
  }

  void parse_statement(OddNode& node, NodeState& state) {
    const Token& head = cursor_.peek();
    if (head.kind != TokenKind::identifier) fail(head, "statement");
    const std::string word = head.text;
    if (word == "param") {
      cursor_.next();
      node.parameters.push_back(parse_param());
    } else if (word == "region") {
      cursor_.next();
      parse_region(node, state, head);
    } else if (word == "preprocess") {
      cursor_.next();
      node.preprocessing.push_back(parse_preprocess());
    } else if (word == "tolerance") {
      cursor_.next();
      const Token& t = cursor_.peek();
      const double v = number();
      if (!(v > 0)) error(t, "E005", "tolerance must be positive");
      node.tolerance.relative = v;
    } else {
      diag(Severity::warning, head, "W002", "unknown statement '" + word + "' ignored");
      cursor_.next();
      cursor_.skip_line(head.line);
    }
  }

  Parameter parse_param() {
    Parameter p;
    p.name = identifier();
    expect(TokenKind::colon);
    p.unit = identifier();
    expect_word("range");
    expect(TokenKind::lbracket);
    p.range.lo = number();
    expect(TokenKind::comma);
    p.range.hi = number();
    expect(TokenKind::rbracket);
    if (cursor_.accept_word("class")) p.dimension_class = enum_value<DimensionClass>("class");
    if (cursor_.accept_word("dist")) {
      Distribution d;
      const Token& t = cursor_.peek();
      const std::string kind = identifier();
      if (kind == "uniform") {
        d.kind = DistributionKind::uniform;
      } else if (kind == "triangular") {
        d.kind = DistributionKind::triangular;
        d.mode = number();
      } else if (kind == "histogram") {
        d.kind = DistributionKind::empirical_histogram;
        d.weights = number_list();
      } else {
        error(t, "E011", "invalid distribution '" + kind + "'");
        throw SyntaxFailure{};
      }
      p.distribution = d;
    }
    return p;
  }

  Transform parse_preprocess() {
    Transform t;
    t.parameter = identifier();
    const Token& k = cursor_.peek();
    const std::string kind = identifier();
    if (kind == "identity") return Transform::identity(t.parameter);
    if (!parse_transform_kind(kind, t.kind)) {
      error(k, "E011", "invalid transform '" + kind + "'");
      throw SyntaxFailure{};
    }
    if (t.kind == TransformKind::offset)
      t.shift = number();
    else
      t.factor = number();
    return t;
  }

  void parse_region(OddNode& node, NodeState& state, const Token& head) {
    const Token& kind_tok = cursor_.peek();
    const std::string kind = identifier();
    if (kind != "polygon" && kind != "polytope") {
      error(kind_tok, "E001", "expected 'polygon' or 'polytope', found " + show(kind_tok));
      throw SyntaxFailure{};
    }
    const Token& opener = expect(TokenKind::lbrace);
    if (kind == "polygon") {
      if (state.has_region)
        error(head, "E001", "node '" + node.name + "' already has a region");
      std::vector<std::vector<double>> pts;
      block_body(opener, [&] {
        const Token& t = cursor_.peek();
        auto pt = point();
        if (pt.size() != 2) {
          error(t, "E010", "polygon vertices take exactly 2 coordinates");
          return;
        }
        pts.push_back(std::move(pt));
      });
      if (state.has_region) return;
      Polygon2D poly;
      poly.vertices.resize(2, Eigen::Index(pts.size()));
      for (std::size_t i = 0; i < pts.size(); ++i)
        poly.vertices.col(Eigen::Index(i)) << pts[i][0], pts[i][1];
      node.region = std::move(poly);
      state.has_region = true;
      state.polygon = true;
      return;
    }

    std::vector<std::vector<double>> normals, vertices;
    std::vector<double> offsets;
    std::size_t arity = 0;
    bool arity_ok = true;
    block_body(opener, [&] {
      const Token& t = cursor_.peek();
      std::vector<double> row;
      if (cursor_.accept_word("halfspace")) {
        while (cursor_.at(TokenKind::number)) row.push_back(cursor_.next().number);
        expect(TokenKind::less_equal);
        const double b = number();
        if (row.empty()) fail(cursor_.peek(), "halfspace coefficients");
        normals.push_back(row);
        offsets.push_back(b);
      } else if (cursor_.accept_word("vertex")) {
        row = point();
        vertices.push_back(row);
      } else {
        fail(t, "'halfspace' or 'vertex'");
      }
      if (arity == 0) arity = row.size();
      if (row.size() != arity) {
        error(t, "E010", "coordinate count differs from earlier entries in this polytope");
        arity_ok = false;
      }
    });
    if (state.has_region && state.polygon) {
      error(head, "E001", "node '" + node.name + "' mixes polygon and polytope regions");
      return;
    }
    if (!arity_ok) return;
    ConvexPolytope poly;
    const auto cols = Eigen::Index(arity);
    poly.normals.resize(Eigen::Index(normals.size()), cols);
    poly.offsets.resize(Eigen::Index(offsets.size()));
    poly.vertices.resize(cols, Eigen::Index(vertices.size()));
    for (std::size_t i = 0; i < normals.size(); ++i) {
      for (std::size_t j = 0; j < arity; ++j) poly.normals(Eigen::Index(i), Eigen::Index(j)) = normals[i][j];
      poly.offsets(Eigen::Index(i)) = offsets[i];
    }
    for (std::size_t i = 0; i < vertices.size(); ++i)
      for (std::size_t j = 0; j < arity; ++j) poly.vertices(Eigen::Index(j), Eigen::Index(i)) = vertices[i][j];
    if (!state.has_region) node.region = PolytopeUnion{};
    std::get<PolytopeUnion>(node.region).members.push_back(std::move(poly));
    state.has_region = true;
  }

  // -- scenarios --------------------------------------------------------------

  void parse_scenario() {
    const Token& keyword = cursor_.next();
    ScenarioSpec s;
    SourceSpan span{keyword.line, keyword.column, keyword.line, keyword.column};
    bool body = true;
    try {
      s.name = string_literal();
      expect(TokenKind::lbrace);
    } catch (const SyntaxFailure&) {
      body = resync_header();
    }
    if (body) block_body(keyword, [&] { parse_scenario_statement(s); });
    span.end_line = cursor_.peek().line;
    result_.document.source_map["monitorchain:" + s.name] = span;
    scenario_spans_.push_back(span);
    result_.document.scenarios.push_back(std::move(s));
  }

  void parse_scenario_statement(ScenarioSpec& s) {
    const Token& head = cursor_.peek();
    if (head.kind != TokenKind::identifier) fail(head, "scenario statement");
    const std::string word = cursor_.next().text;
    if (word == "chain") {
      s.mlm = string_literal();
      s.mlc = string_literal();
      if (cursor_.at(TokenKind::string)) s.mlc_operated = string_literal();
    } else if (word == "extended") {
      s.extended = string_literal();
    } else if (word == "stream") {
      s.stream = string_literal();
    } else if (word == "seed") {
      const Token& t = expect(TokenKind::number);
      std::uint64_t seed = 0;
      const auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), seed);
      if (ec != std::errc() || ptr != t.text.data() + t.text.size()) {
        error(t, "E001", "seed must be a non-negative integer");
        throw SyntaxFailure{};
      }
      s.seed = seed;
    } else if (word == "stub") {
      parse_stub(s.stub);
    } else if (word == "monitor") {
      s.monitors.push_back(parse_monitor(head.line));
    } else {
      diag(Severity::warning, head, "W002", "unknown statement '" + word + "' ignored");
      cursor_.skip_line(head.line);
    }
  }

  void parse_stub(StubSpec& stub) {
    const Token& t = cursor_.peek();
    const std::string kind = identifier();
    if (kind == "bilinear") {
      stub.kind = StubKind::bilinear;
      if (cursor_.at(TokenKind::lbracket)) stub.coefficients = number_list();
      return;
    }
    if (kind != "table") {
      error(t, "E011", "invalid stub kind '" + kind + "'");
      throw SyntaxFailure{};
    }
    stub.kind = StubKind::lookup_table;
    const Token& opener = expect(TokenKind::lbrace);
    block_body(opener, [&] {
      if (cursor_.accept_word("axis")) {
        std::string name = identifier();
        stub.axes.emplace_back(std::move(name), number_list());
      } else if (cursor_.accept_word("values")) {
        stub.table = number_list();
      } else {
        fail(cursor_.peek(), "'axis' or 'values'");
      }
    });
  }

  MonitorConfig parse_monitor(std::size_t line) {
    MonitorConfig m;
    m.kind = enum_value<MonitorKind>("monitor kind");
    bool has_action = false;
    while (!cursor_.done() && cursor_.peek().line == line && !cursor_.at(TokenKind::rbrace)) {
      const Token& key = cursor_.peek();
      const std::string word = identifier();
      if (word == "action") {
        m.action.kind = enum_value<ActionKind>("action");
        if (m.action.kind == ActionKind::replace) m.action.value = number();
        has_action = true;
      } else if (word == "node") {
        m.node = string_literal();
      } else if (word == "tol") {
        m.tolerance = number();
      } else if (word == "lo") {
        m.output_lo = number();
      } else if (word == "hi") {
        m.output_hi = number();
      } else if (word == "param") {
        m.parameter = identifier();
      } else if (word == "threshold") {
        m.threshold = number();
      } else if (word == "channel") {
        m.channel = enum_value<ChannelKind>("channel");
      } else if (word == "inputs") {
        const Token& opener = expect(TokenKind::lbrace);
        block_body(opener, [&] { m.known_inputs.push_back(point()); });
        break;
      } else {
        error(key, "E001", "unknown monitor option '" + word + "'");
        throw SyntaxFailure{};
      }
    }
    if (!has_action) {
      const Token& t = cursor_.peek();
      error(t, "E001", "monitor on line " + std::to_string(line) + " has no action");
    }
    return m;
  }

  // -- semantic checks --------------------------------------------------------

  void node_error(std::size_t idx, std::string code, std::string message) {
    error_at(spans_[idx], std::move(code), std::move(message));
  }

  void validate() {
    auto& doc = result_.document;
    std::set<std::string> names;
    std::size_t system_ods = 0;
    std::vector<bool> clean(doc.nodes.size(), true);
    for (std::size_t i = 0; i < doc.nodes.size(); ++i) {
      const auto& n = doc.nodes[i];
      if (!names.insert(n.name).second) node_error(i, "E002", "duplicate node name '" + n.name + "'");
      if (n.level == OddLevel::system_od && ++system_ods == 2)
        node_error(i, "E007", "a document holds at most one system_od node");
      if (!syntax_clean_[i]) {
        clean[i] = false;
      } else {
        for (auto& issue : validate_node(n)) {
          node_error(i, issue.code, issue.message);
          clean[i] = false;
        }
      }
      if (n.allocates && !doc.find(*n.allocates))
        node_error(i, "E003", "node '" + n.name + "' allocates unknown node '" + *n.allocates + "'");
      if (n.extends && !doc.find(*n.extends))
        node_error(i, "E003", "node '" + n.name + "' extends unknown node '" + *n.extends + "'");
    }
    for (std::size_t i = 0; i < doc.nodes.size(); ++i) {
      std::set<std::string> visited{doc.nodes[i].name};
      const OddNode* cur = &doc.nodes[i];
      while (cur->allocates) {
        const OddNode* parent = doc.find(*cur->allocates);
        if (!parent) break;
        if (!visited.insert(parent->name).second) {
          if (parent->name == doc.nodes[i].name)
            node_error(i, "E008", "allocation chain through '" + doc.nodes[i].name + "' is cyclic");
          break;
        }
        cur = parent;
      }
    }
    for (std::size_t i = 0; i < doc.nodes.size(); ++i) check_extension(i, clean);

    std::set<std::string> scenario_names;
    for (std::size_t i = 0; i < doc.scenarios.size(); ++i) {
      const auto& s = doc.scenarios[i];
      const auto& span = scenario_spans_[i];
      if (!scenario_names.insert(s.name).second)
        error_at(span, "E002", "duplicate monitorchain name '" + s.name + "'");
      auto check = [&](const std::string& ref, const char* role) {
        if (!ref.empty() && !doc.find(ref))
          error_at(span, "E003", std::string(role) + " refers to unknown node '" + ref + "'");
      };
      if (s.mlm.empty() || s.mlc.empty())
        error_at(span, "E012", "monitorchain '" + s.name + "' needs a chain statement");
      check(s.mlm, "chain");
      check(s.mlc, "chain");
      if (s.mlc_operated) check(*s.mlc_operated, "chain");
      if (s.extended) check(*s.extended, "extended");
      for (const auto& m : s.monitors) check(m.node, "monitor");
    }
  }

  void check_extension(std::size_t i, const std::vector<bool>& clean) {
    const auto& doc = result_.document;
    const OddNode& n = doc.nodes[i];
    if (!n.extends) return;
    std::size_t base_idx = doc.nodes.size();
    for (std::size_t k = 0; k < doc.nodes.size(); ++k)
      if (doc.nodes[k].name == *n.extends) base_idx = k;
    if (base_idx == doc.nodes.size()) return;
    const OddNode& base = doc.nodes[base_idx];
    for (const auto& p : base.parameters) {
      if (!n.index_of(p.name)) {
        node_error(i, "E009", "node '" + n.name + "' extends '" + base.name +
                                  "' but lacks its parameter '" + p.name + "'");
        return;
      }
    }
    if (n.parameters.size() <= base.parameters.size()) {
      node_error(i, "E009", "node '" + n.name + "' must add at least one parameter to '" +
                                base.name + "'");
      return;
    }
    if (!clean[i] || !clean[base_idx]) return;
    const auto check = contains_node(n, base, 256, n.tolerance);
    if (!check.contained) {
      std::string where;
      for (const auto& [k, v] : check.witness->values) where += " " + k + "=" + format_shortest(v);
      node_error(i, "E009", "region of '" + n.name + "' projects outside '" + base.name +
                                "' at" + where);
    }
  }

  ParseResult result_;
  TokenCursor cursor_;
  std::vector<SourceSpan> spans_;
  std::vector<bool> syntax_clean_;
  std::vector<SourceSpan> scenario_spans_;
};

}  // namespace

ParseResult parse_spec(std::string_view text) { return SpecParser(text).run(); }

// ---------------------------------------------------------------------------
// Serializer

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string num(double v) { return format_canonical(v); }

std::string list(const std::vector<double>& xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + num(xs[i]);
  return out + "]";
}

template <typename Derived>
std::string tuple(const Eigen::DenseBase<Derived>& col) {
  std::string out = "(";
  for (Eigen::Index i = 0; i < col.size(); ++i) out += (i ? ", " : "") + num(col(i));
  return out + ")";
}

void write_node(std::ostringstream& os, const OddNode& n) {
  os << "odd " << quote(n.name);
  if (n.allocates) os << " allocates " << quote(*n.allocates);
  if (n.extends) os << " extends " << quote(*n.extends);
  os << " level " << to_string(n.level) << " variant " << to_string(n.variant) << " {\n";
  if (n.tolerance != Tolerance{}) os << "  tolerance " << num(n.tolerance.relative) << "\n";
  for (const auto& p : n.parameters) {
    os << "  param " << p.name << " : " << p.unit << " range [" << num(p.range.lo) << ", "
       << num(p.range.hi) << "] class " << to_string(p.dimension_class);
    if (p.distribution) {
      const auto& d = *p.distribution;
      os << " dist ";
      if (d.kind == DistributionKind::uniform) os << "uniform";
      if (d.kind == DistributionKind::triangular) os << "triangular " << num(d.mode);
      if (d.kind == DistributionKind::empirical_histogram) os << "histogram " << list(d.weights);
    }
    os << "\n";
  }
  auto pre = n.preprocessing;
  std::stable_sort(pre.begin(), pre.end(),
                   [](const Transform& a, const Transform& b) { return a.parameter < b.parameter; });
  for (const auto& t : pre) {
    os << "  preprocess " << t.parameter << " ";
    if (t.kind == TransformKind::scale && t.factor == 1.0)
      os << "identity";
    else
      os << to_string(t.kind) << " " << num(t.kind == TransformKind::offset ? t.shift : t.factor);
    os << "\n";
  }
  if (const auto* poly = std::get_if<Polygon2D>(&n.region)) {
    os << "  region polygon {\n";
    for (Eigen::Index c = 0; c < poly->vertices.cols(); ++c)
      os << "    " << tuple(poly->vertices.col(c)) << "\n";
    os << "  }\n";
  } else {
    for (const auto& m : std::get<PolytopeUnion>(n.region).members) {
      os << "  region polytope {\n";
      for (Eigen::Index r = 0; r < m.normals.rows(); ++r) {
        os << "    halfspace";
        for (Eigen::Index c = 0; c < m.normals.cols(); ++c) os << " " << num(m.normals(r, c));
        os << " <= " << num(m.offsets(r)) << "\n";
      }
      for (Eigen::Index c = 0; c < m.vertices.cols(); ++c)
        os << "    vertex " << tuple(m.vertices.col(c)) << "\n";
      os << "  }\n";
    }
  }
  os << "}\n";
}

void write_monitor(std::ostringstream& os, const MonitorConfig& m) {
  os << "  monitor " << to_string(m.kind) << " action " << to_string(m.action.kind);
  if (m.action.kind == ActionKind::replace) os << " " << num(m.action.value);
  switch (m.kind) {
    case MonitorKind::range_monitor:
      os << " node " << quote(m.node);
      break;
    case MonitorKind::extreme_value_monitor:
      os << " node " << quote(m.node) << " tol " << num(m.tolerance);
      break;
    case MonitorKind::known_input_monitor:
      os << " tol " << num(m.tolerance) << " inputs {\n";
      for (const auto& p : m.known_inputs) {
        os << "    (";
        for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << num(p[i]);
        os << ")\n";
      }
      os << "  }";
      break;
    case MonitorKind::output_range_monitor:
      os << " hi " << num(m.output_hi) << " lo " << num(m.output_lo);
      break;
    case MonitorKind::cross_check_monitor:
      os << " channel " << to_string(m.channel) << " param " << m.parameter << " threshold "
         << num(m.threshold);
      break;
  }
  os << "\n";
}

void write_scenario(std::ostringstream& os, const ScenarioSpec& s) {
  os << "monitorchain " << quote(s.name) << " {\n";
  os << "  chain " << quote(s.mlm) << " " << quote(s.mlc);
  if (s.mlc_operated) os << " " << quote(*s.mlc_operated);
  os << "\n";
  if (s.extended) os << "  extended " << quote(*s.extended) << "\n";
  os << "  seed " << s.seed << "\n";
  if (!s.stream.empty()) os << "  stream " << quote(s.stream) << "\n";
  if (s.stub.kind == StubKind::bilinear) {
    os << "  stub bilinear";
    if (!s.stub.coefficients.empty()) os << " " << list(s.stub.coefficients);
    os << "\n";
  } else {
    os << "  stub table {\n";
    for (const auto& [name, ticks] : s.stub.axes) os << "    axis " << name << " " << list(ticks) << "\n";
    os << "    values " << list(s.stub.table) << "\n  }\n";
  }
  for (const auto& m : s.monitors) write_monitor(os, m);
  os << "}\n";
}

}  // namespace

std::string serialize_spec(const SpecDocument& doc) {
  std::ostringstream os;
  bool first = true;
  for (const auto& n : doc.nodes) {
    if (!first) os << "\n";
    first = false;
    write_node(os, n);
  }
  for (const auto& s : doc.scenarios) {
    if (!first) os << "\n";
    first = false;
    write_scenario(os, s);
  }
  return os.str();
}

std::vector<Diagnostic> check_allocations(const SpecDocument& doc, std::size_t samples) {
  std::vector<Diagnostic> out;
  for (const auto& n : doc.nodes) {
    if (!n.allocates) continue;
    const OddNode* parent = doc.find(*n.allocates);
    if (!parent) continue;
    SourceSpan span;
    if (auto it = doc.source_map.find(n.name); it != doc.source_map.end()) span = it->second;
    try {
      const auto check = contains_node(n, *parent, samples, n.tolerance);
      if (!check.contained) {
        std::string where;
        for (const auto& [k, v] : check.witness->values) where += " " + k + "=" + format_shortest(v);
        out.push_back({Severity::warning, "W201",
                       "'" + n.name + "' is not contained in its parent '" + parent->name +
                           "'; witness" + where,
                       span});
      }
    } catch (const IncompatibleParameters& e) {
      out.push_back({Severity::warning, "W201", e.what(), span});
    }
  }
  return out;
}

}  // namespace oddkit
