// SPDX-License-Identifier: Apache-2.0
#include "oddkit/cli.hpp"

#include "oddkit/anomaly.hpp"
#include "oddkit/assurance.hpp"
#include "oddkit/classifier.hpp"
#include "oddkit/dataset.hpp"
#include "oddkit/dsl.hpp"
#include "oddkit/lexer.hpp"
#include "oddkit/monitor.hpp"
#include "oddkit/render.hpp"
#include "oddkit/rng.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

namespace oddkit::cli {

namespace {

namespace fs = std::filesystem;

class UsageError : public Error {
 public:
  using Error::Error;
};

/// Problems already reported as diagnostics.
class DiagnosticFailure : public Error {
 public:
  DiagnosticFailure() : Error("diagnostics reported") {}
};

struct Io {
  std::ostream& out;
  std::ostream& err;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(Io& io, const std::string& path, const std::string& content, bool force) {
  if (path.empty() || path == "-") {
    io.out << content;
    return;
  }
  if (fs::exists(path) && !force)
    throw UsageError("refusing to overwrite '" + path + "' (pass --force)");
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw UsageError("cannot write '" + path + "'");
  f << content;
  if (!f) throw UsageError("cannot write '" + path + "'");
}

void report(Io& io, const std::vector<Diagnostic>& diags, const std::string& origin) {
  for (const auto& d : diags) io.err << format(d, origin) << "\n";
}

SpecDocument load_spec(Io& io, const std::string& path) {
  const ParseResult r = parse_spec(read_file(path));
  report(io, r.diagnostics, path);
  if (!r.ok()) throw DiagnosticFailure();
  return r.document;
}

const OddNode& node_named(const SpecDocument& doc, const std::string& name) {
  const OddNode* n = doc.find(name);
  if (!n) throw UsageError("unknown node '" + name + "'");
  return *n;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

ChainNames chain_names(const std::string& chain, const std::string& extended) {
  const auto parts = split(chain, ',');
  if (parts.size() < 2 || parts.size() > 3 ||
      std::any_of(parts.begin(), parts.end(), [](const auto& p) { return p.empty(); }))
    throw UsageError("--chain expects MLM,MLC[,OPERATED]");
  ChainNames names{parts[0], parts[1], std::nullopt, std::nullopt};
  if (parts.size() == 3) names.mlc_operated = parts[2];
  if (!extended.empty()) names.extended = extended;
  return names;
}

void check_names(const SpecDocument& doc, const ChainNames& names) {
  node_named(doc, names.mlm);
  node_named(doc, names.mlc);
  if (names.mlc_operated) node_named(doc, *names.mlc_operated);
  if (names.extended) node_named(doc, *names.extended);
}

/// Node whose parameters are every column the chain reads.
OddNode column_node(const std::vector<const OddNode*>& nodes) {
  OddNode u;
  u.name = "columns";
  for (const OddNode* n : nodes) {
    if (!n) continue;
    for (const auto& p : n->parameters)
      if (!u.index_of(p.name)) u.parameters.push_back(p);
  }
  return u;
}

Dataset load_dataset(Io& io, const std::string& path, const OddNode& columns) {
  const DatasetParse r = parse_dataset(read_file(path), columns);
  report(io, r.diagnostics, path);
  if (!r.ok()) throw DiagnosticFailure();
  return r.dataset;
}

struct LoadedChain {
  Chain chain;
  Dataset data;
};

LoadedChain load_chain(Io& io, const SpecDocument& doc, const std::string& data_path,
                       const ChainNames& names, const std::string& registry_path) {
  check_names(doc, names);
  std::vector<const OddNode*> nodes{doc.find(names.mlm), doc.find(names.mlc)};
  if (names.mlc_operated) nodes.push_back(doc.find(*names.mlc_operated));
  LoadedChain out{{}, load_dataset(io, data_path, column_node(nodes))};
  std::vector<DataPoint> samples = out.data.rows;
  if (!registry_path.empty()) {
    Dataset reg = load_dataset(io, registry_path, *doc.find(names.mlm));
    for (auto& p : reg.rows) {
      p.in_sample = true;
      samples.push_back(std::move(p));
    }
  }
  out.chain = make_chain(doc, names, samples);
  return out;
}

RuleBase load_rules(Io& io, const std::string& flag) {
  std::string path = flag, text;
  if (path.empty()) {
    if (const char* env = std::getenv("ODDKIT_RULES"); env && *env) path = env;
  }
  text = path.empty() ? std::string(default_rules_text()) : read_file(path);
  RuleParse r = parse_rules(text);
  report(io, r.diagnostics, path.empty() ? "<default rules>" : path);
  if (!r.ok()) throw DiagnosticFailure();
  return r.rules;
}

Transform parse_transform_flag(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw UsageError("--transform expects KIND:PARAM:VALUE");
  Transform t;
  if (!parse_transform_kind(parts[0], t.kind))
    throw UsageError("unknown transform kind '" + parts[0] + "'");
  t.parameter = parts[1];
  const auto v = parse_number(parts[2]);
  if (!v) throw UsageError("transform value '" + parts[2] + "' is not a number");
  if (t.kind == TransformKind::offset)
    t.shift = *v;
  else
    t.factor = *v;
  try {
    t.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return t;
}

// ---------------------------------------------------------------------------

struct Options {
  std::string spec, data, out, node, chain, extended, registry, rules, format = "text",
      mode, transform, scenario, metrics, grid = "20x20", nodes;
  std::size_t n = 100;
  std::uint64_t seed = 1;
  double vertex_tol = 1e-3;
  bool force = false;
};

int cmd_validate(Io& io, const Options& o) {
  const ParseResult r = parse_spec(read_file(o.spec));
  std::vector<Diagnostic> diags = r.diagnostics;
  if (r.ok())
    for (auto& d : check_allocations(r.document)) diags.push_back(std::move(d));
  report(io, diags, o.spec);
  if (!r.ok()) return kDiagnostics;
  io.out << o.spec << ": " << r.document.nodes.size() << " nodes, " << r.document.scenarios.size()
         << " monitor chains, ok\n";
  return kOk;
}

int cmd_classify(Io& io, const Options& o) {
  const SpecDocument doc = load_spec(io, o.spec);
  if (!o.node.empty() == !o.chain.empty()) throw UsageError("pass exactly one of --node or --chain");
  std::string csv;
  if (!o.node.empty()) {
    const OddNode& node = node_named(doc, o.node);
    const Dataset ds = load_dataset(io, o.data, node);
    csv = "row,kind,category,node,on_boundary,annotations\n";
    for (std::size_t r = 0; r < ds.size(); ++r) {
      const CategoryDetail d = classify_detail(ds.rows[r], node, nullptr, node.tolerance);
      std::string extremes;
      for (const auto& e : d.extremes) extremes += (extremes.empty() ? "extremes=" : "|") + e;
      csv += std::to_string(r) + ",," + std::string(to_string(d.category.label)) + ',' +
             csv_field(node.name) + ',' + (d.containment == Containment::on_boundary ? "1" : "0") +
             ',' + csv_field(extremes) + '\n';
    }
  } else {
    const ChainNames names = chain_names(o.chain, o.extended);
    const LoadedChain lc = load_chain(io, doc, o.data, names, o.registry);
    csv = write_labels(label_rows(lc.data, lc.chain, lc.chain.mlm.tolerance));
  }
  emit(io, o.out, csv, o.force);
  return kOk;
}

int cmd_partition(Io& io, const Options& o) {
  const SpecDocument doc = load_spec(io, o.spec);
  const LoadedChain lc = load_chain(io, doc, o.data, chain_names(o.chain, o.extended), o.registry);
  const PartitionMap parts = partition_dataset(lc.data, lc.chain, lc.chain.mlm.tolerance);
  std::string csv = "kinds,category,count,rows\n";
  for (const auto& [key, rows] : parts) {
    std::string list;
    for (auto r : rows) list += (list.empty() ? "" : ";") + std::to_string(r);
    csv += std::string(to_string(key.kinds)) + ',' + std::string(to_string(key.category)) + ',' +
           std::to_string(rows.size()) + ',' + csv_field(list) + '\n';
  }
  emit(io, o.out, csv, o.force);
  return kOk;
}

int cmd_analyze(Io& io, const Options& o) {
  const RuleBase rules = load_rules(io, o.rules);
  const SpecDocument doc = load_spec(io, o.spec);
  const LoadedChain lc = load_chain(io, doc, o.data, chain_names(o.chain, o.extended), o.registry);
  const AnalysisReport rep = analyze_partitions(lc.data, lc.chain, rules, lc.chain.mlm.tolerance);
  if (o.format != "text" && o.format != "csv") throw UsageError("--format is text or csv");
  emit(io, o.out, o.format == "csv" ? render_csv(rep) : render_text(rep), o.force);
  return kOk;
}

int cmd_coverage(Io& io, const Options& o) {
  const SpecDocument doc = load_spec(io, o.spec);
  const OddNode& node = node_named(doc, o.node);
  const auto dims = split(o.grid, 'x');
  CoverageOptions opts;
  opts.vertex_tolerance = o.vertex_tol;
  const auto gn = dims.size() == 2 ? parse_number(dims[0]) : std::nullopt;
  const auto gm = dims.size() == 2 ? parse_number(dims[1]) : std::nullopt;
  if (!gn || !gm || *gn < 1 || *gm < 1 || *gn != std::floor(*gn) || *gm != std::floor(*gm))
    throw UsageError("--grid expects NxM with positive integers");
  opts.grid_n = std::size_t(*gn);
  opts.grid_m = std::size_t(*gm);
  const Dataset ds = load_dataset(io, o.data, node);
  emit(io, o.out, render_text(coverage_report(ds, node, opts)), o.force);
  return kOk;
}

int cmd_generate(Io& io, const Options& o) {
  const SpecDocument doc = load_spec(io, o.spec);
  Dataset ds;
  std::vector<std::string> columns;
  if (o.mode == "novelty") {
    if (o.extended.empty()) throw UsageError("--mode novelty needs --extended");
    const OddNode& ext = node_named(doc, o.extended);
    if (!ext.extends) throw UsageError("node '" + ext.name + "' extends nothing");
    Chain chain;
    chain.mlm = node_named(doc, *ext.extends);
    chain.mlc = chain.mlm;
    chain.extended = ext;
    Rng rng(o.seed);
    const Eigen::VectorXd lo = ext.box_lo(), span = ext.box_span();
    const std::size_t budget = std::max<std::size_t>(o.n * 10000, 100000);
    for (std::size_t tries = 0; ds.size() < o.n; ++tries) {
      if (tries == budget) throw EmptyStratum("no novelty point found within the draw budget");
      Eigen::VectorXd x(lo.size());
      for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = lo(i) + span(i) * rng.uniform();
      try {
        ds.rows.push_back(make_novelty(make_point(ext, x), chain, ext.tolerance));
      } catch (const Rejected&) {
      }
    }
    columns = parameter_names(chain.mlm);
  } else if (o.mode == "inlier") {
    if (o.transform.empty()) throw UsageError("--mode inlier needs --transform KIND:PARAM:VALUE");
    const OddNode& node = node_named(doc, o.node);
    const Transform t = parse_transform_flag(o.transform);
    if (!node.index_of(t.parameter)) throw UsageError("node has no parameter '" + t.parameter + "'");
    // Targets inside the node; their pre-corruption sources may lie anywhere.
    const auto targets = sample_region(node, std::max<std::size_t>(o.n * 4, 64),
                                       SampleMode::nominal_interior, o.seed);
    const Transform inverse = t.inverse();
    for (const auto& y : targets) {
      if (ds.size() == o.n) break;
      DataPoint source = y;
      source.values[t.parameter] = inverse.apply(y.values.at(t.parameter));
      try {
        ds.rows.push_back(inject_inlier(source, t, node, node.tolerance));
      } catch (const Rejected&) {
      }
    }
    if (ds.size() < o.n) throw EmptyStratum("too few inlier sources accepted");
    columns = parameter_names(node);
  } else {
    SampleMode mode;
    if (!parse_enum(o.mode, mode)) throw UsageError("unknown mode '" + o.mode + "'");
    const OddNode& node = node_named(doc, o.node);
    ds.rows = sample_region(node, o.n, mode, o.seed);
    columns = parameter_names(node);
  }
  emit(io, o.out, "# seed=" + std::to_string(o.seed) + "\n" + write_dataset(ds, columns), o.force);
  return kOk;
}

int cmd_simulate(Io& io, const Options& o) {
  const SpecDocument doc = load_spec(io, o.spec);
  const ScenarioSpec* s = doc.find_scenario(o.scenario);
  if (!s) {
    io.err << o.spec << ": error: no monitorchain named '" << o.scenario << "'\n";
    return kDiagnostics;
  }
  ChainNames names{s->mlm, s->mlc, s->mlc_operated, s->extended};
  const fs::path stream = fs::path(o.spec).parent_path() / s->stream;
  const LoadedChain lc = load_chain(io, doc, stream.string(), names, o.registry);
  const StubModel stub = make_stub_model(lc.chain.mlm, s->stub);
  const SimulationResult result =
      run_monitor_chain(lc.data, doc, lc.chain, s->monitors, stub, s->seed, lc.chain.mlm.tolerance);
  emit(io, o.out, write_verdicts(result), o.force);
  if (!o.metrics.empty())
    emit(io, o.metrics, write_metrics(result), o.force);
  else
    io.err << write_metrics(result);
  return kOk;
}

int cmd_render(Io& io, const Options& o) {
  const SpecDocument doc = load_spec(io, o.spec);
  std::vector<std::string> nodes;
  if (!o.nodes.empty()) nodes = split(o.nodes, ',');
  for (const auto& n : nodes) node_named(doc, n);
  std::optional<LoadedChain> lc;
  std::optional<Dataset> plain;
  std::vector<RowLabel> labels;
  if (!o.data.empty()) {
    if (!o.chain.empty()) {
      lc = load_chain(io, doc, o.data, chain_names(o.chain, o.extended), o.registry);
      labels = label_rows(lc->data, lc->chain, lc->chain.mlm.tolerance);
    } else {
      const OddNode& first = nodes.empty() ? doc.nodes.front() : node_named(doc, nodes.front());
      plain = load_dataset(io, o.data, first);
    }
  }
  const Dataset* data = lc ? &lc->data : plain ? &*plain : nullptr;
  RenderOptions opts;
  opts.title = fs::path(o.spec).filename().string();
  std::string svg;
  try {
    svg = render_svg(doc, nodes, data, lc ? &labels : nullptr, opts);
  } catch (const RenderError& e) {
    throw UsageError(e.what());
  }
  emit(io, o.out, svg, o.force);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Io io{out, err};
  Options o;
  CLI::App app{"Operational design domain toolkit", "oddkit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every command");

  auto spec_arg = [&](CLI::App* c) {
    c->add_option("spec", o.spec, "Specification (.odd)")->required();
  };
  auto out_opt = [&](CLI::App* c) {
    c->add_option("-o,--out", o.out, "Output file (stdout when omitted)");
    c->add_flag("--force", o.force, "Overwrite existing output files");
  };
  auto chain_opts = [&](CLI::App* c) {
    c->add_option("--chain", o.chain, "MLM,MLC[,OPERATED] node names");
    c->add_option("--extended", o.extended, "Node extending the MLM with further parameters");
    c->add_option("--registry", o.registry, "CSV of in-sample training points");
  };

  std::function<int()> action;
  auto* validate = app.add_subcommand("validate", "Parse and validate a specification");
  spec_arg(validate);
  validate->callback([&] { action = [&] { return cmd_validate(io, o); }; });

  auto* classify = app.add_subcommand("classify", "Label each row with kind and category");
  spec_arg(classify);
  classify->add_option("data", o.data, "Dataset (.csv)")->required();
  classify->add_option("--node", o.node, "Classify against one node");
  chain_opts(classify);
  out_opt(classify);
  classify->callback([&] { action = [&] { return cmd_classify(io, o); }; });

  auto* partition = app.add_subcommand("partition", "Group rows by (kind set, category)");
  spec_arg(partition);
  partition->add_option("data", o.data, "Dataset (.csv)")->required();
  chain_opts(partition);
  partition->get_option("--chain")->required();
  out_opt(partition);
  partition->callback([&] { action = [&] { return cmd_partition(io, o); }; });

  auto* analyze = app.add_subcommand("analyze", "Partition analysis with ERLA records");
  spec_arg(analyze);
  analyze->add_option("data", o.data, "Dataset (.csv)")->required();
  chain_opts(analyze);
  analyze->get_option("--chain")->required();
  analyze->add_option("--rules", o.rules, "Rule base (default: $ODDKIT_RULES, else built in)");
  analyze->add_option("--format", o.format, "text or csv")->check(CLI::IsMember({"text", "csv"}));
  out_opt(analyze);
  analyze->callback([&] { action = [&] { return cmd_analyze(io, o); }; });

  auto* coverage = app.add_subcommand("coverage", "Coverage metrics of a dataset over a node");
  spec_arg(coverage);
  coverage->add_option("data", o.data, "Dataset (.csv)")->required();
  coverage->add_option("--node", o.node, "Node name")->required();
  coverage->add_option("--grid", o.grid, "Interior grid NxM")->capture_default_str();
  coverage->add_option("--vertex-tol", o.vertex_tol, "Normalized vertex match tolerance")
      ->capture_default_str();
  out_opt(coverage);
  coverage->callback([&] { action = [&] { return cmd_coverage(io, o); }; });

  auto* generate = app.add_subcommand("generate", "Sample a stratum or synthesize anomalies");
  spec_arg(generate);
  generate->add_option("--node", o.node, "Node name");
  generate
      ->add_option("--mode", o.mode,
                   "nominal_interior, edge, feasible_corner, outlier_ring, inlier or novelty")
      ->required();
  generate->add_option("-n", o.n, "Number of points")->capture_default_str();
  generate->add_option("--seed", o.seed, "64-bit seed")->capture_default_str();
  generate->add_option("--transform", o.transform, "Inlier corruption KIND:PARAM:VALUE");
  generate->add_option("--extended", o.extended, "Extended node for novelty mode");
  out_opt(generate);
  generate->callback([&] {
    action = [&] {
      if (o.mode != "novelty" && o.node.empty()) throw UsageError("--node is required");
      return cmd_generate(io, o);
    };
  });

  auto* simulate = app.add_subcommand("simulate", "Run a monitor chain scenario");
  spec_arg(simulate);
  simulate->add_option("--scenario", o.scenario, "monitorchain name")->required();
  simulate->add_option("--metrics", o.metrics, "Metrics output (stderr when omitted)");
  simulate->add_option("--registry", o.registry, "CSV of in-sample training points");
  out_opt(simulate);
  simulate->callback([&] { action = [&] { return cmd_simulate(io, o); }; });

  auto* render = app.add_subcommand("render", "Draw 2D regions and classified points as SVG");
  spec_arg(render);
  render->add_option("data", o.data, "Dataset (.csv)");
  render->add_option("--nodes", o.nodes, "Comma separated node names (default: all)");
  chain_opts(render);
  out_opt(render);
  render->callback([&] { action = [&] { return cmd_render(io, o); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    return action ? action() : kUsage;
  } catch (const UsageError& e) {
    err << "oddkit: " << e.what() << "\n";
    return kUsage;
  } catch (const DiagnosticFailure&) {
    return kDiagnostics;
  } catch (const Error& e) {
    err << "oddkit: error: " << e.what() << "\n";
    return kDiagnostics;
  } catch (const std::exception& e) {
    err << "oddkit: internal error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace oddkit::cli
