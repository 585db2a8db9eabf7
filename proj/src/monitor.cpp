// SPDX-License-Identifier: Apache-2.0
#include "oddkit/monitor.hpp"

#include "oddkit/lexer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace oddkit {

StubModel::StubModel(OddNode node, StubSpec spec) : node_(std::move(node)), spec_(std::move(spec)) {}

StubModel make_stub_model(const OddNode& node, const StubSpec& spec) {
  for (double c : spec.coefficients)
    if (!std::isfinite(c)) throw StubEvaluationError("stub coefficients must be finite");
  if (spec.kind == StubKind::lookup_table) {
    if (spec.axes.size() != node.dimension())
      throw IncompleteTable("table has " + std::to_string(spec.axes.size()) + " axes, node '" +
                            node.name + "' has " + std::to_string(node.dimension()) +
                            " parameters");
    std::size_t cells = 1;
    for (std::size_t i = 0; i < spec.axes.size(); ++i) {
      const auto& [name, ticks] = spec.axes[i];
      const Parameter& param = node.parameters[i];
      if (name != param.name)
        throw IncompleteTable("axis " + std::to_string(i + 1) + " is '" + name + "', expected '" +
                              param.name + "'");
      if (ticks.size() < 2 || !std::is_sorted(ticks.begin(), ticks.end()) ||
          std::adjacent_find(ticks.begin(), ticks.end()) != ticks.end())
        throw IncompleteTable("axis '" + name + "' needs two or more increasing ticks");
      if (ticks.front() > param.range.lo || ticks.back() < param.range.hi)
        throw IncompleteTable("axis '" + name + "' does not cover [" +
                              format_shortest(param.range.lo) + ", " +
                              format_shortest(param.range.hi) + "]");
      cells *= ticks.size();
    }
    if (spec.table.size() != cells)
      throw IncompleteTable("table holds " + std::to_string(spec.table.size()) + " values, grid has " +
                            std::to_string(cells) + " cells");
    for (double v : spec.table)
      if (!std::isfinite(v)) throw IncompleteTable("table values must be finite");
  }
  return StubModel(node, spec);
}

double StubModel::bilinear(const Eigen::VectorXd& u) const {
  const auto& c = spec_.coefficients;
  if (c.empty()) return u.sum();
  auto coef = [&](std::size_t i) { return i < c.size() ? c[i] : 0.0; };
  const auto n = std::size_t(u.size());
  double y = coef(0);
  for (std::size_t i = 0; i < n; ++i) y += coef(1 + i) * u(Eigen::Index(i));
  std::size_t k = 1 + n;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) y += coef(k++) * u(Eigen::Index(i)) * u(Eigen::Index(j));
  return y;
}

double StubModel::table(const Eigen::VectorXd& x) const {
  const std::size_t n = spec_.axes.size();
  std::vector<std::size_t> base(n);
  std::vector<double> frac(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& ticks = spec_.axes[i].second;
    const double v = std::clamp(x(Eigen::Index(i)), ticks.front(), ticks.back());
    const auto it = std::upper_bound(ticks.begin(), ticks.end(), v);
    const std::size_t hi = std::min<std::size_t>(std::size_t(it - ticks.begin()), ticks.size() - 1);
    base[i] = hi - 1;
    frac[i] = (v - ticks[hi - 1]) / (ticks[hi] - ticks[hi - 1]);
  }
  double y = 0.0;
  for (std::size_t corner = 0; corner < (std::size_t(1) << n); ++corner) {
    double w = 1.0;
    std::size_t flat = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool up = (corner >> i) & 1U;
      w *= up ? frac[i] : 1.0 - frac[i];
      flat = flat * spec_.axes[i].second.size() + base[i] + (up ? 1 : 0);
    }
    if (w != 0.0) y += w * spec_.table[flat];
  }
  return y;
}

double StubModel::evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  ++evaluations_;
  const double y = spec_.kind == StubKind::bilinear ? bilinear(normalize(node_, x)) : table(x);
  if (!std::isfinite(y)) throw StubEvaluationError("stub output is not finite");
  return y;
}

double StubModel::operator()(const DataPoint& p) const {
  Eigen::VectorXd x;
  try {
    x = coordinates(p, node_);
  } catch (const MissingParameter& e) {
    throw StubEvaluationError(std::string("stub input: ") + e.what());
  }
  return evaluate(x);
}

// ---------------------------------------------------------------------------

MonitorChainRunner::MonitorChainRunner(const SpecDocument& doc, const Chain& chain,
                                       std::vector<MonitorConfig> monitors, StubModel stub)
    : monitors_(std::move(monitors)), mlm_(chain.mlm), stub_(std::move(stub)),
      evaluations_(monitors_.size(), 0) {
  for (std::size_t i = 0; i < monitors_.size(); ++i) {
    const MonitorConfig& m = monitors_[i];
    const std::string where = "monitor " + std::to_string(i + 1) + " (" +
                              std::string(to_string(m.kind)) + ")";
    if (!(m.tolerance > 0) || !(m.threshold > 0))
      throw MonitorConfigError(where + ": tolerance and threshold must be positive");
    const OddNode* node = &chain.mlm;
    if (!m.node.empty()) {
      node = doc.find(m.node);
      if (!node) throw MonitorConfigError(where + ": unknown node '" + m.node + "'");
    }
    nodes_.push_back(*node);
    switch (m.kind) {
      case MonitorKind::known_input_monitor:
        if (m.known_inputs.empty()) throw MonitorConfigError(where + ": needs known inputs");
        for (const auto& k : m.known_inputs)
          if (k.size() != chain.mlm.dimension())
            throw MonitorConfigError(where + ": known inputs need " +
                                     std::to_string(chain.mlm.dimension()) + " coordinates");
        break;
      case MonitorKind::output_range_monitor:
        if (m.output_lo > m.output_hi) throw MonitorConfigError(where + ": lo exceeds hi");
        break;
      case MonitorKind::cross_check_monitor:
        if (!chain.mlm.index_of(m.parameter))
          throw MonitorConfigError(where + ": parameter '" + m.parameter +
                                   "' is not an input of '" + chain.mlm.name + "'");
        break;
      default:
        break;
    }
  }
}

bool MonitorChainRunner::detects(std::size_t index, const DataPoint& p,
                                 std::optional<double> stub_output) const {
  const MonitorConfig& m = monitors_[index];
  const OddNode& node = nodes_[index];
  switch (m.kind) {
    case MonitorKind::range_monitor:
      return point_in_region(p, node, node.tolerance) == Containment::outside;
    case MonitorKind::extreme_value_monitor:
      return !params_at_extreme(p, node, Tolerance{m.tolerance}).empty();
    case MonitorKind::known_input_monitor: {
      const Eigen::VectorXd u = normalize(mlm_, coordinates(p, mlm_));
      for (const auto& k : m.known_inputs) {
        const Eigen::VectorXd ku =
            normalize(mlm_, Eigen::Map<const Eigen::VectorXd>(k.data(), Eigen::Index(k.size())));
        if ((u - ku).cwiseAbs().maxCoeff() <= m.tolerance) return true;
      }
      return false;
    }
    case MonitorKind::output_range_monitor:
      return stub_output && (*stub_output < m.output_lo || *stub_output > m.output_hi);
    case MonitorKind::cross_check_monitor: {
      const auto& channel = m.channel == ChannelKind::raw ? p.provenance_raw : p.hidden_values;
      const auto second = channel.find(m.parameter);
      const auto primary = p.values.find(m.parameter);
      if (second == channel.end() || primary == p.values.end()) return false;
      const double span = mlm_.parameters[*mlm_.index_of(m.parameter)].range.span();
      const double scale = std::max(std::abs(second->second), mlm_.tolerance.relative * span);
      return std::abs(primary->second - second->second) / scale > m.threshold;
    }
  }
  return false;
}

MonitorVerdict MonitorChainRunner::step(std::size_t row, const DataPoint& p) {
  MonitorVerdict v;
  v.row = row;
  if (latched_) {
    v.processed_by_mlm = false;
    v.latched = true;
    v.mitigation = MonitorAction{ActionKind::failover, 0.0};
    return v;
  }
  for (std::size_t i = 0; i < monitors_.size(); ++i) {
    if (!is_input_side(monitors_[i].kind) && !v.stub_output) v.stub_output = stub_(p);
    ++evaluations_[i];
    const bool hit = detects(i, p, v.stub_output);
    v.decisions.push_back({monitors_[i].kind, hit});
    if (hit) {
      v.processed_by_mlm = false;
      v.mitigation = monitors_[i].action;
      v.detector = i;
      if (monitors_[i].action.kind == ActionKind::failover) latched_ = true;
      return v;
    }
  }
  if (!v.stub_output) v.stub_output = stub_(p);
  return v;
}

// ---------------------------------------------------------------------------

SimulationResult run_monitor_chain(const Dataset& stream, const SpecDocument& doc,
                                   const Chain& chain, const std::vector<MonitorConfig>& monitors,
                                   const StubModel& stub, std::uint64_t seed, Tolerance tol) {
  SimulationResult out;
  out.seed = seed;
  MonitorChainRunner runner(doc, chain, monitors, stub);

  std::vector<CategoryLabel> category(stream.size());
  std::vector<Kind> kind(stream.size());
  const auto labels = label_rows(stream, chain, tol);
  for (std::size_t r = 0; r < stream.size(); ++r) {
    kind[r] = labels[r].kind;
    category[r] = labels[r].category.label;
    if (r < stream.oracle_labels.size() && stream.oracle_labels[r]) {
      if (!parse_enum(*stream.oracle_labels[r], category[r]))
        throw Error("row " + std::to_string(r) + ": unknown oracle label '" +
                    *stream.oracle_labels[r] + "'");
    }
  }

  std::map<CategoryLabel, std::pair<std::size_t, std::size_t>> by_category;  // detected, total
  std::map<Kind, std::pair<std::size_t, std::size_t>> by_kind;
  std::size_t nominal_in_mod = 0, nominal_alarms = 0, latched = 0, detected_all = 0;
  std::size_t input_side = 0;
  std::vector<std::size_t> per_monitor(monitors.size(), 0);
  for (std::size_t r = 0; r < stream.size(); ++r) {
    MonitorVerdict v = runner.step(r, stream.rows[r]);
    if (v.latched) {
      ++latched;
    } else {
      const bool hit = v.detector.has_value();
      auto& c = by_category[category[r]];
      auto& k = by_kind[kind[r]];
      c.first += hit;
      ++c.second;
      k.first += hit;
      ++k.second;
      detected_all += hit;
      if (hit) {
        ++per_monitor[*v.detector];
        input_side += is_input_side(monitors[*v.detector].kind);
      }
      if (category[r] == CategoryLabel::Nominal &&
          (kind[r] == Kind::InS || kind[r] == Kind::OutS)) {
        ++nominal_in_mod;
        nominal_alarms += hit;
      }
    }
    out.verdicts.push_back(std::move(v));
  }

  auto& m = out.metrics;
  m["seed"] = double(seed);
  m["rows"] = double(stream.size());
  m["rows.latched"] = double(latched);
  const std::size_t judged = stream.size() - latched;
  m["detection.all"] = judged ? double(detected_all) / double(judged) : 0.0;
  m["detection.input_side"] = judged ? double(input_side) / double(judged) : 0.0;
  for (const auto& [c, dt] : by_category) {
    m["count.category." + std::string(to_string(c))] = double(dt.second);
    m["detection.category." + std::string(to_string(c))] = double(dt.first) / double(dt.second);
  }
  for (const auto& [k, dt] : by_kind) {
    m["count.kind." + std::string(to_string(k))] = double(dt.second);
    m["detection.kind." + std::string(to_string(k))] = double(dt.first) / double(dt.second);
  }
  m["false_alarm.nominal"] = nominal_in_mod ? double(nominal_alarms) / double(nominal_in_mod) : 0.0;
  for (std::size_t i = 0; i < monitors.size(); ++i)
    m["detections.monitor." + std::to_string(i + 1) + "." + std::string(to_string(monitors[i].kind))] =
        double(per_monitor[i]);
  for (std::size_t i = 0; i < monitors.size(); ++i)
    m["evaluations.monitor." + std::to_string(i + 1) + "." + std::string(to_string(monitors[i].kind))] =
        double(runner.evaluations()[i]);
  m["evaluations.stub"] = double(runner.stub_evaluations());
  return out;
}

std::string write_verdicts(const SimulationResult& result) {
  std::string out = "row,disposition,action,detector,latched,stub_output,decisions\n";
  for (const auto& v : result.verdicts) {
    std::string action, decisions;
    if (v.mitigation) {
      action = std::string(to_string(v.mitigation->kind));
      if (v.mitigation->kind == ActionKind::replace) action += ":" + format_shortest(v.mitigation->value);
    }
    for (const auto& d : v.decisions)
      decisions += (decisions.empty() ? "" : ";") + std::string(to_string(d.kind)) +
                   (d.detected ? ":detect" : ":pass");
    out += std::to_string(v.row) + ',' + (v.processed_by_mlm ? "processed_by_mlm" : "mitigated") +
           ',' + action + ',' + (v.detector ? std::to_string(*v.detector + 1) : std::string()) +
           ',' + (v.latched ? "1" : "0") + ',' +
           (v.stub_output ? format_shortest(*v.stub_output) : std::string()) + ',' + decisions +
           '\n';
  }
  return out;
}

std::string write_metrics(const SimulationResult& result) {
  std::string out;
  for (const auto& [k, v] : result.metrics) {
    if (k == "seed")
      out += k + "=" + std::to_string(result.seed) + "\n";
    else
      out += k + "=" + format_shortest(v) + "\n";
  }
  return out;
}

}  // namespace oddkit
