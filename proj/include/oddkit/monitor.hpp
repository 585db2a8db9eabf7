// SPDX-License-Identifier: Apache-2.0
//
// Runtime monitor chain around a stub model. Monitors are consulted in
// order; the first detection decides the disposition and later monitors
// are skipped. A failover detection latches: every later row is mitigated
// by failover, with no monitor or stub evaluation, until reset().
//
// Cross-check discrepancy is relative: |primary - second| divided by
// max(|second|, tolerance * span), so a scale-by-k corruption scores |k - 1|.
#pragma once

#include "oddkit/classifier.hpp"
#include "oddkit/dsl.hpp"
#include "oddkit/scenario.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace oddkit {

class StubEvaluationError : public Error {
 public:
  using Error::Error;
};

class IncompleteTable : public Error {
 public:
  using Error::Error;
};

class MonitorConfigError : public Error {
 public:
  using Error::Error;
};

/// Pure function of the MLM parameters. Counts its evaluations.
class StubModel {
 public:
  StubModel() = default;
  StubModel(OddNode node, StubSpec spec);

  /// Throws StubEvaluationError on missing inputs or a non-finite result.
  double operator()(const DataPoint& p) const;
  double evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  [[nodiscard]] std::size_t evaluations() const { return evaluations_; }
  [[nodiscard]] const OddNode& node() const { return node_; }

 private:
  double bilinear(const Eigen::VectorXd& u) const;
  double table(const Eigen::VectorXd& x) const;

  OddNode node_;
  StubSpec spec_;
  mutable std::size_t evaluations_ = 0;
};

/// Throws IncompleteTable when a lookup table's axes do not match the node
/// parameters, do not cover the node box, or leave cells without values.
StubModel make_stub_model(const OddNode& node, const StubSpec& spec);

struct MonitorDecision {
  MonitorKind kind = MonitorKind::range_monitor;
  bool detected = false;
};

struct MonitorVerdict {
  std::size_t row = 0;
  std::vector<MonitorDecision> decisions;  // consulted monitors only
  bool processed_by_mlm = true;
  std::optional<MonitorAction> mitigation;
  std::optional<std::size_t> detector;  // index into the chain
  bool latched = false;                 // mitigated by an earlier failover
  std::optional<double> stub_output;
};

class MonitorChainRunner {
 public:
  /// Resolves monitor node references in `doc`; empty references mean the
  /// chain's MLM. Throws MonitorConfigError.
  MonitorChainRunner(const SpecDocument& doc, const Chain& chain,
                     std::vector<MonitorConfig> monitors, StubModel stub);

  MonitorVerdict step(std::size_t row, const DataPoint& p);
  void reset() { latched_ = false; }

  [[nodiscard]] bool latched() const { return latched_; }
  [[nodiscard]] const std::vector<std::size_t>& evaluations() const { return evaluations_; }
  [[nodiscard]] std::size_t stub_evaluations() const { return stub_.evaluations(); }
  [[nodiscard]] const std::vector<MonitorConfig>& monitors() const { return monitors_; }

  /// Detection of one monitor in isolation; does not touch counters.
  bool detects(std::size_t index, const DataPoint& p, std::optional<double> stub_output) const;

 private:
  std::vector<MonitorConfig> monitors_;
  std::vector<OddNode> nodes_;  // resolved per monitor
  OddNode mlm_;
  StubModel stub_;
  std::vector<std::size_t> evaluations_;
  bool latched_ = false;
};

struct SimulationResult {
  std::uint64_t seed = 0;
  std::vector<MonitorVerdict> verdicts;
  /// Flat metrics: detection.all, detection.input_side,
  /// detection.category.<C>, detection.kind.<K>, count.*,
  /// false_alarm.nominal (InMOD Nominal rows), detections.*, evaluations.*.
  /// Latched rows are excluded from detection denominators.
  std::map<std::string, double> metrics;
};

/// Oracle labels come from the stream's `label` column when present,
/// otherwise from label_rows. The seed is recorded; the chain itself has
/// no random element.
SimulationResult run_monitor_chain(const Dataset& stream, const SpecDocument& doc,
                                   const Chain& chain, const std::vector<MonitorConfig>& monitors,
                                   const StubModel& stub, std::uint64_t seed, Tolerance tol = {});

/// row,disposition,action,detector,latched,stub_output,decisions
std::string write_verdicts(const SimulationResult& result);
/// key=value lines in key order.
std::string write_metrics(const SimulationResult& result);

}  // namespace oddkit
