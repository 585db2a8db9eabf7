// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "oddkit/monitor.hpp"
#include "support/oracle.hpp"

#include <stdexcept>
#include <string>

namespace oddkit::test {

inline Chain scenario_chain(const SpecDocument& doc, const ScenarioSpec& s) {
  return make_chain(doc, {s.mlm, s.mlc, s.mlc_operated, s.extended});
}

/// Runs a monitorchain of the extended corpus file on its shipped stream.
inline SimulationResult run_corpus_scenario(const SpecDocument& doc, const std::string& name) {
  const ScenarioSpec* s = doc.find_scenario(name);
  if (!s) throw std::runtime_error("no scenario " + name);
  const Chain chain = scenario_chain(doc, *s);
  const Dataset stream = load_dataset(s->stream, chain.mlm);
  return run_monitor_chain(stream, doc, chain, s->monitors, make_stub_model(chain.mlm, s->stub), s->seed);
}

}  // namespace oddkit::test
