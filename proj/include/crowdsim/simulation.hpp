#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "crowdsim/engine.hpp"
#include "crowdsim/scenario.hpp"
#include "crowdsim/trace.hpp"

namespace crowdsim {

/// Defaults, then the scenario's own overrides.
inline SimParams resolve_params(const Scenario& scenario, const SimParams& base = {}) {
  SimParams p = apply_overrides(base, scenario.params_override);
  validate(p);
  return p;
}

struct ScenarioRun {
  RunResult result;
  std::size_t agent_count = 0;
};

/// Instantiates and runs a scenario, streaming one trace frame per step to
/// `trace_out` when given.
inline ScenarioRun run_scenario(const Scenario& scenario, const SimParams& params,
                                std::ostream* trace_out = nullptr,
                                const StepObserver& observer = {}) {
  std::vector<AgentState> agents = instantiate(scenario);
  ScenarioRun run;
  run.agent_count = agents.size();
  std::optional<TraceWriter> writer;
  if (trace_out != nullptr) {
    writer.emplace(*trace_out, make_trace_header(params.dt, agents));
  }
  run.result = crowdsim::run(std::move(agents), params, scenario.world_bounds,
                             [&](std::span<const AgentState> state, const StepReport& report) {
                               if (writer) {
                                 writer->write(make_trace_frame(report.step_index, state));
                               }
                               if (observer) {
                                 observer(state, report);
                               }
                             });
  return run;
}

/// In-memory variant: the full trace plus the step reports.
inline std::pair<Trace, std::vector<StepReport>> run(const Scenario& scenario,
                                                     const SimParams& params) {
  std::vector<AgentState> agents = instantiate(scenario);
  Trace trace;
  trace.header = make_trace_header(params.dt, agents);
  RunResult r = crowdsim::run(std::move(agents), params, scenario.world_bounds,
                              [&](std::span<const AgentState> state, const StepReport& report) {
                                trace.frames.push_back(make_trace_frame(report.step_index, state));
                              });
  return {std::move(trace), std::move(r.reports)};
}

}  // namespace crowdsim
