// crowdsim command-line driver: run, bench, validate, metrics, generate.
//
// Diagnostics go to stderr; summaries and CSV go to stdout (or --out).

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "crowdsim/crowdsim.hpp"
#include "crowdsim/validation.hpp"

namespace {

using namespace crowdsim;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitStepCap = 10;
constexpr int kExitSuiteFailed = 11;
constexpr int kExitInternal = 70;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDegenerateVector: return 20;
    case ErrorCode::kDegenerateOverlap: return 21;
    case ErrorCode::kEmptyWorld: return 22;
    case ErrorCode::kRegionTooSmall: return 23;
    case ErrorCode::kParseError: return 24;
    case ErrorCode::kValidationError: return 25;
    case ErrorCode::kBadMagic: return 26;
    case ErrorCode::kVersionUnsupported: return 27;
    case ErrorCode::kTruncatedFrame: return 28;
    case ErrorCode::kIoError: return 29;
    case ErrorCode::kSuiteUnknown: return 30;
  }
  return kExitInternal;
}

std::size_t default_threads() {
  if (const char* env = std::getenv("CROWDSIM_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) {
      return v;
    }
    std::cerr << "warning: ignoring CROWDSIM_THREADS='" << env << "'\n";
  }
  return 1;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot write '" + path + "'");
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out = open_out(path);
  out << text;
  if (!out) {
    throw Error(ErrorCode::kIoError, "failed writing '" + path + "'");
  }
}

// run ------------------------------------------------------------------------

struct RunOptions {
  std::string scenario;
  std::string out;
  std::string metrics;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::optional<std::size_t> steps;
};

int cmd_run(const RunOptions& o) {
  Scenario scenario = load_scenario(read_file(o.scenario));
  SimParams params = resolve_params(scenario);
  if (o.seed) {
    params.rng_seed = *o.seed;
  }
  params.worker_count = o.threads.value_or(default_threads());
  if (o.steps) {
    params.step_cap = *o.steps;
  }
  validate(params);

  std::ofstream trace = open_out(o.out);
  const ScenarioRun run = run_scenario(scenario, params, &trace);
  trace.close();
  if (!trace) {
    throw Error(ErrorCode::kIoError, "failed writing '" + o.out + "'");
  }

  std::size_t collisions = 0;
  std::size_t max_collisions = 0;
  std::size_t infeasible = 0;
  double wall = 0.0;
  for (const StepReport& r : run.result.reports) {
    collisions += r.collision_count;
    max_collisions = std::max(max_collisions, r.collision_count);
    infeasible += r.infeasible_count;
    wall += r.wall_time_ms;
  }
  const std::size_t remaining = static_cast<std::size_t>(
      std::count_if(run.result.final_state.begin(), run.result.final_state.end(),
                    [](const AgentState& a) { return a.active; }));
  std::printf("steps=%zu agents=%zu remaining=%zu wall_time_ms=%.3f collision_count=%zu "
              "max_step_collisions=%zu infeasible_total=%zu step_cap_reached=%d\n",
              run.result.reports.size(), run.agent_count, remaining, wall, collisions,
              max_collisions, infeasible, run.result.step_cap_reached ? 1 : 0);

  if (!o.metrics.empty()) {
    std::ifstream in(o.out, std::ios::binary);
    TraceReader reader(in);
    write_text(o.metrics, export_metrics(reader, run.result.reports));
  }
  if (run.result.step_cap_reached) {
    std::cerr << "STEP_CAP_REACHED: " << remaining << " agents still active after "
              << params.step_cap << " steps\n";
    return kExitStepCap;
  }
  return kExitOk;
}

// bench ----------------------------------------------------------------------

struct BenchOptions {
  std::vector<std::size_t> populations{1000, 10000};
  std::vector<std::size_t> threads{1, 4};
  std::size_t repetitions = 3;
  std::size_t steps = 20;
  std::size_t warmup = 2;
  std::string density = "fixed-density";
  std::uint64_t seed = 1;
  std::string out;
};

/// Mean step time (ms) of one repetition, excluding warm-up steps.
double bench_once(const Scenario& scenario, std::size_t workers, const BenchOptions& o) {
  SimParams params = resolve_params(scenario);
  params.worker_count = workers;
  params.rng_seed = o.seed;
  std::vector<AgentState> state = instantiate(scenario);
  Engine engine(params, scenario.world_bounds);
  double total = 0.0;
  std::size_t measured = 0;
  for (std::size_t s = 0; s < o.warmup + o.steps; ++s) {
    StepReport report;
    state = engine.step(state, report);
    if (s >= o.warmup) {
      total += report.wall_time_ms;
      ++measured;
    }
  }
  return measured == 0 ? 0.0 : total / static_cast<double>(measured);
}

int cmd_bench(const BenchOptions& o) {
  if (o.populations.empty() || o.threads.empty() || o.repetitions < 1 || o.steps < 1) {
    throw Error(ErrorCode::kValidationError,
                "bench needs non-empty ladders, repetitions >= 1 and steps >= 1");
  }
  const bool fixed_world = o.density == "fixed-world";
  if (!fixed_world && o.density != "fixed-density") {
    throw Error(ErrorCode::kValidationError, "density must be fixed-density or fixed-world");
  }
  const std::size_t largest = *std::max_element(o.populations.begin(), o.populations.end());

  std::ostringstream csv;
  csv << "population,threads,repetitions,steps,world_area_m2,mean_frame_ms,min_frame_ms,speedup\n";
  for (std::size_t n : o.populations) {
    // No margin, so the world is exactly the regions plus the gap and its
    // area is proportional to the group size.
    TwoWayLayout layout;
    layout.margin = 0.0;
    if (fixed_world) {
      const double area = region_area_for(std::max<std::size_t>(largest / 2, 1), homogeneous_radius(),
                                          layout.free_space_fraction);
      layout.region_width = std::sqrt(area / layout.aspect);
      layout.region_height = area / *layout.region_width;
    }
    const Scenario scenario = generate_two_way(std::max<std::size_t>(n / 2, 1), false, o.seed, layout);
    std::map<std::size_t, double> mean_by_threads;
    for (std::size_t t : o.threads) {
      double sum = 0.0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < o.repetitions; ++r) {
        const double ms = bench_once(scenario, t, o);
        sum += ms;
        best = std::min(best, ms);
      }
      const double mean = sum / static_cast<double>(o.repetitions);
      mean_by_threads[t] = mean;
      const double base = mean_by_threads.count(1) ? mean_by_threads[1]
                                                   : mean_by_threads[o.threads.front()];
      char row[256];
      std::snprintf(row, sizeof row, "%zu,%zu,%zu,%zu,%.3f,%.6f,%.6f,%.4f\n",
                    scenario.agent_count(), t, o.repetitions, o.steps,
                    scenario.world_bounds.area(), mean, best, mean > 0.0 ? base / mean : 0.0);
      csv << row;
      std::cerr << "bench: population " << scenario.agent_count() << ", " << t
                << " threads: mean " << mean << " ms\n";
    }
  }
  write_text(o.out, csv.str());
  return kExitOk;
}

// validate -------------------------------------------------------------------

struct ValidateOptions {
  std::string suite;
  std::optional<std::size_t> instances;
  std::uint64_t seed = 1;
};

int cmd_validate(const ValidateOptions& o) {
  struct Row {
    std::string name;
    validation::SuiteResult result;
  };
  std::vector<Row> rows;
  if (o.suite == "lp") {
    const std::size_t n = o.instances.value_or(10000);
    rows.push_back({"lp-oracle", validation::lp_oracle_suite(n, o.seed)});
    rows.push_back({"lp-fallback", validation::fallback_suite(std::min<std::size_t>(n, 1000), o.seed)});
  } else if (o.suite == "grid") {
    rows.push_back({"grid", validation::grid_suite(o.instances.value_or(1000), o.seed)});
  } else if (o.suite == "orca") {
    rows.push_back({"orca-pair", validation::orca_pair_suite(o.instances.value_or(10000), o.seed)});
  } else if (o.suite == "determinism") {
    rows.push_back({"determinism",
                    validation::determinism_suite(o.instances.value_or(250), 200, {1, 4, 8}, o.seed)});
  } else {
    throw Error(ErrorCode::kSuiteUnknown, "unknown suite '" + o.suite + "' (lp, grid, orca, determinism)");
  }
  bool ok = true;
  for (const Row& row : rows) {
    std::printf("suite=%s passed=%zu failed=%zu worst=%.3g\n", row.name.c_str(), row.result.passed,
                row.result.failed, row.result.worst);
    if (!row.result.ok()) {
      ok = false;
      std::cerr << row.name << ": first failure: " << row.result.first_failure << "\n";
    }
  }
  return ok ? kExitOk : kExitSuiteFailed;
}

// metrics / generate ---------------------------------------------------------

int cmd_metrics(const std::string& trace_path, double band_height, const std::string& out) {
  std::ifstream in(trace_path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open '" + trace_path + "'");
  }
  TraceReader reader(in);
  write_text(out, export_metrics(reader, {}, band_height));
  return kExitOk;
}

struct GenerateOptions {
  std::string kind;
  std::size_t count = 250;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_generate(const GenerateOptions& o) {
  Scenario s;
  if (o.kind == "two-way") {
    s = generate_two_way(o.count, false, o.seed);
  } else if (o.kind == "two-way-het") {
    s = generate_two_way(o.count, true, o.seed);
  } else if (o.kind == "eight-way") {
    s = generate_eight_way(o.count, o.seed);
  } else {
    throw Error(ErrorCode::kValidationError,
                "unknown generator '" + o.kind + "' (two-way, two-way-het, eight-way)");
  }
  write_text(o.out, save_scenario(s) + "\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"crowdsim: reciprocal collision avoidance crowd simulator"};
  app.require_subcommand(1);

  RunOptions run;
  CLI::App* run_cmd = app.add_subcommand("run", "run a scenario and write its trace");
  run_cmd->add_option("scenario", run.scenario, "scenario JSON file")->required();
  run_cmd->add_option("--out", run.out, "trace output path")->required();
  run_cmd->add_option("--seed", run.seed, "override rng_seed");
  run_cmd->add_option("--threads", run.threads, "worker count (default: CROWDSIM_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--steps", run.steps, "step cap")->check(CLI::PositiveNumber);
  run_cmd->add_option("--metrics", run.metrics, "also write metrics CSV here ('-' for stdout)");

  BenchOptions bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "frame-time benchmark (no trace output)");
  bench_cmd->add_option("--populations", bench.populations, "agent counts")->delimiter(',');
  bench_cmd->add_option("--threads", bench.threads, "worker counts")->delimiter(',');
  bench_cmd->add_option("--repetitions", bench.repetitions, "runs per cell");
  bench_cmd->add_option("--steps", bench.steps, "measured steps per run");
  bench_cmd->add_option("--warmup", bench.warmup, "unmeasured steps per run");
  bench_cmd->add_option("--density", bench.density, "fixed-density or fixed-world");
  bench_cmd->add_option("--seed", bench.seed, "scenario and solver seed");
  bench_cmd->add_option("--out", bench.out, "CSV output path (default stdout)");

  ValidateOptions val;
  CLI::App* val_cmd = app.add_subcommand("validate", "run a randomized oracle suite");
  val_cmd->add_option("--suite", val.suite, "lp, grid, orca or determinism")->required();
  val_cmd->add_option("--instances", val.instances, "instance count override");
  val_cmd->add_option("--seed", val.seed, "suite seed");

  std::string metrics_trace;
  std::string metrics_out;
  double band_height = 7.5;
  CLI::App* metrics_cmd = app.add_subcommand("metrics", "export per-step metrics CSV from a trace");
  metrics_cmd->add_option("trace", metrics_trace, "trace file")->required();
  metrics_cmd->add_option("--band-height", band_height, "lane band height (m)")
      ->check(CLI::PositiveNumber);
  metrics_cmd->add_option("--out", metrics_out, "CSV output path (default stdout)");

  GenerateOptions gen;
  CLI::App* gen_cmd = app.add_subcommand("generate", "write a built-in scenario as JSON");
  gen_cmd->add_option("kind", gen.kind, "two-way, two-way-het or eight-way")->required();
  gen_cmd->add_option("--count", gen.count, "agents per group")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.seed, "scenario seed");
  gen_cmd->add_option("--out", gen.out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*bench_cmd) return cmd_bench(bench);
    if (*val_cmd) return cmd_validate(val);
    if (*metrics_cmd) return cmd_metrics(metrics_trace, band_height, metrics_out);
    if (*gen_cmd) return cmd_generate(gen);
  } catch (const Error& e) {
    std::cerr << to_string(e.code()) << ": " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
