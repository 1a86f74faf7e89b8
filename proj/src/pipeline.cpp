#include "cpd/pipeline.hpp"

#include <chrono>

#include "cpd/io.hpp"

namespace cpd {

RunResult run_algorithm(const Network& network, Algorithm algorithm, const RunOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  const Seconds slice = options.slice > 0 ? options.slice : network.scenario().meta.slice_duration;
  TimeExpandedGraph teg = fractionate(network, slice);
  RunResult out;
  if (options.reduce) {
    teg = reduce_dag(teg, network, &out.reduction);
  } else {
    out.reduction.edges_before = out.reduction.edges_after = teg.edge_count();
  }
  SchedulerConfig config;
  config.algorithm = algorithm;
  config.pat = options.pat;
  if (algorithm == Algorithm::Milp) {
    MilpOptions milp;
    milp.time_limit = options.time_limit;
    milp.work_per_second = options.work_per_second;
    SolveResult solved;
    out.plan = schedule_milp(teg, network, config, options.epsilon, milp, &solved);
    out.solve = std::move(solved);
  } else {
    out.plan = schedule_heuristic(teg, network, config);
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.metrics = compute_metrics(out.plan, network);
  out.metrics.runtime_seconds = out.seconds;
  return out;
}

std::map<std::string, std::string> config_map(Algorithm algorithm, const RunOptions& options, const Network& network) {
  std::map<std::string, std::string> c;
  c["algorithm"] = std::string(to_string(algorithm));
  c["slice"] = std::to_string(options.slice > 0 ? options.slice : network.scenario().meta.slice_duration);
  c["reduce"] = options.reduce ? "true" : "false";
  c["park"] = format_number(options.pat.park.az) + "," + format_number(options.pat.park.el);
  c["pat_combine"] = options.pat.sum_endpoints ? "sum" : "max";
  c["scenario_seed"] = std::to_string(network.scenario().meta.seed);
  if (algorithm == Algorithm::Milp) {
    c["epsilon"] = format_number(options.epsilon);
    c["time_limit"] = format_number(options.time_limit);
    c["work_per_second"] = format_number(options.work_per_second);
  }
  return c;
}

}  // namespace cpd
