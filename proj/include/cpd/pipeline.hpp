#pragma once

#include <map>
#include <optional>
#include <string>

#include "cpd/metrics.hpp"
#include "cpd/milp.hpp"
#include "cpd/model.hpp"
#include "cpd/schedulers.hpp"
#include "cpd/teg.hpp"

namespace cpd {

/// Everything that shapes a schedule besides the scenario itself.
struct RunOptions {
  Seconds slice = 0;  // 0: the scenario's slice duration
  double epsilon = 0.95;
  double time_limit = 60.0;
  double work_per_second = MilpOptions{}.work_per_second;
  bool reduce = true;
  PatOptions pat;
};

struct RunResult {
  ContactPlan plan;
  MetricsReport metrics;
  std::optional<SolveResult> solve;  // MILP only
  ReductionStats reduction;
  double seconds = 0.0;
};

/// fractionate -> (reduce_dag) -> schedule -> truthful evaluation -> metrics.
RunResult run_algorithm(const Network& network, Algorithm algorithm, const RunOptions& options);

/// The configuration recorded in plan headers.
std::map<std::string, std::string> config_map(Algorithm algorithm, const RunOptions& options, const Network& network);

}  // namespace cpd
