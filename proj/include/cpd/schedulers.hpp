#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cpd/model.hpp"
#include "cpd/pat.hpp"
#include "cpd/teg.hpp"

namespace cpd {

enum class Algorithm { Greedy, GreedyZrk, Fcp, Dte, Milp };

std::string_view to_string(Algorithm algorithm);
std::optional<Algorithm> parse_algorithm(std::string_view text);

struct SchedulerConfig {
  Algorithm algorithm = Algorithm::Greedy;
  // Schedule as if retargeting were free; plans are still evaluated truthfully.
  bool zrk = false;
  // Only the deterministic rule exists: weight desc, tx node id asc, rx node id asc.
  std::string tie_break = "weight-tx-rx";
  std::uint64_t seed = 0;
  PatOptions pat;
};

/// Per-slice maximum-weight terminal matching; the weight of an edge is its
/// marginal gain in the relay+sink objective given the links chosen so far.
ContactPlan schedule_greedy(const TimeExpandedGraph& teg, const Network& network, const SchedulerConfig& config);

/// Fairness heuristic: weight grows with how long the endpoints have been
/// left idle while they had opportunities.
ContactPlan schedule_fcp(const TimeExpandedGraph& teg, const Network& network, const SchedulerConfig& config);

/// Direct-to-Earth links only, maximizing per-slice flow.
ContactPlan schedule_dte(const TimeExpandedGraph& teg, const Network& network, const SchedulerConfig& config);

/// Dispatches every heuristic algorithm (Milp is rejected here).
ContactPlan schedule_heuristic(const TimeExpandedGraph& teg, const Network& network,
                               const SchedulerConfig& config);

/// Edge indices of `teg` that a plan selects; throws when an entry has no edge.
std::vector<int> selection_of(const ContactPlan& plan, const TimeExpandedGraph& teg);

/// Matching helper shared by the schedulers: picks a maximum-weight set of
/// terminal-disjoint candidates. `weights[i]` belongs to `candidates[i]`
/// (edge indices of one slice, in canonical order); zero weights are ignored.
std::vector<int> match_slice(const TimeExpandedGraph& teg, const std::vector<int>& candidates,
                             const std::vector<std::int64_t>& weights);

}  // namespace cpd
