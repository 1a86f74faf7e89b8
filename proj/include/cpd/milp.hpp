#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cpd/capacity.hpp"
#include "cpd/model.hpp"
#include "cpd/pat.hpp"
#include "cpd/schedulers.hpp"
#include "cpd/teg.hpp"

namespace cpd {

/// Retargeting-aware link selection program over a time-expanded graph.
///
/// Decision per time-edge e: L_e (selected) and, when the same window was
/// present in the previous slice, Y_e = L_e AND L_pred (continuation). A fresh
/// link is charged a pessimistic retargeting delay, a continuation only the
/// delay overflow it inherits, so every modeled t_eff is achievable.
struct MilpModel {
  const TimeExpandedGraph* teg = nullptr;
  const Network* network = nullptr;
  double epsilon = 0.95;
  PatOptions pat;

  std::vector<EdgeCategory> category;
  std::vector<Millis> start_eff_ms;  // t_eff of a fresh link
  std::vector<Millis> cont_eff_ms;   // t_eff of a continuation (edges with a predecessor)
  std::vector<Bits> start_bits;
  std::vector<Bits> cont_bits;
  std::vector<int> successor;  // edge whose predecessor is this one, or -1

  // Sources that can transmit at all; only these enter the fairness rows.
  std::vector<int> sources;
  std::vector<int> relays;
  // Edges sharing a terminal in a slice.
  std::vector<std::vector<int>> interface_groups;

  std::size_t edge_count() const { return category.size(); }
  std::size_t binary_count() const;
  bool fairness_active() const { return epsilon > 0.0 && sources.size() >= 2; }
};

/// Rejects epsilon outside [0, 1].
MilpModel build_model(const TimeExpandedGraph& teg, const Network& network, double epsilon,
                      const PatOptions& pat = {});
/// The model points into both arguments.
MilpModel build_model(TimeExpandedGraph&&, const Network&, double, const PatOptions& = {}) = delete;
MilpModel build_model(const TimeExpandedGraph&, Network&&, double, const PatOptions& = {}) = delete;

/// Exact integer evaluation of a selection under the model.
struct ModelEvaluation {
  bool interface_ok = true;
  bool fair = true;
  Bits objective = 0;        // relays + sinks
  Bits sink_capacity = 0;
  std::vector<Millis> ect_ms;  // aligned with model.sources
  double deficit_seconds = 0.0;  // total fairness shortfall
};

ModelEvaluation evaluate(const MilpModel& model, const std::vector<char>& selected);

enum class SolveStatus {
  Optimal,          // search tree exhausted
  Feasible,         // no improving neighbourhood left, optimality not proven
  FeasibleTimeout,  // budget spent, best incumbent returned
  Infeasible,
  NoIncumbent,
};

std::string_view to_string(SolveStatus status);

struct MilpOptions {
  double time_limit = 60.0;  // seconds, turned into a deterministic work budget
  // Work units (simplex tableau updates) granted per second of time limit.
  double work_per_second = 4.0e8;
  // Full branch-and-bound is attempted while the dense tableau
  // (rows x columns) stays within this many entries; LNS follows otherwise.
  double full_model_entries = 8.0e6;
  // Safety stop on wall time, as a multiple of time_limit (plus 5 s).
  double wall_factor = 4.0;
  std::vector<std::vector<int>> warm_starts;  // edge selections
};

struct SolveResult {
  SolveStatus status = SolveStatus::NoIncumbent;
  Bits objective = 0;
  std::vector<int> selected;
  double solve_seconds = 0.0;
  std::optional<double> gap;
  double work = 0.0;
  std::int64_t lp_solves = 0;
  std::int64_t nodes = 0;
  std::string infeasible_family;
};

SolveResult solve(const MilpModel& model, const MilpOptions& options = {});

struct OracleResult {
  Bits objective = 0;
  std::vector<int> selected;
  std::uint64_t feasible_selections = 0;
};

/// Enumerates every subset of time-edges (at most 24).
OracleResult oracle_exhaustive(const MilpModel& model);

/// Model in CPLEX LP text form with variables L_w{window}_k{slice}.
std::string export_lp(const MilpModel& model);

/// Builds the model, warm-starts from the greedy and fairness heuristics and
/// returns the truthfully evaluated plan.
ContactPlan schedule_milp(const TimeExpandedGraph& teg, const Network& network, const SchedulerConfig& config,
                          double epsilon, MilpOptions options, SolveResult* result = nullptr);

}  // namespace cpd
