// cpd: contact plan design pipeline.
//
//   cpd generate --sources 4 --relays 1 -o scenario.json
//   cpd reduce scenario.json
//   cpd schedule scenario.json --algo milp -o plan.json --ion plan.ion
//   cpd metrics plan.json [--scenario scenario.json]
//   cpd compare --sources 2,4 --relays 0,1 --out results/
//
// Exit codes: 0 ok, 1 other error, 2 invalid input or usage,
// 3 infeasible, 4 time limit without incumbent.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "cpd/error.hpp"
#include "cpd/io.hpp"
#include "cpd/pipeline.hpp"
#include "cpd/scenario.hpp"

namespace {

using namespace cpd;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNoIncumbent = 4;

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
  } else {
    write_file_atomic(path, content);
  }
}

void add_run_options(CLI::App* cmd, RunOptions& run) {
  cmd->add_option("--epsilon", run.epsilon, "Fairness factor of the MILP")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--time-limit", run.time_limit, "MILP time limit, seconds")->check(CLI::PositiveNumber);
  cmd->add_option("--work-per-second", run.work_per_second, "Deterministic solver work granted per second")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--slice", run.slice, "Slice duration, seconds (default: scenario's)")->check(CLI::NonNegativeNumber);
  cmd->add_flag("!--no-reduce", run.reduce, "Schedule on the unpruned graph");
  cmd->add_flag("--pat-sum", run.pat.sum_endpoints, "Add the two endpoint pointing times");
}

int solve_exit(const RunResult& r) {
  if (!r.solve) return kExitOk;
  if (r.solve->status == SolveStatus::Infeasible) return kExitInfeasible;
  if (r.solve->status == SolveStatus::NoIncumbent) return kExitNoIncumbent;
  return kExitOk;
}

PlanFile plan_file(const RunResult& r, Algorithm algo, const RunOptions& run, const Network& network) {
  PlanFile file;
  file.plan = r.plan;
  file.header = make_header(r.plan, network, config_map(algo, run, network));
  if (r.solve) {
    file.header.model_objective = r.solve->objective;
    file.header.status = std::string(to_string(r.solve->status));
    file.header.gap = r.solve->gap;
    file.header.work = r.solve->work;
  }
  file.header.solve_seconds = r.seconds;
  return file;
}

std::vector<int> parse_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    const int v = std::stoi(item, &used);
    if (used != item.size() || v < 0) throw CLI::ValidationError("list", "bad count '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw CLI::ValidationError("list", "empty list");
  return out;
}

/// Scenario x algorithm table, one row per scenario, one column per algorithm.
std::string pivot(const std::vector<std::string>& scenarios, const std::vector<Algorithm>& algos,
                  const std::map<std::pair<std::string, Algorithm>, std::string>& cells) {
  std::string out = "scenario";
  for (auto a : algos) out += "," + std::string(to_string(a));
  out += "\n";
  for (const auto& s : scenarios) {
    out += s;
    for (auto a : algos) out += "," + cells.at({s, a});
    out += "\n";
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contact plan design for optical backhaul networks"};
  app.require_subcommand(1);
  bool lax = false;
  app.add_flag("--lax", lax, "Keep unknown scenario fields instead of rejecting them");

  ScenarioSpec spec;
  std::string gen_out = "-";
  auto* gen = app.add_subcommand("generate", "Synthesize a Mars-Earth scenario");
  gen->add_option("--sources", spec.n_sources)->check(CLI::NonNegativeNumber);
  gen->add_option("--relays", spec.n_relays)->check(CLI::NonNegativeNumber);
  gen->add_option("--ground", spec.n_ground)->check(CLI::Range(0, 3));
  gen->add_option("--horizon", spec.horizon)->check(CLI::PositiveNumber);
  gen->add_option("--slice", spec.slice_duration)->check(CLI::PositiveNumber);
  gen->add_option("--seed", spec.seed);
  gen->add_option("--planes", spec.planes)->check(CLI::PositiveNumber);
  gen->add_flag("!--no-crosslinks", spec.crosslinks);
  gen->add_option("-o,--output", gen_out);

  std::string red_in, red_out = "-";
  Seconds red_slice = 0;
  auto* red = app.add_subcommand("reduce", "Report time-expanded graph pruning");
  red->add_option("scenario", red_in)->required();
  red->add_option("--slice", red_slice)->check(CLI::NonNegativeNumber);
  red->add_option("-o,--output", red_out);

  std::string sch_in, sch_out = "-", sch_ion, algo_name = "greedy";
  bool sch_timings = false;
  RunOptions sch_run;
  auto* sch = app.add_subcommand("schedule", "Compute a contact plan");
  sch->add_option("scenario", sch_in)->required();
  sch->add_option("--algo", algo_name)->check(CLI::IsMember({"greedy", "greedy_zrk", "fcp", "dte", "milp"}));
  add_run_options(sch, sch_run);
  sch->add_option("-o,--output", sch_out);
  sch->add_option("--ion", sch_ion, "Also write an ION contact plan");
  std::string sch_lp;
  sch->add_option("--export-lp", sch_lp, "Also write the selection model in LP format");
  sch->add_flag("--timings", sch_timings, "Record wall-clock solve time in the plan");

  std::string met_plan, met_scenario, met_out = "-";
  auto* met = app.add_subcommand("metrics", "Re-evaluate a plan file");
  met->add_option("plan", met_plan)->required();
  met->add_option("--scenario", met_scenario, "Scenario the plan was made for; enables capacity re-evaluation");
  met->add_option("-o,--output", met_out);

  std::string cmp_sources = "2,4,8", cmp_relays = "0,1,2", cmp_out = "results", cmp_algos = "greedy,greedy_zrk,fcp,dte,milp";
  ScenarioSpec cmp_spec;
  RunOptions cmp_run;
  bool cmp_timings = false;
  auto* cmp = app.add_subcommand("compare", "Sweep network sizes and algorithms");
  cmp->add_option("--sources", cmp_sources);
  cmp->add_option("--relays", cmp_relays);
  cmp->add_option("--algos", cmp_algos);
  cmp->add_option("--horizon", cmp_spec.horizon)->check(CLI::PositiveNumber);
  cmp->add_option("--seed", cmp_spec.seed);
  add_run_options(cmp, cmp_run);
  cmp->add_option("--out", cmp_out, "Output directory");
  cmp->add_flag("--timings", cmp_timings, "Fill the runtime columns with wall-clock seconds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitValidation;
  }
  const ParseMode mode = lax ? ParseMode::Lax : ParseMode::Strict;

  try {
    if (*gen) {
      emit(gen_out, scenario_to_json(generate_scenario(spec)));
      return kExitOk;
    }
    if (*red) {
      const Network network(load_scenario(red_in, mode));
      const Seconds slice = red_slice > 0 ? red_slice : network.scenario().meta.slice_duration;
      const auto teg = fractionate(network, slice);
      ReductionStats st;
      const auto reduced = reduce_dag(teg, network, &st);
      std::ostringstream out;
      out << "windows " << network.scenario().windows.size() << "\n"
          << "slices " << teg.slice_count() << "\n"
          << "edges_before " << st.edges_before << "\n"
          << "edges_after " << st.edges_after << "\n"
          << "source_to_source " << st.source_to_source << "\n"
          << "wrong_orientation " << st.wrong_orientation << "\n"
          << "invalid_relay_body " << st.invalid_relay_body << "\n"
          << "no_journey " << st.no_journey << "\n"
          << "pruned_fraction " << format_number(st.pruned_fraction()) << "\n"
          << "active_vertices " << reduced.active_vertex_count() << " of " << reduced.vertex_count() << "\n";
      emit(red_out, out.str());
      return kExitOk;
    }
    if (*sch) {
      const Network network(load_scenario(sch_in, mode));
      const Algorithm algo = *parse_algorithm(algo_name);
      if (!sch_lp.empty()) {
        const Seconds slice = sch_run.slice > 0 ? sch_run.slice : network.scenario().meta.slice_duration;
        auto teg = fractionate(network, slice);
        if (sch_run.reduce) teg = reduce_dag(teg, network);
        write_file_atomic(sch_lp, export_lp(build_model(teg, network, sch_run.epsilon, sch_run.pat)));
      }
      const auto r = run_algorithm(network, algo, sch_run);
      const int code = solve_exit(r);
      if (code != kExitOk) {
        std::cerr << "milp: " << to_string(r.solve->status)
                  << (r.solve->infeasible_family.empty() ? "" : " (" + r.solve->infeasible_family + ")") << "\n";
        return code;
      }
      emit(sch_out, plan_to_json(plan_file(r, algo, sch_run, network), sch_timings));
      if (!sch_ion.empty()) write_file_atomic(sch_ion, export_ion_plan(r.plan, network));
      return kExitOk;
    }
    if (*met && met_scenario.empty()) {
      // Without the scenario only slice-local quantities can be recomputed.
      const PlanFile file = load_plan(met_plan);
      std::ostringstream out;
      out << "algorithm " << file.header.algorithm << "\n"
          << "scenario " << file.header.scenario << "\n"
          << "entries " << file.plan.entries.size() << "\n"
          << "duty_cycle_pct " << format_number(duty_cycle(file.plan)) << "\n"
          << "uptime_s " << format_number(uptime(file.plan)) << "\n"
          << "mean_run_length " << format_number(mean_run_length(file.plan)) << "\n"
          << "recorded_objective_bits " << file.header.objective << "\n"
          << "recorded_sink_capacity_bits " << file.header.sink_capacity << "\n";
      emit(met_out, out.str());
      return kExitOk;
    }
    if (*met) {
      const Network network(load_scenario(met_scenario, mode));
      const PlanFile file = load_plan(met_plan, &network);
      const auto report = compute_metrics(file.plan, network);
      if (report.objective != file.header.objective || report.network_capacity != file.header.sink_capacity) {
        std::cerr << "plan header objective " << file.header.objective << " does not match re-evaluation "
                  << report.objective << "\n";
        return kExitValidation;
      }
      const auto& sc = network.scenario();
      int n_sources = 0, n_relays = 0;
      for (const auto& n : sc.nodes) {
        n_sources += n.role == NodeRole::Source;
        n_relays += n.role == NodeRole::Relay;
      }
      emit(met_out, metrics_csv_header() + metrics_csv_row(sc.meta.name, n_sources, n_relays, report));
      return kExitOk;
    }
    if (*cmp) {
      const auto sources = parse_list(cmp_sources);
      const auto relays = parse_list(cmp_relays);
      std::vector<Algorithm> algos;
      {
        std::stringstream in(cmp_algos);
        std::string item;
        while (std::getline(in, item, ',')) {
          auto a = parse_algorithm(item);
          if (!a) throw CLI::ValidationError("--algos", "unknown algorithm '" + item + "'");
          algos.push_back(*a);
        }
      }
      const std::filesystem::path dir = cmp_out;
      std::string report = metrics_csv_header();
      std::string nodes = node_csv_header();
      std::vector<std::string> names;
      std::map<std::pair<std::string, Algorithm>, std::string> capacity, node_cap, duty, runtime, delay, fairness;
      int worst = kExitOk;
      for (int s : sources) {
        for (int r : relays) {
          ScenarioSpec cell = cmp_spec;
          cell.n_sources = s;
          cell.n_relays = r;
          const Network network(generate_scenario(cell));
          const std::string name = network.scenario().meta.name;
          names.push_back(name);
          for (auto algo : algos) {
            const auto res = run_algorithm(network, algo, cmp_run);
            if (const int code = solve_exit(res); code != kExitOk) worst = std::max(worst, code);
            const auto& m = res.metrics;
            report += metrics_csv_row(name, s, r, m, cmp_timings);
            nodes += node_csv_rows(name, m);
            const std::string cell_stem = name + "-" + std::string(to_string(algo));
            write_file_atomic(dir / "plans" / (cell_stem + ".json"),
                              plan_to_json(plan_file(res, algo, cmp_run, network), cmp_timings));
            capacity[{name, algo}] = std::to_string(m.network_capacity);
            Bits per_node = 0;
            int counted = 0;
            for (const auto& n : m.per_node) {
              if (n.role == NodeRole::Source) continue;
              per_node += n.capacity;
              ++counted;
            }
            node_cap[{name, algo}] = counted ? format_number(static_cast<double>(per_node) / counted) : "n/a";
            duty[{name, algo}] = format_number(m.duty_cycle);
            runtime[{name, algo}] = cmp_timings ? format_number(res.seconds)
                                    : res.solve  ? format_number(res.solve->work)
                                                 : "n/a";
            delay[{name, algo}] = format_number(m.mean_inter_contact);
            fairness[{name, algo}] = format_number(m.jain_index);
          }
        }
      }
      write_file_atomic(dir / "report.csv", report);
      write_file_atomic(dir / "nodes.csv", nodes);
      write_file_atomic(dir / "capacity.csv", pivot(names, algos, capacity));
      write_file_atomic(dir / "node_capacity.csv", pivot(names, algos, node_cap));
      write_file_atomic(dir / "duty_cycle.csv", pivot(names, algos, duty));
      write_file_atomic(dir / (cmp_timings ? "runtime.csv" : "solver_work.csv"), pivot(names, algos, runtime));
      write_file_atomic(dir / "inter_contact.csv", pivot(names, algos, delay));
      write_file_atomic(dir / "fairness.csv", pivot(names, algos, fairness));
      return worst;
    }
  } catch (const ValidationError& e) {
    std::cerr << "validation failed: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ParseError& e) {
    std::cerr << "parse error at " << e.what() << "\n";
    return kExitValidation;
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
