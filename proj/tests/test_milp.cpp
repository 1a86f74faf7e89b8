#include "doctest.h"

#include <random>
#include <stdexcept>

#include "cpd/capacity.hpp"
#include "cpd/milp.hpp"
#include "cpd/scenario.hpp"
#include "cpd/schedulers.hpp"
#include "support.hpp"

using namespace cpd;

namespace {

struct Instance {
  Network net;
  TimeExpandedGraph teg;
};

/// Random reduced instance with at most `max_edges` time-edges.
Instance small_instance(std::mt19937_64& rng, std::size_t max_edges) {
  test::RandomShape shape;
  shape.max_nodes = 5;
  shape.max_slices = 4;
  shape.max_windows = 7;
  while (true) {
    Network net(test::random_scenario(rng, shape));
    auto teg = reduce_dag(fractionate(net, 600), net);
    if (teg.edge_count() <= max_edges) return {std::move(net), std::move(teg)};
  }
}

bool fair(const MilpModel& m, const std::vector<Millis>& ect, double tol) {
  if (!m.fairness_active()) return true;
  double total = 0.0;
  for (auto v : ect) total += static_cast<double>(v);
  const double avg = total / static_cast<double>(ect.size());
  for (auto v : ect) {
    if (static_cast<double>(v) < m.epsilon * avg - tol) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("single edge model") {
  test::Builder b(600, 600);
  b.source("s").sink("g").window("s", "g", 0, 600);
  const Network net = b.network();
  const auto teg = fractionate(net, 600);
  const auto model = build_model(teg, net, 0.95);
  CHECK(model.binary_count() == 1);
  CHECK(model.start_eff_ms[0] == 600000 - 7500);
  const auto r = solve(model);
  CHECK(r.status == SolveStatus::Optimal);
  CHECK(r.selected == std::vector<int>{0});
  CHECK(r.objective == flow_bits(model.start_eff_ms[0], 50'000'000));
  const auto o = oracle_exhaustive(model);
  CHECK(o.objective == r.objective);
  const auto lp = export_lp(model);
  CHECK(lp.find("L_w0_k0") != std::string::npos);
  CHECK(lp.find("Binaries") != std::string::npos);
}

TEST_CASE("empty graph") {
  test::Builder b(600, 600);
  b.source("s").sink("g");
  const Network net = b.network();
  const auto teg = fractionate(net, 600);
  const auto model = build_model(teg, net, 0.95);
  CHECK(oracle_exhaustive(model).objective == 0);
  const auto r = solve(model);
  CHECK(r.status == SolveStatus::Optimal);
  CHECK(r.objective == 0);
}

TEST_CASE("epsilon range") {
  test::Builder b(600, 600);
  b.source("s").sink("g").window("s", "g", 0, 600);
  const Network net = b.network();
  const auto teg = fractionate(net, 600);
  CHECK_THROWS_AS(build_model(teg, net, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(build_model(teg, net, -0.1), std::invalid_argument);
  CHECK_FALSE(build_model(teg, net, 0.0).fairness_active());
}

TEST_CASE("fairness trades capacity for balance") {
  // A fast and a slow source contend for one ground terminal over two slices.
  test::Builder b(1200, 600);
  b.source("fast", 50'000'000).source("slow", 10'000'000).sink("g", 1'200'000'000);
  b.window("fast", "g", 0, 1200).window("slow", "g", 0, 1200);
  const Network net = b.network();
  const auto teg = fractionate(net, 600);
  const auto greedy_like = solve(build_model(teg, net, 0.0));
  const auto fair_model = build_model(teg, net, 0.95);
  const auto fair_run = solve(fair_model);
  CHECK(fair_run.objective == oracle_exhaustive(fair_model).objective);
  CHECK(fair_run.objective < greedy_like.objective);
  CHECK(fair_run.selected.size() == 2);
  CHECK(fair(fair_model, evaluate(fair_model, [&] {
              std::vector<char> s(teg.edge_count(), 0);
              for (int i : fair_run.selected) s[i] = 1;
              return s;
            }()).ect_ms, 1e-6));
}

TEST_CASE("epsilon one with a structurally weaker source falls back to the equal-time optimum") {
  test::Builder b(1800, 600);
  b.source("a").source("b").sink("g").sink("h");
  b.window("a", "g", 0, 1800).window("b", "h", 0, 600).window("b", "h", 1200, 1800);
  const Network net = b.network();
  const auto teg = fractionate(net, 600);
  const auto model = build_model(teg, net, 1.0);
  const auto r = solve(model);
  CHECK(r.status == SolveStatus::Optimal);
  CHECK(r.objective == oracle_exhaustive(model).objective);
}

TEST_CASE("solver matches exhaustive search") {
  std::mt19937_64 rng(29);
  for (int round = 0; round < 40; ++round) {
    const auto inst = small_instance(rng, 14);
    for (double eps : {0.0, 0.95}) {
      const auto model = build_model(inst.teg, inst.net, eps);
      const auto o = oracle_exhaustive(model);
      const auto r = solve(model);
      CHECK(r.status == SolveStatus::Optimal);
      CHECK(r.objective == o.objective);
      std::vector<char> sel(inst.teg.edge_count(), 0);
      for (int i : r.selected) sel[i] = 1;
      const auto ev = evaluate(model, sel);
      CHECK(ev.interface_ok);
      CHECK(fair(model, ev.ect_ms, 1e-6));
      CHECK(static_cast<double>(r.objective) <= 2.0 * max_temporal_flow(inst.teg, inst.net) + 1e-6);
    }
  }
}

TEST_CASE("truthful plan is at least the model objective") {
  std::mt19937_64 rng(31);
  for (int round = 0; round < 30; ++round) {
    const auto inst = small_instance(rng, 16);
    SolveResult r;
    const auto plan = schedule_milp(inst.teg, inst.net, {}, 0.95, {}, &r);
    CHECK(network_capacity(plan, inst.net).relay_sink_objective >= r.objective);
    CHECK(plan.algorithm == "milp");
  }
}

TEST_CASE("tiny time limit keeps the warm start") {
  test::Builder b(3600, 600);
  b.source("a").source("c").sink("g").sink("h");
  b.window("a", "g", 0, 3600).window("c", "h", 0, 3600).window("a", "h", 600, 2400);
  const Network net = b.network();
  const auto teg = reduce_dag(fractionate(net, 600), net);
  SchedulerConfig greedy;
  const auto g = schedule_greedy(teg, net, greedy);
  MilpOptions opt;
  opt.time_limit = 1e-9;
  SolveResult r;
  schedule_milp(teg, net, {}, 0.95, opt, &r);
  // A root relaxation that is already integral still proves optimality.
  CHECK((r.status == SolveStatus::FeasibleTimeout || r.status == SolveStatus::Optimal));
  const auto model = build_model(teg, net, 0.95);
  std::vector<char> sel(teg.edge_count(), 0);
  for (int i : selection_of(g, teg)) sel[i] = 1;
  const auto ev = evaluate(model, sel);
  REQUIRE(ev.fair);
  CHECK(r.objective >= ev.objective);
}

TEST_CASE("tiny time limit on a generated scenario times out") {
  ScenarioSpec spec;
  spec.n_sources = 2;
  spec.n_relays = 1;
  spec.horizon = 6 * 3600;
  const Network net(generate_scenario(spec));
  const auto teg = reduce_dag(fractionate(net, 600), net);
  MilpOptions opt;
  opt.time_limit = 1e-9;
  SolveResult r;
  schedule_milp(teg, net, {}, 0.95, opt, &r);
  CHECK(r.status == SolveStatus::FeasibleTimeout);
  CHECK(r.objective > 0);
}

TEST_CASE("solver is deterministic") {
  std::mt19937_64 rng(37);
  const auto inst = small_instance(rng, 20);
  const auto model = build_model(inst.teg, inst.net, 0.95);
  const auto a = solve(model);
  const auto b = solve(model);
  CHECK(a.selected == b.selected);
  CHECK(a.work == b.work);
}
