#include "doctest.h"

#include <set>
#include <stdexcept>

#include "cpd/capacity.hpp"
#include "cpd/io.hpp"
#include "cpd/scenario.hpp"
#include "cpd/schedulers.hpp"

using namespace cpd;

TEST_CASE("generator is deterministic and valid") {
  ScenarioSpec spec;
  spec.n_sources = 4;
  spec.n_relays = 1;
  const auto a = generate_scenario(spec);
  CHECK(validate_scenario(a).empty());
  CHECK(scenario_to_json(a) == scenario_to_json(generate_scenario(spec)));
  spec.seed = 2;
  CHECK(scenario_to_json(a) != scenario_to_json(generate_scenario(spec)));
}

TEST_CASE("every source gets a window") {
  ScenarioSpec spec;
  spec.n_sources = 4;
  spec.n_relays = 1;
  spec.horizon = 86400;
  const auto s = generate_scenario(spec);
  std::set<std::string> seen;
  for (const auto& w : s.windows) seen.insert(w.tx_node);
  for (const auto& n : s.nodes) {
    if (n.role == NodeRole::Source) CHECK(seen.count(n.id) == 1);
  }
}

TEST_CASE("link rates follow the terminal classes") {
  ScenarioSpec spec;
  spec.n_sources = 4;
  spec.n_relays = 2;
  const Network net(generate_scenario(spec));
  const auto teg = fractionate(net, 600);
  int uplinks = 0;
  int downlinks = 0;
  for (const auto& e : teg.edges()) {
    switch (edge_category(net, e)) {
      case EdgeCategory::SourceToRelay:
        ++uplinks;
        CHECK(e.rate == 50'000'000);
        break;
      case EdgeCategory::RelayToSink:
        ++downlinks;
        CHECK(e.rate == 1'200'000'000);
        break;
      case EdgeCategory::OneHopDTE: CHECK(e.rate == 50'000'000); break;
      case EdgeCategory::Invalid: break;
    }
  }
  CHECK(uplinks > 0);
  CHECK(downlinks > 0);
}

TEST_CASE("one source without relays only sees direct links") {
  ScenarioSpec spec;
  spec.n_sources = 1;
  spec.n_relays = 0;
  const Network net(generate_scenario(spec));
  const auto teg = reduce_dag(fractionate(net, 600), net);
  REQUIRE(teg.edge_count() > 0);
  for (const auto& e : teg.edges()) CHECK(edge_category(net, e) == EdgeCategory::OneHopDTE);
  SchedulerConfig c;
  c.algorithm = Algorithm::Greedy;
  const auto g = schedule_heuristic(teg, net, c);
  c.algorithm = Algorithm::Dte;
  const auto d = schedule_heuristic(teg, net, c);
  CHECK(network_capacity(g, net).sink_capacity == network_capacity(d, net).sink_capacity);
}

TEST_CASE("windows carry consistent annotations") {
  ScenarioSpec spec;
  spec.n_sources = 2;
  spec.n_relays = 1;
  const auto s = generate_scenario(spec);
  REQUIRE_FALSE(s.windows.empty());
  for (const auto& w : s.windows) {
    CHECK(w.duration() >= spec.min_window);
    CHECK(w.end <= spec.horizon);
    CHECK(w.owlt >= 0);
    REQUIRE(w.geometry_end.has_value());
  }
  // Mars to Earth links see light times of several minutes.
  Seconds longest = 0;
  for (const auto& w : s.windows) longest = std::max(longest, w.owlt);
  CHECK(longest > 300);
}

TEST_CASE("invalid specs are rejected") {
  ScenarioSpec spec;
  spec.n_sources = -1;
  CHECK_THROWS_AS(generate_scenario(spec), std::invalid_argument);
  spec = {};
  spec.horizon = 100;
  CHECK_THROWS_AS(generate_scenario(spec), std::invalid_argument);
}
