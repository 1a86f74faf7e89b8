#include "doctest.h"

#include <random>

#include "cpd/capacity.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace cpd;

namespace {

PlanEntry entry(const std::string& tx, const std::string& rx, int k, Millis t_eff, BitRate rate) {
  PlanEntry e;
  e.window = tx + "-" + rx + "-" + std::to_string(k);
  e.k = k;
  e.tx_node = tx;
  e.tx_terminal = "t0";
  e.rx_node = rx;
  e.rx_terminal = "t0";
  e.slice_start = k * 600;
  e.slice_end = e.slice_start + 600;
  e.t_eff_ms = t_eff;
  e.t_retarget_ms = 600000 - t_eff;
  e.bit_rate_used = rate;
  e.flow = flow_bits(t_eff, rate);
  return e;
}

Network three_node() {
  test::Builder b(3600, 600);
  b.source("s").relay("r").sink("g");
  return b.network();
}

}  // namespace

TEST_CASE("edge categories") {
  test::Builder b;
  b.source("s").source("s2").relay("r").relay("mr", "mars-orbit").relay("vr", "venus-orbit").sink("g");
  const Network net = b.network();
  auto cat = [&](const char* a, const char* z) { return edge_category(net, net.node_index(a), net.node_index(z)); };
  CHECK(cat("s", "g") == EdgeCategory::OneHopDTE);
  CHECK(cat("r", "g") == EdgeCategory::RelayToSink);
  CHECK(cat("s", "r") == EdgeCategory::SourceToRelay);
  CHECK(cat("s", "mr") == EdgeCategory::SourceToRelay);
  CHECK(cat("s", "vr") == EdgeCategory::Invalid);
  CHECK(cat("s", "s2") == EdgeCategory::Invalid);
  CHECK(cat("g", "r") == EdgeCategory::Invalid);
  CHECK(cat("r", "mr") == EdgeCategory::Invalid);
  CHECK(cat("r", "s") == EdgeCategory::Invalid);
}

TEST_CASE("edge flow") {
  const auto e = entry("s", "g", 0, 500000, 50'000'000);
  CHECK(edge_flow(e) == 25'000'000'000);
  CHECK(edge_flow(e, false) == 0);
  CHECK(edge_flow(entry("s", "g", 0, 0, 50'000'000)) == 0);
  CHECK(flow_bits(1, 999) == 0);
  CHECK(flow_bits(2, 1500) == 3);
}

TEST_CASE("node capacity") {
  const Network net = three_node();
  ContactPlan plan;
  // 10 Gbit in, 8 Gbit out.
  plan.entries.push_back(entry("s", "r", 0, 200000, 50'000'000));
  plan.entries.push_back(entry("r", "g", 1, 160000, 50'000'000));
  const auto relay = node_capacity(plan, net, "r");
  CHECK(relay.inflow == 10'000'000'000);
  CHECK(relay.outflow == 8'000'000'000);
  CHECK(relay.capacity == 8'000'000'000);
  const auto sink = node_capacity(plan, net, "g");
  CHECK(sink.capacity == 8'000'000'000);
  CHECK(sink.outflow_unbounded);
  CHECK(network_capacity(plan, net).sink_capacity == 8'000'000'000);
  CHECK(network_capacity(plan, net).relay_sink_objective == 16'000'000'000);

  ContactPlan only_in;
  only_in.entries.push_back(entry("s", "r", 0, 200000, 50'000'000));
  CHECK(node_capacity(only_in, net, "r").capacity == 0);

  ContactPlan direct;
  direct.entries.push_back(entry("s", "g", 0, 100000, 50'000'000));
  CHECK(node_capacity(direct, net, "g").capacity == 5'000'000'000);
  CHECK(node_capacity(direct, net, "s").capacity == 5'000'000'000);
}

TEST_CASE("network capacity") {
  const Network net = three_node();
  ContactPlan one;
  one.entries.push_back(entry("s", "g", 0, 500000, 50'000'000));
  CHECK(network_capacity(one, net).sink_capacity == 25'000'000'000);
  CHECK(network_capacity(ContactPlan{}, net).sink_capacity == 0);
  CHECK(causal_capacity(ContactPlan{}, net) == 0);
}

TEST_CASE("causal capacity respects store and forward order") {
  const Network net = three_node();
  ContactPlan late_in;
  late_in.entries.push_back(entry("r", "g", 0, 160000, 50'000'000));
  late_in.entries.push_back(entry("s", "r", 1, 200000, 50'000'000));
  CHECK(network_capacity(late_in, net).sink_capacity == 8'000'000'000);
  CHECK(causal_capacity(late_in, net) == 0);
  ContactPlan ordered;
  ordered.entries.push_back(entry("s", "r", 0, 200000, 50'000'000));
  ordered.entries.push_back(entry("r", "g", 1, 160000, 50'000'000));
  CHECK(causal_capacity(ordered, net) == 8'000'000'000);
}

TEST_CASE("max temporal flow on hand instances") {
  {
    test::Builder b(600, 600);
    b.source("s", 10).sink("g", 10).window("s", "g", 0, 1);
    const Network net = b.network();
    CHECK(max_temporal_flow(fractionate(net, 600), net) == doctest::Approx(10.0));
  }
  {
    test::Builder b(1200, 600);
    b.source("s", 10).relay("r", "earth-orbit", 10).sink("g", 4);
    b.window("s", "r", 0, 1).window("r", "g", 600, 601);
    const Network net = b.network();
    CHECK(max_temporal_flow(fractionate(net, 600), net) == doctest::Approx(4.0));
  }
  {
    // Relay data cannot leave before it arrives.
    test::Builder b(1200, 600);
    b.source("s", 10).relay("r", "earth-orbit", 10).sink("g", 4);
    b.window("s", "r", 600, 601).window("r", "g", 0, 1);
    const Network net = b.network();
    CHECK(max_temporal_flow(fractionate(net, 600), net) == doctest::Approx(0.0));
  }
}

TEST_CASE("max temporal flow matches an independent max-flow oracle") {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 150; ++round) {
    const Network net(test::random_scenario(rng));
    const auto teg = fractionate(net, net.scenario().meta.slice_duration);
    const double expected = test::oracle_temporal_flow(teg, net);
    CHECK(max_temporal_flow(teg, net) == doctest::Approx(expected).epsilon(1e-9));
  }
}
