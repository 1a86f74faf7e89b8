#include "doctest.h"

#include <random>

#include "cpd/metrics.hpp"
#include "support.hpp"

using namespace cpd;

namespace {

PlanEntry slice(const std::string& tx, Seconds start, Seconds end, Millis t_eff, int k = 0,
                const std::string& window = "w") {
  PlanEntry e;
  e.window = window;
  e.k = k;
  e.tx_node = tx;
  e.tx_terminal = "t0";
  e.rx_node = "g";
  e.rx_terminal = "t0";
  e.slice_start = start;
  e.slice_end = end;
  e.t_eff_ms = t_eff;
  e.t_retarget_ms = (end - start) * 1000 - t_eff;
  e.bit_rate_used = 50'000'000;
  e.flow = flow_bits(t_eff, e.bit_rate_used);
  return e;
}

}  // namespace

TEST_CASE("duty cycle") {
  ContactPlan p;
  CHECK_FALSE(duty_cycle(p).has_value());
  p.entries = {slice("a", 0, 600, 500000), slice("b", 0, 600, 550000)};
  CHECK(*duty_cycle(p) == doctest::Approx(87.5));
  p.entries = {slice("a", 0, 600, 600000), slice("a", 600, 1200, 600000, 1)};
  CHECK(*duty_cycle(p) == 100.0);
  p.entries = {slice("a", 0, 600, 0), slice("b", 0, 600, 600000)};
  CHECK(*duty_cycle(p) == 50.0);
}

TEST_CASE("jain fairness") {
  CHECK(*jain_fairness({3.0, 3.0, 3.0}) == doctest::Approx(1.0));
  CHECK(*jain_fairness({7.0, 0.0, 0.0, 0.0}) == doctest::Approx(0.25));
  CHECK(*jain_fairness({2.0, 1.0, 1.0}) == doctest::Approx(16.0 / 18.0));
  CHECK_FALSE(jain_fairness({}).has_value());
  CHECK_FALSE(jain_fairness({0.0, 0.0}).has_value());
}

TEST_CASE("jain fairness is scale invariant and bounded") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int round = 0; round < 200; ++round) {
    std::vector<double> x(1 + rng() % 8);
    for (auto& v : x) v = u(rng);
    const double j = *jain_fairness(x);
    CHECK(j >= 1.0 / static_cast<double>(x.size()) - 1e-12);
    CHECK(j <= 1.0 + 1e-12);
    for (auto& v : x) v *= 1e6;
    CHECK(*jain_fairness(x) == doctest::Approx(j).epsilon(1e-12));
  }
}

TEST_CASE("inter-contact delay") {
  ContactPlan p;
  p.entries = {slice("a", 0, 600, 600000), slice("a", 1800, 2400, 600000, 3)};
  CHECK(*inter_contact_delay(p, "a", 3600) == doctest::Approx(1200.0));
  p.entries = {slice("a", 0, 600, 600000)};
  CHECK(*inter_contact_delay(p, "a", 3600) == doctest::Approx(3000.0));
  p.entries = {slice("a", 0, 600, 600000), slice("a", 600, 1200, 600000, 1)};
  CHECK(*inter_contact_delay(p, "a", 3600) == 0.0);
  CHECK_FALSE(inter_contact_delay(p, "zz", 3600).has_value());
}

TEST_CASE("uptime and run length") {
  ContactPlan p;
  CHECK(uptime(p) == 0.0);
  CHECK_FALSE(mean_run_length(p).has_value());
  p.entries = {slice("a", 0, 600, 500000)};
  CHECK(uptime(p) == 500.0);
  p.entries = {slice("a", 0, 600, 500000, 0, "w1"), slice("a", 600, 1200, 600000, 1, "w1"),
               slice("a", 1800, 2400, 600000, 3, "w1"), slice("b", 0, 600, 600000, 0, "w2")};
  CHECK(*mean_run_length(p) == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("compute_metrics aggregates the plan") {
  test::Builder b(3600, 600);
  b.source("a").source("b").source("idle").sink("g", 1'200'000'000);
  b.window("a", "g", 0, 1200).window("b", "g", 0, 1200, {}, "t0", "t0");
  const Network net = b.network();
  ContactPlan p;
  p.algorithm = "greedy";
  p.entries = {slice("a", 0, 600, 500000), slice("b", 600, 1200, 250000, 1)};
  p.entries[1].tx_node = "b";
  const auto m = compute_metrics(p, net);
  CHECK(m.algorithm == "greedy");
  CHECK(m.network_capacity == flow_bits(750000, 50'000'000));
  CHECK(m.objective == m.network_capacity);
  CHECK(*m.duty_cycle == doctest::Approx(62.5));
  CHECK(m.transmitted.size() == 2);
  CHECK(m.ect.at("a") == 500.0);
  CHECK(*m.jain_index == doctest::Approx(*jain_fairness({500.0, 250.0})));
  CHECK(m.uptime == 750.0);
  CHECK(m.entries == 2);
  CHECK(opportunity_sources(net) == std::vector<std::string>{"a", "b"});
}
