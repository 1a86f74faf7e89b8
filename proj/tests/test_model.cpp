#include "doctest.h"

#include "cpd/error.hpp"
#include "cpd/model.hpp"
#include "support.hpp"

using namespace cpd;

TEST_CASE("well-formed scenario validates cleanly") {
  test::Builder b;
  b.source("s").relay("r").sink("g").window("s", "r", 0, 600).window("r", "g", 600, 1200);
  CHECK(validate_scenario(b.scenario()).empty());
  CHECK_NOTHROW(b.network());
}

TEST_CASE("window violations name the window") {
  test::Builder b;
  b.source("s").sink("g").window("s", "g", 600, 600);
  auto v = validate_scenario(b.scenario());
  REQUIRE(v.size() == 1);
  CHECK(v[0].subject == "w000");

  test::Builder c;
  c.source("s").sink("g").window("s", "g", 0, 600, {}, "t0", "t9");
  v = validate_scenario(c.scenario());
  REQUIRE(v.size() == 1);
  CHECK(v[0].subject == "w000");
  CHECK_THROWS_AS(c.network(), ValidationError);
}

TEST_CASE("node and terminal violations") {
  test::Builder b;
  b.source("s").source("s").sink("g");
  CHECK(validate_scenario(b.scenario()).size() == 1);
  test::Builder c;
  c.source("s", 0).sink("g");
  CHECK(validate_scenario(c.scenario()).size() == 1);
  test::Builder d;
  d.source("s").sink("g").window("s", "s", 0, 600);
  CHECK(validate_scenario(d.scenario()).size() >= 1);
}

TEST_CASE("presets") {
  CHECK(ipn_preset().slew_az == 1.0);
  CHECK(ipn_preset().fou == 1.0);
  CHECK(leo_preset().fou == 0.75);
  CHECK(builtin_preset("ipn") == ipn_preset());
  CHECK_FALSE(builtin_preset("geo").has_value());
  CHECK(planet_of("mars-orbit") == "mars");
  CHECK(planet_of("earth") == "earth");
}

TEST_CASE("geometry interpolates along the shortest arc") {
  ContactWindow w;
  w.start = 0;
  w.end = 100;
  w.geometry = test::pointing(350.0, 0.0, 10.0, 10.0);
  CHECK(w.geometry_at(50) == w.geometry);
  w.geometry_end = test::pointing(10.0, 20.0, 30.0, 30.0);
  const auto mid = w.geometry_at(50);
  CHECK(mid.tx.az == doctest::Approx(0.0));
  CHECK(mid.tx.el == doctest::Approx(10.0));
  CHECK(mid.rx.az == doctest::Approx(20.0));
  w.track.push_back({50, test::pointing(0.0, 40.0, 0.0, 0.0)});
  CHECK(w.geometry_at(25).tx.el == doctest::Approx(20.0));
  CHECK(w.geometry_at(75).tx.el == doctest::Approx(30.0));
  CHECK(w.geometry_at(100).rx.az == doctest::Approx(30.0));
}

TEST_CASE("network indexes terminals") {
  test::Builder b;
  b.node("s", NodeRole::Source, "mars-orbit", 50'000'000, "ipn", 2).sink("g");
  const Network net = b.network();
  CHECK(net.terminal_count() == 3);
  CHECK(net.terminal_index("s", "t1") == 1);
  CHECK(net.terminal_index("g", "t0") == 2);
  CHECK(net.terminal_node(2) == 1);
  CHECK(net.node_index("g") == 1);
  CHECK(net.destination_planets() == std::vector<std::string>{"earth"});
}
