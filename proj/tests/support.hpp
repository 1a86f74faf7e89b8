#pragma once

#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "cpd/model.hpp"
#include "cpd/teg.hpp"

namespace cpd::test {

/// Hand-built scenarios: one terminal "t0" per node unless stated otherwise.
class Builder {
 public:
  explicit Builder(Seconds horizon = 3600, Seconds slice = 600, std::string name = "test") {
    s_.meta.name = std::move(name);
    s_.meta.horizon = horizon;
    s_.meta.slice_duration = slice;
  }

  Builder& node(const std::string& id, NodeRole role, const std::string& body, BitRate rate = 50'000'000,
                const std::string& preset = "ipn", int terminals = 1) {
    Node n;
    n.id = id;
    n.role = role;
    n.body = body;
    for (int t = 0; t < terminals; ++t) {
      Terminal term;
      term.id = "t" + std::to_string(t);
      term.bit_rate = rate;
      term.preset = preset;
      term.retarget = *builtin_preset(preset);
      n.terminals.push_back(term);
    }
    s_.nodes.push_back(std::move(n));
    return *this;
  }
  Builder& source(const std::string& id, BitRate rate = 50'000'000) {
    return node(id, NodeRole::Source, "mars-orbit", rate);
  }
  Builder& relay(const std::string& id, const std::string& body = "earth-orbit", BitRate rate = 50'000'000) {
    return node(id, NodeRole::Relay, body, rate);
  }
  Builder& sink(const std::string& id, BitRate rate = 50'000'000) {
    return node(id, NodeRole::Sink, "earth-surface", rate, "leo");
  }

  Builder& window(const std::string& tx, const std::string& rx, Seconds start, Seconds end,
                  EndpointGeometry geometry = {}, const std::string& tx_terminal = "t0",
                  const std::string& rx_terminal = "t0") {
    ContactWindow w;
    char id[16];
    std::snprintf(id, sizeof id, "w%03zu", s_.windows.size());
    w.id = id;
    w.tx_node = tx;
    w.tx_terminal = tx_terminal;
    w.rx_node = rx;
    w.rx_terminal = rx_terminal;
    w.start = start;
    w.end = end;
    w.geometry = geometry;
    w.owlt = 1;
    s_.windows.push_back(std::move(w));
    return *this;
  }

  Scenario& scenario() { return s_; }
  Network network() const { return Network(s_); }

 private:
  Scenario s_;
};

inline EndpointGeometry pointing(double tx_az, double tx_el, double rx_az, double rx_el) {
  return {{tx_az, tx_el}, {rx_az, rx_el}};
}

struct RandomShape {
  int max_nodes = 8;
  int max_slices = 12;
  int max_windows = 14;
  Seconds slice = 600;
  // Start and end on a 100 s grid so partial slices occur.
  Seconds grid = 100;
  bool invalid_directions = true;
};

/// Random small scenario mixing valid and invalid link directions, relays at
/// Earth and at Mars, and partial slices.
inline Scenario random_scenario(std::mt19937_64& rng, const RandomShape& shape = {}) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const int nodes = pick(3, shape.max_nodes);
  const int sinks = pick(1, std::min(2, nodes - 2));
  const int relays = pick(0, nodes - sinks - 1);
  const int sources = nodes - sinks - relays;
  const int slices = pick(1, shape.max_slices);
  Builder b(slices * shape.slice, shape.slice, "random");
  std::vector<std::string> ids;
  for (int i = 0; i < sources; ++i) {
    ids.push_back("s" + std::to_string(i));
    b.source(ids.back(), pick(0, 1) ? 50'000'000 : 20'000'000);
  }
  for (int i = 0; i < relays; ++i) {
    ids.push_back("r" + std::to_string(i));
    b.relay(ids.back(), pick(0, 3) == 0 ? "mars-orbit" : "earth-orbit", pick(0, 1) ? 50'000'000 : 30'000'000);
  }
  for (int i = 0; i < sinks; ++i) {
    ids.push_back("g" + std::to_string(i));
    b.sink(ids.back(), pick(0, 1) ? 1'200'000'000 : 40'000'000);
  }
  auto role = [&](int i) { return i < sources ? NodeRole::Source : (i < sources + relays ? NodeRole::Relay : NodeRole::Sink); };
  const int windows = pick(1, shape.max_windows);
  const Seconds ticks = slices * shape.slice / shape.grid;
  for (int w = 0; w < windows; ++w) {
    int tx = pick(0, nodes - 1);
    int rx = pick(0, nodes - 2);
    if (rx >= tx) ++rx;
    if (!shape.invalid_directions) {
      const bool ok = (role(tx) == NodeRole::Source && role(rx) != NodeRole::Source) ||
                      (role(tx) == NodeRole::Relay && role(rx) == NodeRole::Sink);
      if (!ok) continue;
    }
    const Seconds a = pick(0, static_cast<int>(ticks) - 1);
    const Seconds len = pick(1, std::min<int>(static_cast<int>(ticks - a), 3 * static_cast<int>(shape.slice / shape.grid)));
    auto angle = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    b.window(ids[tx], ids[rx], a * shape.grid, (a + len) * shape.grid,
             pointing(angle(0, 359), angle(-60, 60), angle(0, 359), angle(-60, 60)));
  }
  return b.scenario();
}

}  // namespace cpd::test
