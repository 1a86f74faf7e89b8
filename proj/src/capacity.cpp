#include "cpd/capacity.hpp"

#include <algorithm>
#include <stdexcept>

#include "cpd/lp.hpp"

namespace cpd {

std::string_view to_string(EdgeCategory category) {
  switch (category) {
    case EdgeCategory::OneHopDTE: return "one-hop-dte";
    case EdgeCategory::RelayToSink: return "relay-to-sink";
    case EdgeCategory::SourceToRelay: return "source-to-relay";
    case EdgeCategory::Invalid: return "invalid";
  }
  return "invalid";
}

EdgeCategory edge_category(const Network& network, int tx_node, int rx_node) {
  const NodeRole from = network.role(tx_node);
  const NodeRole to = network.role(rx_node);
  if (from == NodeRole::Source && to == NodeRole::Sink) return EdgeCategory::OneHopDTE;
  if (from == NodeRole::Relay && to == NodeRole::Sink) return EdgeCategory::RelayToSink;
  if (from == NodeRole::Source && to == NodeRole::Relay) {
    const auto relay_planet = planet_of(network.node(rx_node).body);
    if (relay_planet == planet_of(network.node(tx_node).body)) return EdgeCategory::SourceToRelay;
    for (const auto& p : network.destination_planets()) {
      if (p == relay_planet) return EdgeCategory::SourceToRelay;
    }
  }
  return EdgeCategory::Invalid;
}

Bits edge_flow(const PlanEntry& entry, bool selected) {
  if (!selected) return 0;
  return flow_bits(entry.t_eff_ms, entry.bit_rate_used);
}

namespace {

struct Tally {
  std::vector<Bits> from_sources;  // relay inflow
  std::vector<Bits> to_sinks;      // relay outflow
  std::vector<Bits> dte_in;        // sink direct inflow
  std::vector<Bits> raw_in;        // sink, every incoming bit
  std::vector<Bits> sent;          // source transmitted volume
  // relay -> sink flow matrix, row-major by relay
  std::vector<Bits> relay_to_sink;
};

Tally tally(const ContactPlan& plan, const Network& network) {
  const std::size_t n = network.node_count();
  Tally t{std::vector<Bits>(n, 0), std::vector<Bits>(n, 0), std::vector<Bits>(n, 0),
          std::vector<Bits>(n, 0), std::vector<Bits>(n, 0), std::vector<Bits>(n * n, 0)};
  for (const auto& e : plan.entries) {
    const int tx = network.node_index(e.tx_node);
    const int rx = network.node_index(e.rx_node);
    if (tx < 0 || rx < 0) throw std::invalid_argument("plan entry references unknown node");
    const Bits f = edge_flow(e);
    switch (edge_category(network, tx, rx)) {
      case EdgeCategory::OneHopDTE:
        t.sent[tx] += f;
        t.dte_in[rx] += f;
        t.raw_in[rx] += f;
        break;
      case EdgeCategory::SourceToRelay:
        t.sent[tx] += f;
        t.from_sources[rx] += f;
        break;
      case EdgeCategory::RelayToSink:
        t.to_sinks[tx] += f;
        t.raw_in[rx] += f;
        t.relay_to_sink[static_cast<std::size_t>(tx) * n + rx] += f;
        break;
      case EdgeCategory::Invalid:
        break;
    }
  }
  return t;
}

}  // namespace

std::vector<NodeCapacity> node_capacities(const ContactPlan& plan, const Network& network) {
  const Tally t = tally(plan, network);
  const std::size_t n = network.node_count();
  std::vector<NodeCapacity> out(n);
  std::vector<Bits> handed(n, 0);  // relay capacity credited to each sink

  for (std::size_t v = 0; v < n; ++v) {
    out[v].node = network.node(static_cast<int>(v)).id;
    out[v].role = network.role(static_cast<int>(v));
  }
  for (std::size_t r = 0; r < n; ++r) {
    if (out[r].role != NodeRole::Relay) continue;
    auto& c = out[r];
    c.inflow = t.from_sources[r];
    c.outflow = t.to_sinks[r];
    c.capacity = std::min(c.inflow, c.outflow);
    // Hand the relay's capacity down to its sinks in scenario order, never
    // more than was actually sent to each one.
    Bits left = c.capacity;
    for (std::size_t s = 0; s < n && left > 0; ++s) {
      const Bits g = std::min(left, t.relay_to_sink[r * n + s]);
      handed[s] += g;
      left -= g;
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    auto& c = out[v];
    if (c.role == NodeRole::Sink) {
      c.inflow = t.dte_in[v] + handed[v];
      c.outflow_unbounded = true;
      c.capacity = c.inflow;
      c.raw_inflow = t.raw_in[v];
    } else if (c.role == NodeRole::Source) {
      c.outflow = t.sent[v];
      c.capacity = t.sent[v];
    }
  }
  return out;
}

NodeCapacity node_capacity(const ContactPlan& plan, const Network& network, std::string_view node) {
  const int index = network.node_index(node);
  if (index < 0) throw std::invalid_argument("unknown node " + std::string(node));
  return node_capacities(plan, network)[index];
}

NetworkCapacity network_capacity(const ContactPlan& plan, const Network& network) {
  NetworkCapacity result;
  for (const auto& c : node_capacities(plan, network)) {
    if (c.role == NodeRole::Sink) {
      result.sink_capacity += c.capacity;
      result.relay_sink_objective += c.capacity;
    } else if (c.role == NodeRole::Relay) {
      result.relay_sink_objective += c.capacity;
    }
  }
  return result;
}

Bits causal_capacity(const ContactPlan& plan, const Network& network) {
  const std::size_t n = network.node_count();
  int slices = 0;
  for (const auto& e : plan.entries) slices = std::max(slices, e.k + 1);
  std::vector<Bits> in(n * slices, 0), out(n * slices, 0);
  Bits delivered = 0;
  for (const auto& e : plan.entries) {
    const int tx = network.node_index(e.tx_node);
    const int rx = network.node_index(e.rx_node);
    const Bits f = edge_flow(e);
    switch (edge_category(network, tx, rx)) {
      case EdgeCategory::OneHopDTE: delivered += f; break;
      case EdgeCategory::SourceToRelay: in[static_cast<std::size_t>(rx) * slices + e.k] += f; break;
      case EdgeCategory::RelayToSink: out[static_cast<std::size_t>(tx) * slices + e.k] += f; break;
      case EdgeCategory::Invalid: break;
    }
  }
  for (std::size_t r = 0; r < n; ++r) {
    if (network.role(static_cast<int>(r)) != NodeRole::Relay) continue;
    Bits buffer = 0;
    for (int k = 0; k < slices; ++k) {
      buffer += in[r * slices + k];
      const Bits sent = std::min(buffer, out[r * slices + k]);
      delivered += sent;
      buffer -= sent;
    }
  }
  return delivered;
}

double max_temporal_flow(const TimeExpandedGraph& teg, const Network& network) {
  // Work in Mbit to keep the simplex tolerances meaningful.
  constexpr double kUnit = 1e6;
  const int slices = teg.slice_count();
  const std::size_t n = network.node_count();
  lp::Problem p;
  double direct = 0.0;
  std::vector<std::vector<std::pair<int, double>>> balance(n * static_cast<std::size_t>(slices));
  for (const auto& e : teg.edges()) {
    const double cap = static_cast<double>(e.capacity) / kUnit;
    switch (edge_category(network, e)) {
      case EdgeCategory::OneHopDTE:
        // No interaction with anything else: always saturated.
        direct += static_cast<double>(e.capacity);
        break;
      case EdgeCategory::SourceToRelay: {
        const int x = p.add_variable(0.0, cap, 0.0);
        balance[static_cast<std::size_t>(e.rx_node) * slices + e.k].push_back({x, -1.0});
        break;
      }
      case EdgeCategory::RelayToSink: {
        const int x = p.add_variable(0.0, cap, 1.0);
        balance[static_cast<std::size_t>(e.tx_node) * slices + e.k].push_back({x, 1.0});
        break;
      }
      case EdgeCategory::Invalid:
        break;
    }
  }
  // Buffer level after slice k: b_k = b_{k-1} + in_k - out_k >= 0.
  for (std::size_t r = 0; r < n; ++r) {
    if (network.role(static_cast<int>(r)) != NodeRole::Relay) continue;
    int prev = -1;
    for (int k = 0; k < slices; ++k) {
      auto terms = balance[r * slices + k];
      if (terms.empty() && prev < 0) continue;
      const int b = p.add_variable(0.0, lp::kInf, 0.0);
      terms.push_back({b, 1.0});
      if (prev >= 0) terms.push_back({prev, -1.0});
      p.add_row(std::move(terms), lp::Sense::Eq, 0.0);
      prev = b;
    }
  }
  if (p.rows.empty()) return direct;
  const auto sol = lp::solve(p);
  if (sol.status != lp::Status::Optimal) throw std::logic_error("temporal flow model failed to solve");
  return direct + sol.objective * kUnit;
}

}  // namespace cpd
