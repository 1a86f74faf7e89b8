#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cpd/model.hpp"
#include "cpd/teg.hpp"

namespace cpd {

enum class EdgeCategory { OneHopDTE, RelayToSink, SourceToRelay, Invalid };

std::string_view to_string(EdgeCategory category);

/// Path category of a directed link. Source->relay links count only when the
/// relay orbits the source's planet or a destination planet.
EdgeCategory edge_category(const Network& network, int tx_node, int rx_node);
inline EdgeCategory edge_category(const Network& network, const TimeEdge& edge) {
  return edge_category(network, edge.tx_node, edge.rx_node);
}

/// L x t_eff x B for one slice of one edge.
Bits edge_flow(const PlanEntry& entry, bool selected = true);

struct NodeCapacity {
  std::string node;
  NodeRole role = NodeRole::Source;
  Bits inflow = 0;
  Bits outflow = 0;  // meaningless for sinks, see outflow_unbounded
  bool outflow_unbounded = false;
  Bits capacity = 0;
  // Sinks only: every incoming bit, before relay backlog is discounted.
  Bits raw_inflow = 0;
};

/// Horizon-aggregated capacity of every node, in scenario order.
///  relay:  inflow = flows from sources, outflow = flows to sinks, min of both
///  sink:   inflow = direct flows + relay capacities handed down to it
///  source: capacity = transmitted volume
std::vector<NodeCapacity> node_capacities(const ContactPlan& plan, const Network& network);
NodeCapacity node_capacity(const ContactPlan& plan, const Network& network, std::string_view node);

struct NetworkCapacity {
  Bits sink_capacity = 0;         // sum of sink capacities
  Bits relay_sink_objective = 0;  // sum over relays and sinks (scheduler objective)
};

NetworkCapacity network_capacity(const ContactPlan& plan, const Network& network);

/// Store-and-forward delivered volume: relay data may only leave in the slice
/// it arrived or later.
Bits causal_capacity(const ContactPlan& plan, const Network& network);

/// LP maximum temporal flow over the one- and two-hop journey structure with
/// unbounded relay buffers and no interface limits. Returns bits.
double max_temporal_flow(const TimeExpandedGraph& teg, const Network& network);

}  // namespace cpd
