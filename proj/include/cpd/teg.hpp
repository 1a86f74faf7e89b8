#pragma once

#include <compare>
#include <cstddef>
#include <vector>

#include "cpd/model.hpp"

namespace cpd {

/// The part of one contact window that falls inside one time slice.
struct TimeEdge {
  int window = -1;  // index into scenario().windows
  int k = 0;
  int tx_node = -1;
  int rx_node = -1;
  int tx_terminal = -1;  // global terminal indices (see Network)
  int rx_terminal = -1;
  Seconds start = 0;
  Seconds end = 0;
  BitRate rate = 0;     // min of the two terminal rates
  Bits capacity = 0;    // pre-PAT bound: duration x rate
  EndpointGeometry at_start;
  EndpointGeometry at_end;
  // Same window in slice k-1, when both slices are present in this graph.
  int predecessor = -1;

  Seconds duration() const { return end - start; }
  Millis duration_ms() const { return (end - start) * 1000; }
};

class TimeExpandedGraph {
 public:
  TimeExpandedGraph() = default;
  TimeExpandedGraph(int slice_count, Seconds slice_duration, std::size_t node_count,
                    std::vector<TimeEdge> edges);

  int slice_count() const { return slice_count_; }
  Seconds slice_duration() const { return slice_duration_; }
  std::size_t node_count() const { return node_count_; }
  const std::vector<TimeEdge>& edges() const { return edges_; }
  const TimeEdge& edge(int index) const { return edges_[index]; }
  std::size_t edge_count() const { return edges_.size(); }
  /// Edge indices of slice k, in canonical order.
  const std::vector<int>& slice(int k) const { return by_slice_[k]; }
  Seconds slice_start(int k) const { return static_cast<Seconds>(k) * slice_duration_; }

  /// |V| x (K + 1) time-stamped node copies.
  std::size_t vertex_count() const { return node_count_ * (static_cast<std::size_t>(slice_count_) + 1); }
  /// Node copies with at least one incident edge.
  std::size_t active_vertex_count() const;

  /// Index of the edge for (window, k), or -1.
  int find(int window, int k) const;

 private:
  int slice_count_ = 0;
  Seconds slice_duration_ = 0;
  std::size_t node_count_ = 0;
  std::vector<TimeEdge> edges_;
  std::vector<std::vector<int>> by_slice_;
};

/// Splits every window on the global slice grid [k*d, (k+1)*d) clipped to the
/// scenario horizon. Partial leading or trailing slices keep their true length.
TimeExpandedGraph fractionate(const Network& network, Seconds slice_duration);

struct ReductionStats {
  std::size_t edges_before = 0;
  std::size_t edges_after = 0;
  std::size_t source_to_source = 0;
  std::size_t wrong_orientation = 0;  // reverse or relay-relay directions
  std::size_t invalid_relay_body = 0;
  std::size_t no_journey = 0;

  double pruned_fraction() const {
    return edges_before == 0 ? 0.0
                             : 1.0 - static_cast<double>(edges_after) / static_cast<double>(edges_before);
  }
};

/// Keeps only edges that lie on some one-hop source->sink or two-hop
/// source->relay->sink journey.
TimeExpandedGraph reduce_dag(const TimeExpandedGraph& teg, const Network& network,
                             ReductionStats* stats = nullptr);

struct EdgeKey {
  int window = -1;
  int k = 0;
  auto operator<=>(const EdgeKey&) const = default;
};

struct Journey {
  std::vector<EdgeKey> hops;
  auto operator<=>(const Journey&) const = default;
};

/// Time-respecting source->sink journeys of at most `max_hops` hops (1 or 2).
/// A relay may forward within the same slice it received in.
std::vector<Journey> enumerate_journeys(const TimeExpandedGraph& teg, const Network& network,
                                        int max_hops = 2);

}  // namespace cpd
