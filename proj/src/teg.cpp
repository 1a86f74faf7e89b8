#include "cpd/teg.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>
#include <tuple>

#include "cpd/capacity.hpp"

namespace cpd {

TimeExpandedGraph::TimeExpandedGraph(int slice_count, Seconds slice_duration, std::size_t node_count,
                                     std::vector<TimeEdge> edges)
    : slice_count_(slice_count),
      slice_duration_(slice_duration),
      node_count_(node_count),
      edges_(std::move(edges)),
      by_slice_(static_cast<std::size_t>(slice_count)) {
  std::map<std::pair<int, int>, int> index;
  for (int i = 0; i < static_cast<int>(edges_.size()); ++i) {
    by_slice_.at(edges_[i].k).push_back(i);
    index.emplace(std::make_pair(edges_[i].window, edges_[i].k), i);
  }
  for (auto& e : edges_) {
    auto it = index.find({e.window, e.k - 1});
    e.predecessor = (it != index.end() && edges_[it->second].end == e.start) ? it->second : -1;
  }
}

std::size_t TimeExpandedGraph::active_vertex_count() const {
  std::vector<char> seen(vertex_count(), 0);
  for (const auto& e : edges_) {
    seen[static_cast<std::size_t>(e.k) * node_count_ + e.tx_node] = 1;
    seen[static_cast<std::size_t>(e.k) * node_count_ + e.rx_node] = 1;
  }
  return static_cast<std::size_t>(std::count(seen.begin(), seen.end(), 1));
}

int TimeExpandedGraph::find(int window, int k) const {
  if (k < 0 || k >= slice_count_) return -1;
  for (int i : by_slice_[k]) {
    if (edges_[i].window == window) return i;
  }
  return -1;
}

TimeExpandedGraph fractionate(const Network& network, Seconds slice_duration) {
  if (slice_duration <= 0) throw std::invalid_argument("slice duration must be positive");
  const auto& scenario = network.scenario();
  Seconds horizon = scenario.meta.horizon;
  if (horizon <= 0) {
    for (const auto& w : scenario.windows) horizon = std::max(horizon, w.end);
  }
  const int slices = static_cast<int>((horizon + slice_duration - 1) / slice_duration);

  std::vector<TimeEdge> edges;
  for (int wi = 0; wi < static_cast<int>(scenario.windows.size()); ++wi) {
    const auto& w = scenario.windows[wi];
    const int tx_node = network.node_index(w.tx_node);
    const int rx_node = network.node_index(w.rx_node);
    const int tx_term = network.terminal_index(w.tx_node, w.tx_terminal);
    const int rx_term = network.terminal_index(w.rx_node, w.rx_terminal);
    const BitRate rate = std::min(network.terminal(tx_term).bit_rate, network.terminal(rx_term).bit_rate);
    const Seconds end = std::min(w.end, horizon);
    for (Seconds t = w.start; t < end;) {
      const int k = static_cast<int>(t / slice_duration);
      const Seconds slice_end = std::min<Seconds>(static_cast<Seconds>(k + 1) * slice_duration, end);
      TimeEdge e;
      e.window = wi;
      e.k = k;
      e.tx_node = tx_node;
      e.rx_node = rx_node;
      e.tx_terminal = tx_term;
      e.rx_terminal = rx_term;
      e.start = t;
      e.end = slice_end;
      e.rate = rate;
      e.capacity = (slice_end - t) * rate;
      e.at_start = w.geometry_at(t);
      e.at_end = w.geometry_at(slice_end);
      edges.push_back(e);
      t = slice_end;
    }
  }
  std::stable_sort(edges.begin(), edges.end(), [&](const TimeEdge& a, const TimeEdge& b) {
    const auto& na = network.node(a.tx_node).id;
    const auto& nb = network.node(b.tx_node).id;
    const auto& ra = network.node(a.rx_node).id;
    const auto& rb = network.node(b.rx_node).id;
    return std::tie(a.k, na, ra, a.window) < std::tie(b.k, nb, rb, b.window);
  });
  return TimeExpandedGraph(slices, slice_duration, network.node_count(), std::move(edges));
}

TimeExpandedGraph reduce_dag(const TimeExpandedGraph& teg, const Network& network, ReductionStats* stats) {
  ReductionStats local;
  local.edges_before = teg.edge_count();

  std::vector<char> keep(teg.edge_count(), 0);
  const int n = static_cast<int>(network.node_count());
  constexpr int kNone = std::numeric_limits<int>::max();
  std::vector<int> first_uplink(n, kNone);  // earliest valid source->relay slice
  std::vector<int> last_downlink(n, -1);    // latest relay->sink slice

  for (int i = 0; i < static_cast<int>(teg.edge_count()); ++i) {
    const auto& e = teg.edge(i);
    const NodeRole from = network.role(e.tx_node);
    const NodeRole to = network.role(e.rx_node);
    switch (edge_category(network, e)) {
      case EdgeCategory::OneHopDTE:
        keep[i] = 1;
        break;
      case EdgeCategory::SourceToRelay:
        first_uplink[e.rx_node] = std::min(first_uplink[e.rx_node], e.k);
        keep[i] = 1;
        break;
      case EdgeCategory::RelayToSink:
        last_downlink[e.tx_node] = std::max(last_downlink[e.tx_node], e.k);
        keep[i] = 1;
        break;
      case EdgeCategory::Invalid:
        if (from == NodeRole::Source && to == NodeRole::Source) {
          ++local.source_to_source;
        } else if (from == NodeRole::Source && to == NodeRole::Relay) {
          ++local.invalid_relay_body;
        } else {
          ++local.wrong_orientation;
        }
        break;
    }
  }

  std::vector<TimeEdge> kept;
  for (int i = 0; i < static_cast<int>(teg.edge_count()); ++i) {
    if (!keep[i]) continue;
    const auto& e = teg.edge(i);
    const auto category = edge_category(network, e);
    bool on_journey = true;
    if (category == EdgeCategory::SourceToRelay) on_journey = e.k <= last_downlink[e.rx_node];
    if (category == EdgeCategory::RelayToSink) on_journey = e.k >= first_uplink[e.tx_node];
    if (!on_journey) {
      ++local.no_journey;
      continue;
    }
    kept.push_back(e);
  }
  local.edges_after = kept.size();
  if (stats) *stats = local;
  return TimeExpandedGraph(teg.slice_count(), teg.slice_duration(), teg.node_count(), std::move(kept));
}

std::vector<Journey> enumerate_journeys(const TimeExpandedGraph& teg, const Network& network, int max_hops) {
  std::vector<Journey> out;
  const int n = static_cast<int>(network.node_count());
  std::vector<std::vector<int>> downlinks(n);
  for (int i = 0; i < static_cast<int>(teg.edge_count()); ++i) {
    const auto& e = teg.edge(i);
    if (edge_category(network, e) == EdgeCategory::RelayToSink) downlinks[e.tx_node].push_back(i);
  }
  for (int i = 0; i < static_cast<int>(teg.edge_count()); ++i) {
    const auto& e = teg.edge(i);
    const auto category = edge_category(network, e);
    if (category == EdgeCategory::OneHopDTE && max_hops >= 1) {
      out.push_back({{EdgeKey{e.window, e.k}}});
    } else if (category == EdgeCategory::SourceToRelay && max_hops >= 2) {
      for (int j : downlinks[e.rx_node]) {
        const auto& d = teg.edge(j);
        if (d.k >= e.k) out.push_back({{EdgeKey{e.window, e.k}, EdgeKey{d.window, d.k}}});
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace cpd
