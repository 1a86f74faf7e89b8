#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <queue>
#include <vector>

#include "cpd/capacity.hpp"
#include "cpd/matching.hpp"
#include "cpd/teg.hpp"

namespace cpd::test {

/// Edmonds-Karp on integer capacities.
class MaxFlow {
 public:
  explicit MaxFlow(int n) : adj_(n) {}

  void add(int u, int v, std::int64_t cap) {
    adj_[u].push_back(static_cast<int>(arcs_.size()));
    arcs_.push_back({v, cap});
    adj_[v].push_back(static_cast<int>(arcs_.size()));
    arcs_.push_back({u, 0});
  }

  std::int64_t run(int s, int t) {
    std::int64_t total = 0;
    const int n = static_cast<int>(adj_.size());
    while (true) {
      std::vector<int> via(n, -1);
      std::queue<int> q;
      q.push(s);
      via[s] = -2;
      while (!q.empty() && via[t] == -1) {
        const int u = q.front();
        q.pop();
        for (int a : adj_[u]) {
          if (arcs_[a].cap > 0 && via[arcs_[a].to] == -1) {
            via[arcs_[a].to] = a;
            q.push(arcs_[a].to);
          }
        }
      }
      if (via[t] == -1) return total;
      std::int64_t push = std::numeric_limits<std::int64_t>::max();
      for (int v = t; v != s; v = arcs_[via[v] ^ 1].to) push = std::min(push, arcs_[via[v]].cap);
      for (int v = t; v != s; v = arcs_[via[v] ^ 1].to) {
        arcs_[via[v]].cap -= push;
        arcs_[via[v] ^ 1].cap += push;
      }
      total += push;
    }
  }

 private:
  struct Arc {
    int to;
    std::int64_t cap;
  };
  std::vector<std::vector<int>> adj_;
  std::vector<Arc> arcs_;
};

/// Temporal flow on the expanded network: super source -> relay copy (r, k)
/// per uplink, holdover arcs (r, k) -> (r, k+1), (r, k) -> super sink per
/// downlink; direct links add their capacity.
inline double oracle_temporal_flow(const TimeExpandedGraph& teg, const Network& net) {
  const int slices = std::max(1, teg.slice_count());
  const int relays = static_cast<int>(net.node_count());
  const int s = relays * slices;
  const int t = s + 1;
  MaxFlow flow(t + 1);
  constexpr std::int64_t kBig = std::numeric_limits<std::int64_t>::max() / 4;
  for (int r = 0; r < relays; ++r) {
    for (int k = 0; k + 1 < slices; ++k) flow.add(r * slices + k, r * slices + k + 1, kBig);
  }
  std::int64_t direct = 0;
  for (const auto& e : teg.edges()) {
    switch (edge_category(net, e)) {
      case EdgeCategory::OneHopDTE: direct += e.capacity; break;
      case EdgeCategory::SourceToRelay: flow.add(s, e.rx_node * slices + e.k, e.capacity); break;
      case EdgeCategory::RelayToSink: flow.add(e.tx_node * slices + e.k, t, e.capacity); break;
      case EdgeCategory::Invalid: break;
    }
  }
  return static_cast<double>(direct + flow.run(s, t));
}

/// Every ordered edge pair checked directly.
inline std::vector<Journey> oracle_journeys(const TimeExpandedGraph& teg, const Network& net) {
  std::vector<Journey> out;
  const int n = static_cast<int>(teg.edge_count());
  for (int i = 0; i < n; ++i) {
    const auto& a = teg.edge(i);
    const auto ca = edge_category(net, a);
    if (ca == EdgeCategory::OneHopDTE) out.push_back({{EdgeKey{a.window, a.k}}});
    if (ca != EdgeCategory::SourceToRelay) continue;
    for (int j = 0; j < n; ++j) {
      const auto& b = teg.edge(j);
      if (b.tx_node == a.rx_node && b.k >= a.k && edge_category(net, b) == EdgeCategory::RelayToSink)
        out.push_back({{EdgeKey{a.window, a.k}, EdgeKey{b.window, b.k}}});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Best total weight over all matchings, by recursion on the lowest free vertex.
inline MatchWeight oracle_matching(int n, const std::vector<WeightedEdge>& edges) {
  std::vector<char> used(n, 0);
  auto best_from = [&](auto&& self, int v) -> MatchWeight {
    while (v < n && used[v]) ++v;
    if (v >= n) return 0;
    used[v] = 1;
    MatchWeight best = self(self, v + 1);
    for (const auto& e : edges) {
      int other = e.u == v ? e.v : (e.v == v ? e.u : -1);
      if (other < 0 || other == v || used[other]) continue;
      used[other] = 1;
      best = std::max(best, e.weight + self(self, v + 1));
      used[other] = 0;
    }
    used[v] = 0;
    return best;
  };
  return best_from(best_from, 0);
}

}  // namespace cpd::test
