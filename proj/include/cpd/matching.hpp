#pragma once

#include <vector>

namespace cpd {

using MatchWeight = __int128;

struct WeightedEdge {
  int u = 0;
  int v = 0;
  MatchWeight weight = 0;
};

/// Maximum-weight matching on a general graph (Edmonds' blossom algorithm with
/// integer duals, O(n^3)). Returns mate[v] = partner of v or -1. Vertices are
/// 0..vertex_count-1; edges with weight <= 0 never improve the result.
std::vector<int> max_weight_matching(int vertex_count, const std::vector<WeightedEdge>& edges,
                                     bool max_cardinality = false);

}  // namespace cpd
