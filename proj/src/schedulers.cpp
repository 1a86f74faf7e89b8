#include "cpd/schedulers.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "cpd/capacity.hpp"
#include "cpd/matching.hpp"

namespace cpd {

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::Greedy: return "greedy";
    case Algorithm::GreedyZrk: return "greedy_zrk";
    case Algorithm::Fcp: return "fcp";
    case Algorithm::Dte: return "dte";
    case Algorithm::Milp: return "milp";
  }
  return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view text) {
  for (auto a : {Algorithm::Greedy, Algorithm::GreedyZrk, Algorithm::Fcp, Algorithm::Dte, Algorithm::Milp}) {
    if (to_string(a) == text) return a;
  }
  return std::nullopt;
}

std::vector<int> match_slice(const TimeExpandedGraph& teg, const std::vector<int>& candidates,
                             const std::vector<std::int64_t>& weights) {
  if (candidates.size() != weights.size()) throw std::invalid_argument("one weight per candidate expected");
  // Parallel links between the same two terminals: keep the heavier, then
  // the earlier one in canonical order.
  std::map<std::pair<int, int>, std::size_t> best;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (weights[i] <= 0) continue;
    const auto& e = teg.edge(candidates[i]);
    const auto key = std::minmax(e.tx_terminal, e.rx_terminal);
    auto [it, inserted] = best.emplace(key, i);
    if (!inserted && weights[i] > weights[it->second]) it->second = i;
  }
  std::vector<std::size_t> kept;
  for (const auto& [key, i] : best) kept.push_back(i);
  std::sort(kept.begin(), kept.end());
  if (kept.empty()) return {};

  // Lexicographic tie-break folded into the weight: the rank bonus of a whole
  // matching stays below one unit of the scaled primary weight.
  const auto count = static_cast<MatchWeight>(kept.size());
  const MatchWeight scale = count * (count + 1) / 2 + 1;
  std::map<int, int> vertex;
  std::vector<WeightedEdge> edges;
  for (std::size_t r = 0; r < kept.size(); ++r) {
    const auto& e = teg.edge(candidates[kept[r]]);
    const int u = vertex.emplace(e.tx_terminal, static_cast<int>(vertex.size())).first->second;
    const int v = vertex.emplace(e.rx_terminal, static_cast<int>(vertex.size())).first->second;
    edges.push_back({u, v, static_cast<MatchWeight>(weights[kept[r]]) * scale + (count - static_cast<MatchWeight>(r))});
  }
  const auto mate = max_weight_matching(static_cast<int>(vertex.size()), edges);
  std::vector<int> out;
  for (std::size_t r = 0; r < kept.size(); ++r) {
    if (mate[edges[r].u] == edges[r].v) out.push_back(candidates[kept[r]]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

ContactPlan finish(const TimeExpandedGraph& teg, const Network& network, const std::vector<int>& selected,
                   const SchedulerConfig& config, Algorithm algorithm) {
  ContactPlan plan = evaluate_selection(teg, network, selected, config.pat);
  plan.algorithm = std::string(to_string(algorithm));
  return plan;
}

}  // namespace

ContactPlan schedule_greedy(const TimeExpandedGraph& teg, const Network& network, const SchedulerConfig& config) {
  const bool zrk = config.zrk || config.algorithm == Algorithm::GreedyZrk;
  PatOptions pat = config.pat;
  pat.zero_delay = zrk;
  PatTracker tracker(teg, network, pat);

  const int n = static_cast<int>(network.node_count());
  const int slices = teg.slice_count();
  // Downlink potential of each relay from slice k onward, ignoring contention.
  std::vector<std::vector<Bits>> potential(n, std::vector<Bits>(slices + 1, 0));
  for (const auto& e : teg.edges()) {
    if (edge_category(network, e) == EdgeCategory::RelayToSink) potential[e.tx_node][e.k] += e.capacity;
  }
  for (auto& row : potential) {
    for (int k = slices - 1; k >= 0; --k) row[k] += row[k + 1];
  }
  std::vector<Bits> inflow(n, 0), outflow(n, 0);
  std::vector<int> selected;
  for (int k = 0; k < slices; ++k) {
    const auto& candidates = teg.slice(k);
    std::vector<std::int64_t> weights(candidates.size(), 0);
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const auto& e = teg.edge(candidates[c]);
      const Bits f = flow_bits(tracker.effective_ms(candidates[c]), e.rate);
      switch (edge_category(network, e)) {
        case EdgeCategory::OneHopDTE:
          weights[c] = f;
          break;
        case EdgeCategory::SourceToRelay: {
          const int r = e.rx_node;
          const Bits room = std::max<Bits>(0, outflow[r] + potential[r][k] - inflow[r]);
          weights[c] = 2 * std::min(f, room);
          break;
        }
        case EdgeCategory::RelayToSink: {
          const int r = e.tx_node;
          weights[c] = 2 * std::min(f, std::max<Bits>(0, inflow[r] - outflow[r]));
          break;
        }
        case EdgeCategory::Invalid:
          break;
      }
    }
    for (int i : match_slice(teg, candidates, weights)) {
      const auto& e = teg.edge(i);
      const Bits f = flow_bits(tracker.effective_ms(i), e.rate);
      const auto category = edge_category(network, e);
      if (category == EdgeCategory::SourceToRelay) inflow[e.rx_node] += f;
      if (category == EdgeCategory::RelayToSink) outflow[e.tx_node] += f;
      tracker.commit(i);
      selected.push_back(i);
    }
  }
  return finish(teg, network, selected, config, zrk ? Algorithm::GreedyZrk : Algorithm::Greedy);
}

ContactPlan schedule_fcp(const TimeExpandedGraph& teg, const Network& network, const SchedulerConfig& config) {
  std::vector<Seconds> disabled(network.node_count(), 0);
  std::vector<int> selected;
  for (int k = 0; k < teg.slice_count(); ++k) {
    const auto& candidates = teg.slice(k);
    if (candidates.empty()) continue;
    std::vector<std::int64_t> weights(candidates.size());
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const auto& e = teg.edge(candidates[c]);
      weights[c] = 1 + disabled[e.tx_node] + disabled[e.rx_node];
    }
    const auto chosen = match_slice(teg, candidates, weights);
    std::vector<char> active(network.node_count(), 0);
    for (int i : chosen) {
      active[teg.edge(i).tx_node] = active[teg.edge(i).rx_node] = 1;
      selected.push_back(i);
    }
    std::vector<char> had(network.node_count(), 0);
    for (int i : candidates) had[teg.edge(i).tx_node] = had[teg.edge(i).rx_node] = 1;
    for (std::size_t v = 0; v < had.size(); ++v) {
      if (had[v] && !active[v]) disabled[v] += teg.slice_duration();
    }
  }
  return finish(teg, network, selected, config, Algorithm::Fcp);
}

ContactPlan schedule_dte(const TimeExpandedGraph& teg, const Network& network, const SchedulerConfig& config) {
  PatOptions pat = config.pat;
  pat.zero_delay = false;
  PatTracker tracker(teg, network, pat);
  std::vector<int> selected;
  for (int k = 0; k < teg.slice_count(); ++k) {
    const auto& candidates = teg.slice(k);
    std::vector<std::int64_t> weights(candidates.size(), 0);
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const auto& e = teg.edge(candidates[c]);
      if (edge_category(network, e) == EdgeCategory::OneHopDTE)
        weights[c] = flow_bits(tracker.effective_ms(candidates[c]), e.rate);
    }
    for (int i : match_slice(teg, candidates, weights)) {
      tracker.commit(i);
      selected.push_back(i);
    }
  }
  return finish(teg, network, selected, config, Algorithm::Dte);
}

ContactPlan schedule_heuristic(const TimeExpandedGraph& teg, const Network& network,
                               const SchedulerConfig& config) {
  switch (config.algorithm) {
    case Algorithm::Greedy:
    case Algorithm::GreedyZrk: return schedule_greedy(teg, network, config);
    case Algorithm::Fcp: return schedule_fcp(teg, network, config);
    case Algorithm::Dte: return schedule_dte(teg, network, config);
    case Algorithm::Milp: break;
  }
  throw std::invalid_argument("milp is not a heuristic scheduler");
}

std::vector<int> selection_of(const ContactPlan& plan, const TimeExpandedGraph& teg) {
  std::vector<int> out;
  out.reserve(plan.entries.size());
  for (const auto& e : plan.entries) {
    const int i = teg.find(e.window_index, e.k);
    if (i < 0) throw std::invalid_argument("plan entry " + e.window + "@" + std::to_string(e.k) + " is not in the graph");
    out.push_back(i);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace cpd
