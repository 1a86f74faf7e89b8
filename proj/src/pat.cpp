#include "cpd/pat.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cpd/geometry.hpp"

namespace cpd {

double pointing_delay(const TerminalState& state, const Pointing& target, const RetargetParams& params,
                      const Pointing& park) {
  const Pointing& from = state.pointing ? *state.pointing : park;
  const double daz = azimuth_offset(from.az, target.az);
  const double del = std::fabs(target.el - from.el);
  return std::max(daz / params.slew_az, del / params.slew_el);
}

double acquisition_delay(const RetargetParams& params) {
  const double ratio = params.fou / params.beam_width;
  const double cells = std::ceil(ratio * ratio - 1e-9);
  return std::max(1.0, cells) * params.dwell;
}

double retarget_delay(const TerminalState& tx, const TerminalState& rx, const EndpointGeometry& geometry,
                      const RetargetParams& tx_params, const RetargetParams& rx_params, bool continuation,
                      const PatOptions& options) {
  if (continuation || options.zero_delay) return 0.0;
  const double tp = pointing_delay(tx, geometry.tx, tx_params, options.park);
  const double rp = pointing_delay(rx, geometry.rx, rx_params, options.park);
  const double pointing = options.sum_endpoints ? tp + rp : std::max(tp, rp);
  return pointing + acquisition_delay(rx_params);
}

Millis to_millis_ceil(double seconds) {
  if (seconds <= 0) return 0;
  return static_cast<Millis>(std::ceil(seconds * 1000.0 - 1e-6));
}

PatTracker::PatTracker(const TimeExpandedGraph& teg, const Network& network, PatOptions options)
    : teg_(teg), network_(network), options_(options), memory_(network.terminal_count()) {
  states_.resize(network.terminal_count());
  for (int t = 0; t < static_cast<int>(states_.size()); ++t) states_[t].terminal = t;
}

bool PatTracker::is_continuation(int edge) const {
  const auto& e = teg_.edge(edge);
  return e.predecessor >= 0 && memory_[e.tx_terminal].last_edge == e.predecessor &&
         memory_[e.rx_terminal].last_edge == e.predecessor;
}

Millis PatTracker::retarget_ms(int edge) const {
  if (options_.zero_delay) return 0;
  const auto& e = teg_.edge(edge);
  if (is_continuation(edge)) return memory_[e.tx_terminal].carry_ms;
  return to_millis_ceil(retarget_delay(states_[e.tx_terminal], states_[e.rx_terminal], e.at_start,
                                       network_.terminal(e.tx_terminal).retarget,
                                       network_.terminal(e.rx_terminal).retarget, false, options_));
}

Millis PatTracker::effective_ms(int edge) const {
  return std::max<Millis>(0, teg_.edge(edge).duration_ms() - retarget_ms(edge));
}

void PatTracker::commit(int edge) {
  const auto& e = teg_.edge(edge);
  const Millis carry = std::max<Millis>(0, retarget_ms(edge) - e.duration_ms());
  memory_[e.tx_terminal] = {edge, carry};
  memory_[e.rx_terminal] = {edge, carry};
  states_[e.tx_terminal].pointing = e.at_end.tx;
  states_[e.tx_terminal].partner = e.rx_terminal;
  states_[e.rx_terminal].pointing = e.at_end.rx;
  states_[e.rx_terminal].partner = e.tx_terminal;
}

ContactPlan evaluate_selection(const TimeExpandedGraph& teg, const Network& network,
                               const std::vector<int>& selected, const PatOptions& options) {
  std::vector<int> order(selected);
  std::sort(order.begin(), order.end());
  if (std::adjacent_find(order.begin(), order.end()) != order.end())
    throw std::invalid_argument("edge selected twice");

  PatOptions truth = options;
  truth.zero_delay = false;
  PatTracker tracker(teg, network, truth);
  std::vector<int> busy(network.terminal_count(), -1);  // slice of the last use
  ContactPlan plan;
  const auto& windows = network.scenario().windows;
  for (int i : order) {
    const auto& e = teg.edge(i);
    if (busy[e.tx_terminal] == e.k || busy[e.rx_terminal] == e.k)
      throw std::invalid_argument("terminal used twice in slice " + std::to_string(e.k));
    busy[e.tx_terminal] = busy[e.rx_terminal] = e.k;

    PlanEntry p;
    p.window = windows[e.window].id;
    p.window_index = e.window;
    p.k = e.k;
    p.tx_node = network.node(e.tx_node).id;
    p.tx_terminal = network.terminal(e.tx_terminal).id;
    p.rx_node = network.node(e.rx_node).id;
    p.rx_terminal = network.terminal(e.rx_terminal).id;
    p.slice_start = e.start;
    p.slice_end = e.end;
    p.continuation = tracker.is_continuation(i);
    p.t_retarget_ms = tracker.retarget_ms(i);
    p.t_eff_ms = std::max<Millis>(0, e.duration_ms() - p.t_retarget_ms);
    p.bit_rate_used = e.rate;
    p.flow = flow_bits(p.t_eff_ms, p.bit_rate_used);
    plan.entries.push_back(std::move(p));
    tracker.commit(i);
  }
  return plan;
}

WorstCaseDelays worst_case_delays(const TimeExpandedGraph& teg, const Network& network,
                                  const PatOptions& options) {
  const int m = static_cast<int>(teg.edge_count());
  WorstCaseDelays out{std::vector<Millis>(m, 0), std::vector<Millis>(m, 0)};
  if (options.zero_delay) return out;

  // Per terminal: (slice, pointing held after that edge), in slice order.
  std::vector<std::vector<std::pair<int, Pointing>>> history(network.terminal_count());
  for (int i = 0; i < m; ++i) {
    const auto& e = teg.edge(i);
    history[e.tx_terminal].push_back({e.k, e.at_end.tx});
    history[e.rx_terminal].push_back({e.k, e.at_end.rx});
  }
  auto worst_pointing = [&](int terminal, int k, const Pointing& target) {
    const auto& params = network.terminal(terminal).retarget;
    TerminalState parked;
    double worst = pointing_delay(parked, target, params, options.park);
    for (const auto& [kk, p] : history[terminal]) {
      if (kk >= k) break;
      TerminalState s;
      s.pointing = p;
      worst = std::max(worst, pointing_delay(s, target, params, options.park));
    }
    return worst;
  };
  for (int i = 0; i < m; ++i) {
    const auto& e = teg.edge(i);
    const double tp = worst_pointing(e.tx_terminal, e.k, e.at_start.tx);
    const double rp = worst_pointing(e.rx_terminal, e.k, e.at_start.rx);
    const double pointing = options.sum_endpoints ? tp + rp : std::max(tp, rp);
    out.start_ms[i] = to_millis_ceil(pointing + acquisition_delay(network.terminal(e.rx_terminal).retarget));
  }
  for (int i = 0; i < m; ++i) {
    const int p = teg.edge(i).predecessor;
    if (p < 0) continue;
    const Millis d = teg.edge(p).duration_ms();
    out.carry_in_ms[i] = std::max<Millis>({0, out.start_ms[p] - d, out.carry_in_ms[p] - d});
  }
  return out;
}

}  // namespace cpd
