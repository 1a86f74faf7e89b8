#include "cpd/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "cpd/error.hpp"
#include "cpd/geometry.hpp"

namespace cpd {

namespace {

std::string join_messages(const std::vector<Violation>& violations) {
  std::ostringstream out;
  out << violations.size() << " scenario violation(s)";
  for (const auto& v : violations) out << "\n  " << v.subject << ": " << v.message;
  return out.str();
}

bool params_valid(const RetargetParams& p) {
  return p.slew_az > 0 && p.slew_el > 0 && p.fsm_tip > 0 && p.fsm_tilt > 0 && p.dwell > 0 &&
         p.beam_width > 0 && p.fou >= p.beam_width;
}

bool pointing_valid(const Pointing& p) {
  return std::isfinite(p.az) && std::isfinite(p.el) && p.az >= 0.0 && p.az < 360.0 &&
         p.el >= -90.0 && p.el <= 90.0;
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error(join_messages(violations)), violations_(std::move(violations)) {}

ParseError::ParseError(std::string where, const std::string& what)
    : Error(where + ": " + what), where_(std::move(where)) {}

std::string_view to_string(NodeRole role) {
  switch (role) {
    case NodeRole::Source: return "source";
    case NodeRole::Relay: return "relay";
    case NodeRole::Sink: return "sink";
  }
  return "?";
}

std::optional<NodeRole> parse_role(std::string_view text) {
  if (text == "source") return NodeRole::Source;
  if (text == "relay") return NodeRole::Relay;
  if (text == "sink") return NodeRole::Sink;
  return std::nullopt;
}

RetargetParams ipn_preset() { return {1.0, 1.0, 5.0, 5.0, 0.5, 0.2, 1.0}; }
RetargetParams leo_preset() { return {2.0, 0.5, 8.5, 8.5, 0.5, 0.2, 0.75}; }

std::optional<RetargetParams> builtin_preset(std::string_view name) {
  if (name == "ipn") return ipn_preset();
  if (name == "leo") return leo_preset();
  return std::nullopt;
}

std::string_view planet_of(std::string_view body) {
  return body.substr(0, body.find('-'));
}

EndpointGeometry ContactWindow::geometry_at(Seconds t) const {
  // Knots: start, track samples, end (if annotated).
  if (track.empty() && !geometry_end) return geometry;
  struct Knot {
    Seconds t;
    const EndpointGeometry* g;
  };
  std::vector<Knot> knots;
  knots.reserve(track.size() + 2);
  knots.push_back({start, &geometry});
  for (const auto& s : track) knots.push_back({s.t, &s.geometry});
  if (geometry_end) knots.push_back({end, &*geometry_end});
  if (t <= knots.front().t) return *knots.front().g;
  if (t >= knots.back().t) return *knots.back().g;
  auto hi = std::upper_bound(knots.begin(), knots.end(), t,
                             [](Seconds value, const Knot& k) { return value < k.t; });
  auto lo = hi - 1;
  const double span = static_cast<double>(hi->t - lo->t);
  const double f = span > 0 ? static_cast<double>(t - lo->t) / span : 0.0;
  return {interpolate(lo->g->tx, hi->g->tx, f), interpolate(lo->g->rx, hi->g->rx, f)};
}

std::vector<Violation> validate_scenario(const Scenario& scenario) {
  std::vector<Violation> out;
  std::map<std::string, const Node*> nodes;
  for (const auto& node : scenario.nodes) {
    if (node.id.empty()) out.push_back({"<node>", "empty node id"});
    if (!nodes.emplace(node.id, &node).second) out.push_back({node.id, "duplicate node id"});
    if (node.terminals.empty()) out.push_back({node.id, "node has no terminals"});
    std::set<std::string> seen;
    for (const auto& term : node.terminals) {
      const std::string subject = node.id + "/" + term.id;
      if (!seen.insert(term.id).second) out.push_back({subject, "duplicate terminal id"});
      if (term.bit_rate <= 0) out.push_back({subject, "bit_rate must be positive"});
      if (!params_valid(term.retarget))
        out.push_back({subject, "retarget rates must be positive and fou >= beam_width"});
    }
  }
  for (const auto& [name, params] : scenario.presets) {
    if (!params_valid(params)) out.push_back({"preset " + name, "invalid retarget parameters"});
  }

  auto has_terminal = [&](const std::string& node_id, const std::string& term_id) {
    auto it = nodes.find(node_id);
    if (it == nodes.end()) return false;
    return std::any_of(it->second->terminals.begin(), it->second->terminals.end(),
                       [&](const Terminal& t) { return t.id == term_id; });
  };

  std::set<std::string> window_ids;
  for (const auto& w : scenario.windows) {
    if (!window_ids.insert(w.id).second) out.push_back({w.id, "duplicate window id"});
    if (w.start < 0) out.push_back({w.id, "negative start time"});
    if (w.end <= w.start) out.push_back({w.id, "end must be after start"});
    if (!nodes.count(w.tx_node)) {
      out.push_back({w.id, "unknown tx node '" + w.tx_node + "'"});
    } else if (!has_terminal(w.tx_node, w.tx_terminal)) {
      out.push_back({w.id, "unknown tx terminal '" + w.tx_node + "/" + w.tx_terminal + "'"});
    }
    if (!nodes.count(w.rx_node)) {
      out.push_back({w.id, "unknown rx node '" + w.rx_node + "'"});
    } else if (!has_terminal(w.rx_node, w.rx_terminal)) {
      out.push_back({w.id, "unknown rx terminal '" + w.rx_node + "/" + w.rx_terminal + "'"});
    }
    if (w.tx_node == w.rx_node) out.push_back({w.id, "window connects a node to itself"});
    if (w.owlt < 0) out.push_back({w.id, "negative one-way light time"});
    bool geometry_ok = pointing_valid(w.geometry.tx) && pointing_valid(w.geometry.rx);
    if (w.geometry_end)
      geometry_ok = geometry_ok && pointing_valid(w.geometry_end->tx) && pointing_valid(w.geometry_end->rx);
    Seconds last = w.start;
    for (const auto& s : w.track) {
      geometry_ok = geometry_ok && pointing_valid(s.geometry.tx) && pointing_valid(s.geometry.rx);
      if (s.t <= last || s.t >= w.end) {
        out.push_back({w.id, "track samples must be strictly inside the window and increasing"});
        break;
      }
      last = s.t;
    }
    if (!geometry_ok) out.push_back({w.id, "pointing annotation out of range"});
  }
  return out;
}

Network::Network(Scenario scenario) : scenario_(std::move(scenario)) {
  auto violations = validate_scenario(scenario_);
  if (!violations.empty()) throw ValidationError(std::move(violations));
  std::set<std::string> destinations;
  for (int n = 0; n < static_cast<int>(scenario_.nodes.size()); ++n) {
    const auto& node = scenario_.nodes[n];
    node_by_id_.emplace(node.id, n);
    if (node.role == NodeRole::Sink) destinations.emplace(planet_of(node.body));
    for (int t = 0; t < static_cast<int>(node.terminals.size()); ++t) {
      const int global = static_cast<int>(terminal_node_.size());
      terminal_by_key_.emplace(node.id + '\x1f' + node.terminals[t].id, global);
      terminal_node_.push_back(n);
      terminal_local_.push_back(t);
      terminal_label_.push_back(node.id + "/" + node.terminals[t].id);
    }
  }
  destination_planets_.assign(destinations.begin(), destinations.end());
}

int Network::node_index(std::string_view id) const {
  auto it = node_by_id_.find(std::string(id));
  return it == node_by_id_.end() ? -1 : it->second;
}

int Network::terminal_index(std::string_view node_id, std::string_view terminal_id) const {
  std::string key(node_id);
  key += '\x1f';
  key += terminal_id;
  auto it = terminal_by_key_.find(key);
  return it == terminal_by_key_.end() ? -1 : it->second;
}

const Terminal& Network::terminal(int terminal) const {
  return scenario_.nodes[terminal_node_[terminal]].terminals[terminal_local_[terminal]];
}

}  // namespace cpd
