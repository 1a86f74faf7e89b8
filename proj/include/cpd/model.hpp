#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cpd {

/// Scenario-epoch-relative time in whole seconds.
using Seconds = std::int64_t;
/// Durations that come out of the pointing model are kept in milliseconds so
/// that every flow (ms x bit/s / 1000) is an exact integer.
using Millis = std::int64_t;
using Bits = std::int64_t;
using BitRate = std::int64_t;

/// Raw JSON text for fields the parser did not recognise (lax mode only).
using Extras = std::map<std::string, std::string>;

enum class NodeRole { Source, Relay, Sink };

std::string_view to_string(NodeRole role);
std::optional<NodeRole> parse_role(std::string_view text);

/// Gimbal, fine-steering and acquisition parameters of one optical head.
struct RetargetParams {
  double slew_az = 1.0;   // deg/s
  double slew_el = 1.0;   // deg/s
  double fsm_tip = 5.0;   // mrad/s
  double fsm_tilt = 5.0;  // mrad/s
  double dwell = 0.5;     // s
  double beam_width = 0.2;  // deg
  double fou = 1.0;         // deg, field of uncertainty

  bool operator==(const RetargetParams&) const = default;
};

/// Deep-space column of the simulation parameter table.
RetargetParams ipn_preset();
/// Near-Earth column of the simulation parameter table.
RetargetParams leo_preset();
std::optional<RetargetParams> builtin_preset(std::string_view name);

struct Terminal {
  std::string id;
  BitRate bit_rate = 0;
  RetargetParams retarget;
  // Name of the preset the parameters came from; empty when given inline.
  std::string preset;
  Extras extras;

  bool operator==(const Terminal&) const = default;
};

struct Node {
  std::string id;
  NodeRole role = NodeRole::Source;
  std::string body;  // e.g. "mars-orbit", "earth-orbit", "earth-surface"
  std::vector<Terminal> terminals;
  Extras extras;

  bool operator==(const Node&) const = default;
};

/// Planet part of a body tag ("mars-orbit" -> "mars").
std::string_view planet_of(std::string_view body);

struct Pointing {
  double az = 0.0;  // deg, [0, 360)
  double el = 0.0;  // deg, [-90, 90]

  bool operator==(const Pointing&) const = default;
};

struct EndpointGeometry {
  Pointing tx;
  Pointing rx;

  bool operator==(const EndpointGeometry&) const = default;
};

struct TrackSample {
  Seconds t = 0;
  EndpointGeometry geometry;

  bool operator==(const TrackSample&) const = default;
};

struct ContactWindow {
  std::string id;
  std::string tx_node;
  std::string tx_terminal;
  std::string rx_node;
  std::string rx_terminal;
  Seconds start = 0;
  Seconds end = 0;
  // Pointing of each endpoint toward its partner at window start.
  EndpointGeometry geometry;
  // Optional pointing at window end and intermediate samples; geometry at an
  // arbitrary instant is interpolated piecewise-linearly (shortest arc).
  std::optional<EndpointGeometry> geometry_end;
  std::vector<TrackSample> track;
  Seconds owlt = 0;  // one-way light time, used for DTN range export
  Extras extras;

  Seconds duration() const { return end - start; }
  EndpointGeometry geometry_at(Seconds t) const;

  bool operator==(const ContactWindow&) const = default;
};

struct ScenarioMeta {
  std::string name;
  Seconds horizon = 86400;
  Seconds slice_duration = 600;
  std::uint64_t seed = 0;
  std::string notes;
  Extras extras;

  bool operator==(const ScenarioMeta&) const = default;
};

struct Scenario {
  ScenarioMeta meta;
  std::map<std::string, RetargetParams> presets;
  std::vector<Node> nodes;
  std::vector<ContactWindow> windows;
  Extras extras;

  bool operator==(const Scenario&) const = default;
};

struct Violation {
  std::string subject;  // node, terminal or window id
  std::string message;

  bool operator==(const Violation&) const = default;
};

/// Report-style structural check; an empty result means well-formed.
std::vector<Violation> validate_scenario(const Scenario& scenario);

/// One scheduled slice of a contact window.
struct PlanEntry {
  std::string window;
  int window_index = -1;
  int k = 0;
  std::string tx_node;
  std::string tx_terminal;
  std::string rx_node;
  std::string rx_terminal;
  Seconds slice_start = 0;
  Seconds slice_end = 0;
  Millis t_retarget_ms = 0;
  Millis t_eff_ms = 0;
  BitRate bit_rate_used = 0;
  Bits flow = 0;
  bool continuation = false;

  Seconds slice_duration() const { return slice_end - slice_start; }
  double t_retarget() const { return static_cast<double>(t_retarget_ms) / 1000.0; }
  double t_eff() const { return static_cast<double>(t_eff_ms) / 1000.0; }

  bool operator==(const PlanEntry&) const = default;
};

/// Flow carried by `t_eff_ms` at `rate`; floors to whole bits.
constexpr Bits flow_bits(Millis t_eff_ms, BitRate rate) {
  return static_cast<Bits>((static_cast<__int128>(t_eff_ms) * rate) / 1000);
}

struct ContactPlan {
  std::string algorithm;
  std::vector<PlanEntry> entries;

  bool operator==(const ContactPlan&) const = default;
};

/// Index view over a validated scenario. Terminals get a dense global index.
class Network {
 public:
  /// Throws cpd::ValidationError when the scenario has violations.
  explicit Network(Scenario scenario);

  const Scenario& scenario() const { return scenario_; }
  std::size_t node_count() const { return scenario_.nodes.size(); }
  std::size_t terminal_count() const { return terminal_node_.size(); }

  const Node& node(int index) const { return scenario_.nodes[index]; }
  NodeRole role(int node_index) const { return scenario_.nodes[node_index].role; }
  int node_index(std::string_view id) const;
  int terminal_index(std::string_view node_id, std::string_view terminal_id) const;
  int terminal_node(int terminal) const { return terminal_node_[terminal]; }
  const Terminal& terminal(int terminal) const;
  const std::string& terminal_label(int terminal) const { return terminal_label_[terminal]; }
  // Planets hosting at least one sink.
  const std::vector<std::string>& destination_planets() const { return destination_planets_; }

 private:
  Scenario scenario_;
  std::unordered_map<std::string, int> node_by_id_;
  std::unordered_map<std::string, int> terminal_by_key_;
  std::vector<int> terminal_node_;
  std::vector<int> terminal_local_;
  std::vector<std::string> terminal_label_;
  std::vector<std::string> destination_planets_;
};

}  // namespace cpd
