#pragma once

#include <optional>
#include <vector>

#include "cpd/model.hpp"
#include "cpd/teg.hpp"

namespace cpd {

/// Pointing memory of one terminal between links.
struct TerminalState {
  int terminal = -1;
  std::optional<Pointing> pointing;  // empty: parked
  std::optional<int> partner;        // global terminal index of the last partner
};

struct PatOptions {
  // Orientation a parked terminal slews from.
  Pointing park{0.0, 0.0};
  // Add the two endpoint pointing times instead of taking the slower one.
  bool sum_endpoints = false;
  // Scheduling-time assumption of zero retargeting (ZRK).
  bool zero_delay = false;

  bool operator==(const PatOptions&) const = default;
};

/// Gimbal time to point at `target`: the slower of the two axes, azimuth along
/// the shortest arc.
double pointing_delay(const TerminalState& state, const Pointing& target, const RetargetParams& params,
                      const Pointing& park = {});

/// Square spiral scan over the field of uncertainty, one dwell per beam cell.
double acquisition_delay(const RetargetParams& params);

/// T_pointing + T_acq for a new link, 0 for a continuing one. Acquisition uses
/// the receiving terminal's parameters.
double retarget_delay(const TerminalState& tx, const TerminalState& rx, const EndpointGeometry& geometry,
                      const RetargetParams& tx_params, const RetargetParams& rx_params, bool continuation,
                      const PatOptions& options = {});

/// Seconds to whole milliseconds, rounding up (float noise below 1 ns ignored).
Millis to_millis_ceil(double seconds);

/// Sequential terminal states while a schedule is built slice by slice.
/// A retargeting delay longer than its slice carries over into the
/// continuation of the same window.
class PatTracker {
 public:
  PatTracker(const TimeExpandedGraph& teg, const Network& network, PatOptions options = {});

  /// True when edge i continues the link its terminals held in slice k-1.
  bool is_continuation(int edge) const;
  /// Delay (ms) edge i would incur if selected now.
  Millis retarget_ms(int edge) const;
  Millis effective_ms(int edge) const;
  /// Marks edge i as selected in its slice; edges must be committed in
  /// non-decreasing slice order.
  void commit(int edge);

  const TerminalState& state(int terminal) const { return states_[terminal]; }
  const PatOptions& options() const { return options_; }

 private:
  struct Memory {
    int last_edge = -1;
    Millis carry_ms = 0;
  };

  const TimeExpandedGraph& teg_;
  const Network& network_;
  PatOptions options_;
  std::vector<TerminalState> states_;
  std::vector<Memory> memory_;
};

/// Turns a set of selected edge indices into plan entries with true,
/// sequential retargeting delays. Entries come out sorted by (k, tx, rx).
ContactPlan evaluate_selection(const TimeExpandedGraph& teg, const Network& network,
                               const std::vector<int>& selected, const PatOptions& options = {});

/// Pessimistic delays for a linear model where the previous partner is unknown.
struct WorstCaseDelays {
  // Non-continuation delay: any earlier incident edge (or park) may precede.
  std::vector<Millis> start_ms;
  // Largest retargeting overflow that can carry into a continuation of edge i.
  std::vector<Millis> carry_in_ms;
};

WorstCaseDelays worst_case_delays(const TimeExpandedGraph& teg, const Network& network,
                                  const PatOptions& options = {});

}  // namespace cpd
