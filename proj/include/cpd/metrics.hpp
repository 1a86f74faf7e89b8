#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cpd/capacity.hpp"
#include "cpd/model.hpp"

namespace cpd {

/// 100 x sum(t_eff) / sum(T_k) over the plan's entries; empty for an empty plan.
std::optional<double> duty_cycle(const ContactPlan& plan);

/// (sum x)^2 / (n sum x^2). Empty when there are no shares or all are zero.
std::optional<double> jain_fairness(const std::vector<double>& shares);

/// Mean gap between consecutive scheduled transmissions of `source`. A single
/// contact reports horizon - contact end; no contact at all reports nothing.
std::optional<double> inter_contact_delay(const ContactPlan& plan, std::string_view source, Seconds horizon);

/// Network-wide transmit time, seconds.
double uptime(const ContactPlan& plan);

/// Mean number of consecutive slices a selected window stays up.
std::optional<double> mean_run_length(const ContactPlan& plan);

/// Sources that transmit in at least one window of the scenario.
std::vector<std::string> opportunity_sources(const Network& network);

struct MetricsReport {
  std::string algorithm;
  Bits network_capacity = 0;  // delivered to sinks
  Bits objective = 0;         // relays + sinks
  Bits causal_capacity = 0;
  std::vector<NodeCapacity> per_node;
  std::optional<double> duty_cycle;
  std::optional<double> jain_index;
  std::map<std::string, Bits> transmitted;  // per opportunity source
  std::map<std::string, double> ect;        // per opportunity source, seconds
  std::map<std::string, std::optional<double>> inter_contact;
  std::optional<double> mean_inter_contact;
  std::optional<double> max_inter_contact;
  double uptime = 0.0;
  std::optional<double> mean_run_length;
  std::size_t entries = 0;
  std::optional<double> runtime_seconds;
};

MetricsReport compute_metrics(const ContactPlan& plan, const Network& network);

}  // namespace cpd
