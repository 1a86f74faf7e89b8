#include "cpd/metrics.hpp"

#include <algorithm>
#include <set>

namespace cpd {

std::optional<double> duty_cycle(const ContactPlan& plan) {
  Millis up = 0;
  Millis total = 0;
  for (const auto& e : plan.entries) {
    up += e.t_eff_ms;
    total += e.slice_duration() * 1000;
  }
  if (total == 0) return std::nullopt;
  return 100.0 * static_cast<double>(up) / static_cast<double>(total);
}

std::optional<double> jain_fairness(const std::vector<double>& shares) {
  double sum = 0.0, squares = 0.0;
  for (double x : shares) {
    sum += x;
    squares += x * x;
  }
  if (shares.empty() || squares <= 0.0) return std::nullopt;
  return sum * sum / (static_cast<double>(shares.size()) * squares);
}

std::optional<double> inter_contact_delay(const ContactPlan& plan, std::string_view source, Seconds horizon) {
  std::vector<std::pair<Seconds, Seconds>> contacts;
  for (const auto& e : plan.entries) {
    if (e.tx_node == source) contacts.emplace_back(e.slice_start, e.slice_end);
  }
  if (contacts.empty()) return std::nullopt;
  std::sort(contacts.begin(), contacts.end());
  if (contacts.size() == 1) return static_cast<double>(std::max<Seconds>(0, horizon - contacts[0].second));
  double gaps = 0.0;
  Seconds last_end = contacts[0].second;
  for (std::size_t i = 1; i < contacts.size(); ++i) {
    gaps += static_cast<double>(std::max<Seconds>(0, contacts[i].first - last_end));
    last_end = std::max(last_end, contacts[i].second);
  }
  return gaps / static_cast<double>(contacts.size() - 1);
}

double uptime(const ContactPlan& plan) {
  Millis up = 0;
  for (const auto& e : plan.entries) up += e.t_eff_ms;
  return static_cast<double>(up) / 1000.0;
}

std::optional<double> mean_run_length(const ContactPlan& plan) {
  std::map<std::string, std::vector<int>> slices;
  for (const auto& e : plan.entries) slices[e.window].push_back(e.k);
  std::size_t runs = 0, total = 0;
  for (auto& [window, ks] : slices) {
    std::sort(ks.begin(), ks.end());
    for (std::size_t i = 0; i < ks.size(); ++i) {
      if (i == 0 || ks[i] != ks[i - 1] + 1) ++runs;
      ++total;
    }
  }
  if (runs == 0) return std::nullopt;
  return static_cast<double>(total) / static_cast<double>(runs);
}

std::vector<std::string> opportunity_sources(const Network& network) {
  std::set<std::string> out;
  for (const auto& w : network.scenario().windows) {
    const int tx = network.node_index(w.tx_node);
    const int rx = network.node_index(w.rx_node);
    if (network.role(tx) == NodeRole::Source && edge_category(network, tx, rx) != EdgeCategory::Invalid)
      out.insert(w.tx_node);
  }
  return {out.begin(), out.end()};
}

MetricsReport compute_metrics(const ContactPlan& plan, const Network& network) {
  MetricsReport r;
  r.algorithm = plan.algorithm;
  const auto cap = network_capacity(plan, network);
  r.network_capacity = cap.sink_capacity;
  r.objective = cap.relay_sink_objective;
  r.causal_capacity = causal_capacity(plan, network);
  r.per_node = node_capacities(plan, network);
  r.duty_cycle = duty_cycle(plan);
  r.uptime = uptime(plan);
  r.mean_run_length = mean_run_length(plan);
  r.entries = plan.entries.size();

  const auto sources = opportunity_sources(network);
  std::map<std::string, Millis> ect_ms;
  for (const auto& s : sources) {
    r.transmitted[s] = 0;
    ect_ms[s] = 0;
  }
  for (const auto& e : plan.entries) {
    auto it = r.transmitted.find(e.tx_node);
    if (it == r.transmitted.end()) continue;
    const int tx = network.node_index(e.tx_node);
    const int rx = network.node_index(e.rx_node);
    if (edge_category(network, tx, rx) == EdgeCategory::Invalid) continue;
    it->second += e.flow;
    ect_ms[e.tx_node] += e.t_eff_ms;
  }
  std::vector<double> shares;
  for (const auto& [s, bits] : r.transmitted) {
    shares.push_back(static_cast<double>(bits));
    r.ect[s] = static_cast<double>(ect_ms[s]) / 1000.0;
  }
  r.jain_index = jain_fairness(shares);

  const Seconds horizon = network.scenario().meta.horizon;
  double sum = 0.0;
  int defined = 0;
  for (const auto& s : sources) {
    const auto d = inter_contact_delay(plan, s, horizon);
    r.inter_contact[s] = d;
    if (!d) continue;
    sum += *d;
    ++defined;
    r.max_inter_contact = std::max(r.max_inter_contact.value_or(0.0), *d);
  }
  if (defined > 0) r.mean_inter_contact = sum / defined;
  return r;
}

}  // namespace cpd
