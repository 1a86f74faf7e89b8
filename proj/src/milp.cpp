#include "cpd/milp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "cpd/lp.hpp"

namespace cpd {

namespace {

constexpr double kMbit = 1e6;

bool carries_flow(EdgeCategory c) { return c != EdgeCategory::Invalid; }

}  // namespace

std::size_t MilpModel::binary_count() const {
  std::size_t n = category.size();
  for (std::size_t i = 0; i < category.size(); ++i) {
    if (teg->edge(static_cast<int>(i)).predecessor >= 0) ++n;
  }
  return n;
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::FeasibleTimeout: return "feasible_timeout";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::NoIncumbent: return "no_incumbent";
  }
  return "?";
}

MilpModel build_model(const TimeExpandedGraph& teg, const Network& network, double epsilon,
                      const PatOptions& pat) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
  MilpModel m;
  m.teg = &teg;
  m.network = &network;
  m.epsilon = epsilon;
  m.pat = pat;
  m.pat.zero_delay = false;

  const int edges = static_cast<int>(teg.edge_count());
  const auto worst = worst_case_delays(teg, network, m.pat);
  m.category.resize(edges);
  m.start_eff_ms.resize(edges);
  m.cont_eff_ms.assign(edges, 0);
  m.start_bits.resize(edges);
  m.cont_bits.assign(edges, 0);
  m.successor.assign(edges, -1);
  std::vector<char> can_send(network.node_count(), 0);
  std::map<std::pair<int, int>, std::vector<int>> groups;
  for (int i = 0; i < edges; ++i) {
    const auto& e = teg.edge(i);
    m.category[i] = edge_category(network, e);
    m.start_eff_ms[i] = std::max<Millis>(0, e.duration_ms() - worst.start_ms[i]);
    m.start_bits[i] = flow_bits(m.start_eff_ms[i], e.rate);
    if (e.predecessor >= 0) {
      m.cont_eff_ms[i] = std::max<Millis>(0, e.duration_ms() - worst.carry_in_ms[i]);
      m.cont_bits[i] = flow_bits(m.cont_eff_ms[i], e.rate);
      m.successor[e.predecessor] = i;
    }
    const bool from_source =
        m.category[i] == EdgeCategory::OneHopDTE || m.category[i] == EdgeCategory::SourceToRelay;
    if (from_source && (m.start_eff_ms[i] > 0 || m.cont_eff_ms[i] > 0)) can_send[e.tx_node] = 1;
    groups[{e.tx_terminal, e.k}].push_back(i);
    groups[{e.rx_terminal, e.k}].push_back(i);
  }
  for (int v = 0; v < static_cast<int>(network.node_count()); ++v) {
    if (network.role(v) == NodeRole::Source && can_send[v]) m.sources.push_back(v);
    if (network.role(v) == NodeRole::Relay) m.relays.push_back(v);
  }
  for (auto& [key, list] : groups) {
    if (list.size() >= 2) m.interface_groups.push_back(std::move(list));
  }
  return m;
}

namespace {

// Flow-carried view of the model used by both the evaluator and the oracle.
struct Layout {
  std::vector<int> source_slot;  // node -> index into model.sources
  std::vector<int> relay_slot;   // node -> index into model.relays
  std::vector<int> src;          // per edge: source slot or -1
  std::vector<int> relay_in;     // per edge: relay slot fed by it or -1
  std::vector<int> relay_out;    // per edge: relay slot drained by it or -1
};

Layout make_layout(const MilpModel& m) {
  Layout l;
  const auto& net = *m.network;
  l.source_slot.assign(net.node_count(), -1);
  l.relay_slot.assign(net.node_count(), -1);
  for (std::size_t i = 0; i < m.sources.size(); ++i) l.source_slot[m.sources[i]] = static_cast<int>(i);
  for (std::size_t i = 0; i < m.relays.size(); ++i) l.relay_slot[m.relays[i]] = static_cast<int>(i);
  const int edges = static_cast<int>(m.edge_count());
  l.src.assign(edges, -1);
  l.relay_in.assign(edges, -1);
  l.relay_out.assign(edges, -1);
  for (int i = 0; i < edges; ++i) {
    const auto& e = m.teg->edge(i);
    switch (m.category[i]) {
      case EdgeCategory::OneHopDTE: l.src[i] = l.source_slot[e.tx_node]; break;
      case EdgeCategory::SourceToRelay:
        l.src[i] = l.source_slot[e.tx_node];
        l.relay_in[i] = l.relay_slot[e.rx_node];
        break;
      case EdgeCategory::RelayToSink: l.relay_out[i] = l.relay_slot[e.tx_node]; break;
      case EdgeCategory::Invalid: break;
    }
  }
  return l;
}

// True when every source keeps n * ECT_u >= eps * sum(ECT); returns the
// summed shortfall in seconds.
double fairness_deficit(const MilpModel& m, const std::vector<Millis>& ect, bool* fair) {
  *fair = true;
  if (!m.fairness_active()) return 0.0;
  long double total = 0;
  for (Millis v : ect) total += static_cast<long double>(v);
  const long double n = static_cast<long double>(ect.size());
  const long double rhs = static_cast<long double>(m.epsilon) * total;
  const long double tol = 1e-9L * std::max<long double>(1.0L, rhs);
  long double deficit = 0;
  for (Millis v : ect) {
    const long double lhs = n * static_cast<long double>(v);
    if (lhs < rhs - tol) {
      *fair = false;
      deficit += rhs - lhs;
    }
  }
  return static_cast<double>(deficit / 1000.0L);
}

}  // namespace

ModelEvaluation evaluate(const MilpModel& m, const std::vector<char>& selected) {
  if (selected.size() != m.edge_count()) throw std::invalid_argument("selection size does not match the model");
  const Layout l = make_layout(m);
  ModelEvaluation ev;
  for (const auto& g : m.interface_groups) {
    int count = 0;
    for (int i : g) count += selected[i] ? 1 : 0;
    if (count > 1) ev.interface_ok = false;
  }
  ev.ect_ms.assign(m.sources.size(), 0);
  std::vector<Bits> in(m.relays.size(), 0), out(m.relays.size(), 0);
  Bits dte = 0;
  for (std::size_t i = 0; i < m.edge_count(); ++i) {
    if (!selected[i] || !carries_flow(m.category[i])) continue;
    const int p = m.teg->edge(static_cast<int>(i)).predecessor;
    const bool cont = p >= 0 && selected[p];
    const Bits bits = cont ? m.cont_bits[i] : m.start_bits[i];
    const Millis eff = cont ? m.cont_eff_ms[i] : m.start_eff_ms[i];
    if (l.src[i] >= 0) ev.ect_ms[l.src[i]] += eff;
    if (m.category[i] == EdgeCategory::OneHopDTE) dte += bits;
    if (l.relay_in[i] >= 0) in[l.relay_in[i]] += bits;
    if (l.relay_out[i] >= 0) out[l.relay_out[i]] += bits;
  }
  Bits relayed = 0;
  for (std::size_t r = 0; r < m.relays.size(); ++r) relayed += std::min(in[r], out[r]);
  ev.sink_capacity = dte + relayed;
  ev.objective = dte + 2 * relayed;
  ev.deficit_seconds = fairness_deficit(m, ev.ect_ms, &ev.fair);
  return ev;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Budget {
  double limit = 0.0;
  double used = 0.0;
  Clock::time_point deadline;
  bool exhausted() const { return used >= limit || Clock::now() >= deadline; }
};

// LP over the free part of a selection; every other edge keeps its value.
struct SubProblem {
  lp::Problem lp;
  std::vector<int> binaries;
  std::vector<int> a_var, y_var;  // per edge, -1 when absent
  std::vector<char> is_var;       // edge has free L
  double offset = 0.0;            // Mbit contributed by fixed parts
};

class Search {
 public:
  Search(const MilpModel& m, const MilpOptions& o, Budget& budget)
      : m_(m), opt_(o), budget_(budget), layout_(make_layout(m)) {
    double max_rate = 0.0;
    for (const auto& e : m.teg->edges()) max_rate = std::max(max_rate, static_cast<double>(e.rate));
    penalty_ = 20.0 * static_cast<double>(std::max<std::size_t>(1, m.sources.size())) * max_rate / kMbit;
  }

  std::int64_t lp_solves() const { return lp_solves_; }
  std::int64_t nodes() const { return nodes_; }

  double score(const ModelEvaluation& ev, bool elastic) const {
    double s = static_cast<double>(ev.objective) / kMbit;
    if (elastic) s -= penalty_ * ev.deficit_seconds;
    return s;
  }

  SubProblem build(const std::vector<char>& sel, const std::vector<char>& free, bool elastic) const {
    const int edges = static_cast<int>(m_.edge_count());
    const auto& teg = *m_.teg;
    SubProblem sp;
    sp.a_var.assign(edges, -1);
    sp.y_var.assign(edges, -1);
    sp.is_var.assign(edges, 0);
    for (int i = 0; i < edges; ++i) sp.is_var[i] = free[i] && carries_flow(m_.category[i]);
    auto pred = [&](int i) { return teg.edge(i).predecessor; };
    // Mode 2: selected and fixed, but the predecessor is free, so only the
    // start/continuation split moves.
    std::vector<char> split(edges, 0);
    for (int i = 0; i < edges; ++i) {
      if (!sp.is_var[i] && sel[i] && carries_flow(m_.category[i]) && pred(i) >= 0 && sp.is_var[pred(i)])
        split[i] = 1;
    }

    Bits fixed_dte = 0;
    std::vector<Bits> fixed_in(m_.relays.size(), 0), fixed_out(m_.relays.size(), 0);
    std::vector<double> fixed_ect(m_.sources.size(), 0.0);
    for (int i = 0; i < edges; ++i) {
      if (sp.is_var[i] || split[i] || !sel[i] || !carries_flow(m_.category[i])) continue;
      const bool cont = pred(i) >= 0 && sel[pred(i)];
      const Bits bits = cont ? m_.cont_bits[i] : m_.start_bits[i];
      const Millis eff = cont ? m_.cont_eff_ms[i] : m_.start_eff_ms[i];
      if (m_.category[i] == EdgeCategory::OneHopDTE) fixed_dte += bits;
      if (layout_.relay_in[i] >= 0) fixed_in[layout_.relay_in[i]] += bits;
      if (layout_.relay_out[i] >= 0) fixed_out[layout_.relay_out[i]] += bits;
      if (layout_.src[i] >= 0) fixed_ect[layout_.src[i]] += static_cast<double>(eff) / 1000.0;
    }

    auto& p = sp.lp;
    p.maximize = true;
    for (int i = 0; i < edges; ++i) {
      if (!sp.is_var[i] && !split[i]) continue;
      const int pr = pred(i);
      const bool pred_var = pr >= 0 && sp.is_var[pr];
      const bool pred_on = pr >= 0 && !pred_var && sel[pr];
      const double obj_a =
          m_.category[i] == EdgeCategory::OneHopDTE ? static_cast<double>(m_.start_bits[i]) / kMbit : 0.0;
      const double obj_y =
          m_.category[i] == EdgeCategory::OneHopDTE ? static_cast<double>(m_.cont_bits[i]) / kMbit : 0.0;
      if (!pred_on) {
        sp.a_var[i] = p.add_variable(0.0, 1.0, obj_a);
        sp.binaries.push_back(sp.a_var[i]);
      }
      if (pred_var || pred_on) {
        sp.y_var[i] = p.add_variable(0.0, 1.0, obj_y);
        sp.binaries.push_back(sp.y_var[i]);
      }
    }
    auto l_terms = [&](int i, double c, std::vector<std::pair<int, double>>& terms) {
      if (sp.a_var[i] >= 0) terms.push_back({sp.a_var[i], c});
      if (sp.y_var[i] >= 0) terms.push_back({sp.y_var[i], c});
    };
    for (int i = 0; i < edges; ++i) {
      if (!sp.is_var[i] && !split[i]) continue;
      const int pr = pred(i);
      if (split[i]) p.add_row({{sp.a_var[i], 1.0}, {sp.y_var[i], 1.0}}, lp::Sense::Eq, 1.0);
      if (pr >= 0 && sp.is_var[pr]) {
        // Y_e <= L_pred and a fresh start is impossible while pred is on.
        std::vector<std::pair<int, double>> y_row{{sp.y_var[i], 1.0}};
        l_terms(pr, -1.0, y_row);
        p.add_row(std::move(y_row), lp::Sense::Le, 0.0);
        std::vector<std::pair<int, double>> a_row{{sp.a_var[i], 1.0}};
        l_terms(pr, 1.0, a_row);
        p.add_row(std::move(a_row), lp::Sense::Le, 1.0);
      }
    }
    for (const auto& g : m_.interface_groups) {
      std::vector<std::pair<int, double>> terms;
      int vars = 0;
      int fixed = 0;
      for (int i : g) {
        if (sp.is_var[i]) {
          l_terms(i, 1.0, terms);
          ++vars;
        } else if (sel[i]) {
          ++fixed;
        }
      }
      if (vars >= 2 || (vars >= 1 && fixed >= 1)) p.add_row(std::move(terms), lp::Sense::Le, 1.0 - fixed);
    }
    auto flow_terms = [&](int i, std::vector<std::pair<int, double>>& terms, double sign) {
      if (sp.a_var[i] >= 0) terms.push_back({sp.a_var[i], sign * static_cast<double>(m_.start_bits[i]) / kMbit});
      if (sp.y_var[i] >= 0) terms.push_back({sp.y_var[i], sign * static_cast<double>(m_.cont_bits[i]) / kMbit});
    };
    std::vector<std::vector<std::pair<int, double>>> in_terms(m_.relays.size()), out_terms(m_.relays.size());
    for (int i = 0; i < edges; ++i) {
      if (!sp.is_var[i] && !split[i]) continue;
      if (layout_.relay_in[i] >= 0) flow_terms(i, in_terms[layout_.relay_in[i]], -1.0);
      if (layout_.relay_out[i] >= 0) flow_terms(i, out_terms[layout_.relay_out[i]], -1.0);
    }
    double offset = static_cast<double>(fixed_dte) / kMbit;
    for (std::size_t r = 0; r < m_.relays.size(); ++r) {
      if (in_terms[r].empty() && out_terms[r].empty()) {
        offset += 2.0 * static_cast<double>(std::min(fixed_in[r], fixed_out[r])) / kMbit;
        continue;
      }
      const int c = p.add_variable(0.0, lp::kInf, 2.0);
      in_terms[r].push_back({c, 1.0});
      out_terms[r].push_back({c, 1.0});
      p.add_row(std::move(in_terms[r]), lp::Sense::Le, static_cast<double>(fixed_in[r]) / kMbit);
      p.add_row(std::move(out_terms[r]), lp::Sense::Le, static_cast<double>(fixed_out[r]) / kMbit);
    }
    std::vector<int> unscaled;
    if (m_.fairness_active()) {
      const double n = static_cast<double>(m_.sources.size());
      double fixed_total = 0.0;
      for (double v : fixed_ect) fixed_total += v;
      for (std::size_t u = 0; u < m_.sources.size(); ++u) {
        std::vector<std::pair<int, double>> terms;
        for (int i = 0; i < edges; ++i) {
          if ((!sp.is_var[i] && !split[i]) || layout_.src[i] < 0) continue;
          const double share = (layout_.src[i] == static_cast<int>(u) ? n : 0.0) - m_.epsilon;
          if (share == 0.0) continue;
          if (sp.a_var[i] >= 0) terms.push_back({sp.a_var[i], share * static_cast<double>(m_.start_eff_ms[i]) / 1000.0});
          if (sp.y_var[i] >= 0) terms.push_back({sp.y_var[i], share * static_cast<double>(m_.cont_eff_ms[i]) / 1000.0});
        }
        if (terms.empty() && !elastic) continue;
        // Elastic rows stay unscaled so the penalty is per second of shortfall.
        if (elastic) {
          terms.push_back({p.add_variable(0.0, lp::kInf, -penalty_), 1.0});
          unscaled.push_back(static_cast<int>(p.rows.size()));
        }
        const double rhs = -(n * fixed_ect[u] - m_.epsilon * fixed_total);
        p.add_row(std::move(terms), lp::Sense::Ge, rhs);
      }
    }
    for (int r = 0; r < static_cast<int>(p.rows.size()); ++r) {
      if (std::find(unscaled.begin(), unscaled.end(), r) != unscaled.end()) continue;
      auto& row = p.rows[r];
      double big = 0.0;
      for (const auto& [j, v] : row.terms) big = std::max(big, std::fabs(v));
      if (big > 0.0 && big != 1.0) {
        for (auto& t : row.terms) t.second /= big;
        row.rhs /= big;
      }
    }
    sp.offset = offset;
    return sp;
  }

  std::vector<char> extract(const SubProblem& sp, const std::vector<char>& sel, const std::vector<double>& x) const {
    std::vector<char> out(sel);
    for (std::size_t i = 0; i < sel.size(); ++i) {
      if (!sp.is_var[i]) continue;
      double l = 0.0;
      if (sp.a_var[i] >= 0) l += x[sp.a_var[i]];
      if (sp.y_var[i] >= 0) l += x[sp.y_var[i]];
      out[i] = l > 0.5 ? 1 : 0;
    }
    return out;
  }

  struct Outcome {
    bool completed = false;
    bool root_solved = false;
    double root_bound = 0.0;
  };

  // Best-bound branch-and-bound with depth-first dives on one persistent LP.
  // `accept` returns the exact score of an integral selection (or nothing
  // when it is infeasible); every node LP is also rounded and offered.
  Outcome branch_and_bound(const SubProblem& sp, const std::vector<char>& sel, double incumbent, double work_cap,
                           const std::function<std::optional<double>(const std::vector<char>&)>& accept) {
    Outcome out;
    const double stop_at = std::min(budget_.limit, budget_.used + work_cap);
    struct Node {
      double bound;
      std::int64_t id;
      std::vector<std::pair<int, char>> fixes;
    };
    auto worse = [](const Node& a, const Node& b) {
      return a.bound < b.bound || (a.bound == b.bound && a.id > b.id);
    };
    std::priority_queue<Node, std::vector<Node>, decltype(worse)> open(worse);
    std::int64_t next_id = 0;
    auto tol = [&] { return 1e-9 * std::max(1.0, std::fabs(incumbent)) + 1e-9; };
    auto offer = [&](const std::vector<double>& x) {
      if (auto s = accept(extract(sp, sel, x))) incumbent = std::max(incumbent, *s);
    };

    lp::Options lp_options;
    lp_options.work_limit = std::max(1.0, stop_at - budget_.used);
    lp::Workspace ws(sp.lp, lp_options);
    const int n = sp.lp.variable_count();
    std::vector<int> fixed_to(n, -1);
    double charged = 0.0;
    auto charge = [&] {
      const double w = ws.work();
      budget_.used += w - charged + static_cast<double>(sp.lp.rows.size() + n);
      charged = w;
      ++lp_solves_;
      ++nodes_;
    };
    // Moves the LP to exactly the given fixings.
    auto apply = [&](const std::vector<std::pair<int, char>>& fixes) {
      std::vector<int> want(n, -1);
      for (const auto& [j, v] : fixes) want[j] = v;
      for (int j = 0; j < n; ++j) {
        if (want[j] == fixed_to[j]) continue;
        if (want[j] < 0) ws.set_bounds(j, sp.lp.lower[j], sp.lp.upper[j]);
        else ws.set_bounds(j, want[j], want[j]);
        fixed_to[j] = want[j];
      }
    };

    if (budget_.used >= stop_at || budget_.exhausted()) return out;
    lp::Solution sol = ws.solve();
    charge();
    if (sol.status == lp::Status::IterationLimit) return out;
    if (sol.status != lp::Status::Optimal) {
      out.completed = true;
      return out;
    }
    out.root_solved = true;
    out.root_bound = sol.objective + sp.offset;
    std::vector<std::pair<int, char>> fixes;
    double bound = out.root_bound;
    while (true) {
      // Dive from the current node.
      bool alive = sol.status == lp::Status::Optimal;
      if (alive) bound = sol.objective + sp.offset;
      if (alive && bound > incumbent + tol()) {
        offer(sol.x);
        int branch = -1;
        double best = 1.0;
        for (int j : sp.binaries) {
          const double v = sol.x[j];
          const double frac = std::fabs(v - 0.5);
          if (v > 1e-6 && v < 1.0 - 1e-6 && frac < best) {
            best = frac;
            branch = j;
          }
        }
        if (branch >= 0) {
          const char first = sol.x[branch] >= 0.5 ? 1 : 0;
          auto other = fixes;
          other.push_back({branch, static_cast<char>(1 - first)});
          open.push({bound, next_id++, std::move(other)});
          fixes.push_back({branch, first});
          if (budget_.used >= stop_at || budget_.exhausted()) return out;
          apply(fixes);
          sol = ws.resolve();
          charge();
          if (sol.status == lp::Status::IterationLimit) return out;
          continue;
        }
      }
      // Dive ended; take the best open node.
      bool found = false;
      while (!open.empty()) {
        Node node = open.top();
        open.pop();
        if (node.bound <= incumbent + tol()) continue;
        fixes = std::move(node.fixes);
        found = true;
        break;
      }
      if (!found) break;
      if (budget_.used >= stop_at || budget_.exhausted()) return out;
      apply(fixes);
      sol = ws.resolve();
      charge();
      if (sol.status == lp::Status::IterationLimit) return out;
    }
    out.completed = true;
    return out;
  }

 private:
  const MilpModel& m_;
  const MilpOptions& opt_;
  Budget& budget_;
  Layout layout_;
  double penalty_ = 0.0;
  std::int64_t lp_solves_ = 0;
  std::int64_t nodes_ = 0;
};

struct Candidate {
  std::vector<char> sel;
  ModelEvaluation ev;
};

}  // namespace

SolveResult solve(const MilpModel& model, const MilpOptions& options) {
  const auto started = Clock::now();
  SolveResult result;
  const int edges = static_cast<int>(model.edge_count());
  const auto& teg = *model.teg;

  Budget budget;
  budget.limit = std::max(0.0, options.time_limit) * options.work_per_second;
  budget.deadline = started + std::chrono::duration_cast<Clock::duration>(
                                  std::chrono::duration<double>(options.wall_factor * std::max(0.0, options.time_limit) + 5.0));
  Search search(model, options, budget);

  // Incumbents: the empty plan is always feasible.
  Candidate best{std::vector<char>(edges, 0), {}};
  best.ev = evaluate(model, best.sel);
  std::optional<Candidate> unfair;
  for (const auto& start : options.warm_starts) {
    Candidate c{std::vector<char>(edges, 0), {}};
    for (int i : start) {
      if (i < 0 || i >= edges) throw std::invalid_argument("warm start references an unknown edge");
      c.sel[i] = 1;
    }
    c.ev = evaluate(model, c.sel);
    if (!c.ev.interface_ok) continue;
    if (c.ev.fair) {
      if (c.ev.objective > best.ev.objective) best = c;
    } else if (!unfair || c.ev.objective > unfair->ev.objective) {
      unfair = c;
    }
  }

  std::vector<char> all_free(edges, 0);
  std::size_t free_binaries = 0;
  for (int i = 0; i < edges; ++i) {
    all_free[i] = carries_flow(model.category[i]) ? 1 : 0;
    if (all_free[i]) free_binaries += teg.edge(i).predecessor >= 0 ? 2 : 1;
  }

  // Hard-constraint acceptance: strictly better exact objective.
  auto accept_fair = [&](const std::vector<char>& sel) -> std::optional<double> {
    auto ev = evaluate(model, sel);
    if (!ev.interface_ok || !ev.fair) return std::nullopt;
    if (ev.objective > best.ev.objective) best = {sel, ev};
    return search.score(ev, false);
  };

  bool proven = false;
  bool timed_out = false;
  std::optional<double> bound;
  auto entries = [](const SubProblem& sp) {
    const double rows = static_cast<double>(sp.lp.rows.size());
    return rows * (rows + sp.lp.variable_count());
  };
  if (free_binaries == 0) {
    proven = true;
  } else {
    const auto sp = search.build(best.sel, all_free, false);
    if (entries(sp) <= options.full_model_entries) {
      const auto out = search.branch_and_bound(sp, best.sel, search.score(best.ev, false), budget.limit, accept_fair);
      if (out.root_solved) bound = out.root_bound * kMbit;
      proven = out.completed;
    }
  }

  if (!proven && !budget.exhausted()) {
    const int slices = teg.slice_count();
    // Neighbourhoods free every flow edge in a slice window, or in two
    // windows half a horizon apart so fairness can be traded across time.
    // Sizes grow after a sweep without improvement; the search converges
    // when the largest size fails or no larger subproblem fits.
    // Variants shift the window phase and the pairing distance.
    auto run_lns = [&](std::vector<char>& sel, bool elastic,
                       const std::function<std::optional<double>(const std::vector<char>&)>& accept,
                       const std::function<double()>& current, double cap_total,
                       const std::function<bool()>& done, int variant) -> bool {
      const double stop = std::min(budget.limit, budget.used + cap_total);
      const int sizes[] = {2, 3, 4, 6, 8, 12, 16, 24, 32, 48};
      std::size_t size_index = 0;
      while (size_index < std::size(sizes)) {
        const int w = std::min(sizes[size_index], slices);
        bool improved = false;
        bool fits = false;
        for (int paired = 0; paired < 2; ++paired) {
          if (paired && (w < 2 || 2 * w > slices)) continue;
          const int span = paired ? w / 2 : w;
          const int stride = std::max(1, span / 2);
          const int phase = variant % 2 ? stride / 2 : 0;
          const int distance = std::max(1, variant / 2 % 2 ? slices / 3 : slices / 2);
          for (int s = phase; s < slices; s += stride) {
            if (!paired && s > phase && s + span - stride >= slices) break;
            if (budget.used >= stop || budget.exhausted()) return false;
            const int s2 = (s + distance) % slices;
            std::vector<char> free(edges, 0);
            bool any = false;
            for (int i = 0; i < edges; ++i) {
              const int k = teg.edge(i).k;
              const bool in = (k >= s && k < s + span) || (paired && k >= s2 && k < s2 + span);
              if (in && carries_flow(model.category[i])) free[i] = any = 1;
            }
            if (!any) continue;
            const double before = current();
            const std::vector<char> base = sel;
            const auto sp = search.build(base, free, elastic);
            if (entries(sp) > options.full_model_entries) continue;
            fits = true;
            const double cap = std::max(2e6, 0.05 * budget.limit);
            search.branch_and_bound(sp, base, before, std::min(cap, stop - budget.used), accept);
            if (current() > before + 1e-9 * std::max(1.0, std::fabs(before))) improved = true;
            if (done()) return true;
          }
        }
        if (!fits) break;
        if (!improved) {
          if (w >= slices) break;
          ++size_index;
        }
      }
      return true;
    };

    // Repair an unfair but stronger warm start through the elastic model.
    if (unfair && unfair->ev.objective > best.ev.objective) {
      Candidate cur = *unfair;
      auto accept_elastic = [&](const std::vector<char>& sel) -> std::optional<double> {
        auto ev = evaluate(model, sel);
        if (!ev.interface_ok) return std::nullopt;
        const double s = search.score(ev, true);
        if (s > search.score(cur.ev, true)) cur = {sel, ev};
        if (ev.fair && ev.objective > best.ev.objective) best = {sel, ev};
        return s;
      };
      run_lns(cur.sel, true, accept_elastic, [&] { return search.score(cur.ev, true); }, 0.3 * budget.limit,
              [&] { return cur.ev.fair; }, 0);
    }
    if (!budget.exhausted()) {
      std::vector<char> sel = best.sel;
      auto accept = [&](const std::vector<char>& s) {
        auto r = accept_fair(s);
        sel = best.sel;
        return r;
      };
      auto current = [&] { return search.score(best.ev, false); };
      // Converged once a full cycle of variants brings no improvement.
      constexpr int kVariants = 4;
      int stale = 0;
      for (int variant = 0; stale < kVariants; ++variant) {
        const double before = current();
        if (!run_lns(sel, false, accept, current, budget.limit, [] { return false; }, variant % kVariants)) {
          timed_out = true;
          break;
        }
        stale = current() > before + 1e-9 * std::max(1.0, std::fabs(before)) ? 0 : stale + 1;
      }
    } else {
      timed_out = true;
    }
  } else if (!proven) {
    timed_out = true;
  }

  result.selected.clear();
  for (int i = 0; i < edges; ++i) {
    if (best.sel[i]) result.selected.push_back(i);
  }
  result.objective = best.ev.objective;
  if (proven) {
    result.status = SolveStatus::Optimal;
    result.gap = 0.0;
  } else {
    result.status = timed_out ? SolveStatus::FeasibleTimeout : SolveStatus::Feasible;
    if (bound && *bound > 0) result.gap = std::max(0.0, (*bound - static_cast<double>(best.ev.objective)) / *bound);
  }
  result.work = budget.used;
  result.lp_solves = search.lp_solves();
  result.nodes = search.nodes();
  result.solve_seconds = std::chrono::duration<double>(Clock::now() - started).count();
  return result;
}

OracleResult oracle_exhaustive(const MilpModel& model) {
  const int edges = static_cast<int>(model.edge_count());
  if (edges > 24) throw std::invalid_argument("exhaustive oracle is limited to 24 time-edges");
  const Layout l = make_layout(model);
  std::vector<std::uint32_t> conflict(edges, 0);
  for (const auto& g : model.interface_groups) {
    for (int a : g) {
      for (int b : g) {
        if (a != b) conflict[a] |= 1u << b;
      }
    }
  }
  std::vector<int> pred(edges);
  for (int i = 0; i < edges; ++i) pred[i] = model.teg->edge(i).predecessor;

  OracleResult best;
  bool found = false;
  std::uint32_t best_mask = 0;
  std::vector<Millis> ect(model.sources.size());
  std::vector<Bits> in(model.relays.size()), out(model.relays.size());
  const std::uint64_t total = 1ull << edges;
  for (std::uint64_t raw = 0; raw < total; ++raw) {
    const auto mask = static_cast<std::uint32_t>(raw);
    bool ok = true;
    for (int i = 0; i < edges && ok; ++i) {
      if ((mask >> i & 1u) && (mask & conflict[i])) ok = false;
    }
    if (!ok) continue;
    std::fill(ect.begin(), ect.end(), 0);
    std::fill(in.begin(), in.end(), 0);
    std::fill(out.begin(), out.end(), 0);
    Bits dte = 0;
    for (int i = 0; i < edges; ++i) {
      if (!(mask >> i & 1u) || !carries_flow(model.category[i])) continue;
      const bool cont = pred[i] >= 0 && (mask >> pred[i] & 1u);
      const Bits bits = cont ? model.cont_bits[i] : model.start_bits[i];
      if (l.src[i] >= 0) ect[l.src[i]] += cont ? model.cont_eff_ms[i] : model.start_eff_ms[i];
      if (model.category[i] == EdgeCategory::OneHopDTE) dte += bits;
      if (l.relay_in[i] >= 0) in[l.relay_in[i]] += bits;
      if (l.relay_out[i] >= 0) out[l.relay_out[i]] += bits;
    }
    bool fair = true;
    fairness_deficit(model, ect, &fair);
    if (!fair) continue;
    ++best.feasible_selections;
    Bits obj = dte;
    for (std::size_t r = 0; r < in.size(); ++r) obj += 2 * std::min(in[r], out[r]);
    if (!found || obj > best.objective) {
      found = true;
      best.objective = obj;
      best_mask = mask;
    }
  }
  for (int i = 0; i < edges; ++i) {
    if (best_mask >> i & 1u) best.selected.push_back(i);
  }
  return best;
}

std::string export_lp(const MilpModel& m) {
  const auto& teg = *m.teg;
  const auto& net = *m.network;
  const auto& windows = net.scenario().windows;
  (void)windows;
  std::ostringstream out;
  const int edges = static_cast<int>(m.edge_count());
  auto tag = [&](int i) {
    const auto& e = teg.edge(i);
    return "w" + std::to_string(e.window) + "_k" + std::to_string(e.k);
  };
  auto num = [](double v) {
    std::ostringstream s;
    s.precision(15);
    s << v;
    return s.str();
  };
  auto signed_term = [&](double c, const std::string& var) {
    std::string s = c < 0 ? " - " : " + ";
    const double a = std::fabs(c);
    if (a != 1.0) s += num(a) + " ";
    return s + var;
  };
  const int n_nodes = static_cast<int>(net.node_count());
  std::vector<NodeRole> role(n_nodes);
  for (int v = 0; v < n_nodes; ++v) role[v] = net.role(v);
  auto node = [](int v) { return "n" + std::to_string(v); };

  out << "\\ contact plan selection model: " << edges << " time-edges, epsilon " << num(m.epsilon) << "\n";
  out << "Maximize\n obj:";
  bool any = false;
  for (int v = 0; v < n_nodes; ++v) {
    if (role[v] == NodeRole::Source) continue;
    out << " + CAP_" << node(v);
    any = true;
  }
  if (!any) out << " 0 DUMMY";
  out << "\nSubject To\n";
  for (int i = 0; i < edges; ++i) {
    const auto& e = teg.edge(i);
    const std::string t = tag(i);
    const double full = static_cast<double>(flow_bits(e.duration_ms(), e.rate));
    out << " eq4_" << t << ": C_" << t << signed_term(-full, "L_" + t) << " <= 0\n";
    out << " eq5_" << t << ": C_" << t << signed_term(-static_cast<double>(m.start_bits[i]), "L_" + t);
    if (e.predecessor >= 0) {
      const double diff = static_cast<double>(m.cont_bits[i] - m.start_bits[i]);
      if (diff != 0.0) out << signed_term(-diff, "Y_" + t);
    }
    out << " <= 0\n";
    if (e.predecessor >= 0) {
      const std::string pt = tag(e.predecessor);
      out << " cont_l_" << t << ": Y_" << t << " - L_" << t << " <= 0\n";
      out << " cont_p_" << t << ": Y_" << t << " - L_" << pt << " <= 0\n";
      out << " cont_b_" << t << ": Y_" << t << " - L_" << t << " - L_" << pt << " >= -1\n";
    }
    if (!carries_flow(m.category[i])) out << " invalid_" << t << ": C_" << t << " <= 0\n";
  }
  for (int v = 0; v < n_nodes; ++v) {
    if (role[v] == NodeRole::Relay) {
      out << " eq6_" << node(v) << ": IN_" << node(v);
      for (int i = 0; i < edges; ++i) {
        if (m.category[i] == EdgeCategory::SourceToRelay && teg.edge(i).rx_node == v) out << " - C_" << tag(i);
      }
      out << " = 0\n eq7_" << node(v) << ": OUT_" << node(v);
      for (int i = 0; i < edges; ++i) {
        if (m.category[i] == EdgeCategory::RelayToSink && teg.edge(i).tx_node == v) out << " - C_" << tag(i);
      }
      out << " = 0\n";
      out << " eq2_in_" << node(v) << ": CAP_" << node(v) << " - IN_" << node(v) << " <= 0\n";
      out << " eq2_out_" << node(v) << ": CAP_" << node(v) << " - OUT_" << node(v) << " <= 0\n";
      out << " hand_" << node(v) << ": - CAP_" << node(v);
      for (int t = 0; t < n_nodes; ++t) {
        if (role[t] == NodeRole::Sink) out << " + G_" << node(v) << "_" << node(t);
      }
      out << " <= 0\n";
      for (int t = 0; t < n_nodes; ++t) {
        if (role[t] != NodeRole::Sink) continue;
        out << " link_" << node(v) << "_" << node(t) << ": G_" << node(v) << "_" << node(t);
        for (int i = 0; i < edges; ++i) {
          const auto& e = teg.edge(i);
          if (m.category[i] == EdgeCategory::RelayToSink && e.tx_node == v && e.rx_node == t) out << " - C_" << tag(i);
        }
        out << " <= 0\n";
      }
    } else if (role[v] == NodeRole::Sink) {
      out << " eq8_" << node(v) << ": IN_" << node(v);
      for (int i = 0; i < edges; ++i) {
        if (m.category[i] == EdgeCategory::OneHopDTE && teg.edge(i).rx_node == v) out << " - C_" << tag(i);
      }
      for (int r = 0; r < n_nodes; ++r) {
        if (role[r] == NodeRole::Relay) out << " - G_" << node(r) << "_" << node(v);
      }
      out << " = 0\n eq2_" << node(v) << ": CAP_" << node(v) << " - IN_" << node(v) << " <= 0\n";
    }
  }
  std::map<std::pair<int, int>, std::vector<int>> groups;
  for (int i = 0; i < edges; ++i) {
    groups[{teg.edge(i).tx_terminal, teg.edge(i).k}].push_back(i);
    groups[{teg.edge(i).rx_terminal, teg.edge(i).k}].push_back(i);
  }
  for (const auto& [key, list] : groups) {
    out << " eq9_t" << key.first << "_k" << key.second << ":";
    for (int i : list) out << " + L_" << tag(i);
    out << " <= 1\n";
  }
  if (!m.sources.empty()) {
    for (int v : m.sources) {
      out << " ect_" << node(v) << ": ECT_" << node(v);
      for (int i = 0; i < edges; ++i) {
        const auto& e = teg.edge(i);
        const bool from = (m.category[i] == EdgeCategory::OneHopDTE || m.category[i] == EdgeCategory::SourceToRelay) &&
                          e.tx_node == v;
        if (!from) continue;
        out << signed_term(-static_cast<double>(m.start_eff_ms[i]) / 1000.0, "L_" + tag(i));
        if (e.predecessor >= 0 && m.cont_eff_ms[i] != m.start_eff_ms[i])
          out << signed_term(-static_cast<double>(m.cont_eff_ms[i] - m.start_eff_ms[i]) / 1000.0, "Y_" + tag(i));
      }
      out << " = 0\n";
    }
    out << " ect_avg: ECT_AVG";
    for (int v : m.sources) out << signed_term(-1.0 / static_cast<double>(m.sources.size()), "ECT_" + node(v));
    out << " = 0\n";
    for (int v : m.sources) {
      out << " fair_" << node(v) << ": ECT_" << node(v) << signed_term(-m.epsilon, "ECT_AVG") << " >= 0\n";
    }
  }
  out << "Bounds\n";
  for (int v = 0; v < n_nodes; ++v) {
    if (role[v] != NodeRole::Source) out << " CAP_" << node(v) << " >= 0\n";
  }
  out << "Binaries\n";
  for (int i = 0; i < edges; ++i) {
    out << " L_" << tag(i) << "\n";
    if (teg.edge(i).predecessor >= 0) out << " Y_" << tag(i) << "\n";
  }
  out << "End\n";
  return out.str();
}

ContactPlan schedule_milp(const TimeExpandedGraph& teg, const Network& network, const SchedulerConfig& config,
                          double epsilon, MilpOptions options, SolveResult* result) {
  const MilpModel model = build_model(teg, network, epsilon, config.pat);
  SchedulerConfig heuristic = config;
  heuristic.zrk = false;
  for (auto algo : {Algorithm::Greedy, Algorithm::Fcp, Algorithm::Dte}) {
    heuristic.algorithm = algo;
    options.warm_starts.push_back(selection_of(schedule_heuristic(teg, network, heuristic), teg));
  }
  SolveResult solved = solve(model, options);
  ContactPlan plan = evaluate_selection(teg, network, solved.selected, config.pat);
  plan.algorithm = "milp";
  if (result) *result = std::move(solved);
  return plan;
}

}  // namespace cpd
