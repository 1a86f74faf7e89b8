#include "cpd/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cpd/error.hpp"

namespace cpd {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

std::string line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return std::to_string(line) + ":" + std::to_string(column);
}

json parse_text(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // The reported byte is one past the offending character.
    throw ParseError(line_column(text, e.byte > 0 ? e.byte - 1 : 0), e.what());
  }
}

/// Object reader that tracks its JSON pointer and which keys were consumed.
class Reader {
 public:
  Reader(const json& value, std::string pointer, ParseMode mode)
      : value_(value), pointer_(std::move(pointer)), mode_(mode) {
    if (!value_.is_object()) fail("expected an object");
  }

  [[noreturn]] void fail(const std::string& message, const std::string& key = "") const {
    throw ParseError(key.empty() ? (pointer_.empty() ? "/" : pointer_) : pointer_ + "/" + key, message);
  }

  bool has(const std::string& key) const { return value_.contains(key); }

  const json& get(const std::string& key) {
    seen_.insert(key);
    auto it = value_.find(key);
    if (it == value_.end()) fail("missing required field", key);
    return *it;
  }

  std::string path(const std::string& key) const { return pointer_ + "/" + key; }
  ParseMode mode() const { return mode_; }

  std::string string(const std::string& key) {
    const auto& v = get(key);
    if (!v.is_string()) fail("expected a string", key);
    return v.get<std::string>();
  }
  std::string string_or(const std::string& key, std::string fallback) {
    return has(key) ? string(key) : std::move(fallback);
  }

  std::int64_t integer(const std::string& key) {
    const auto& v = get(key);
    if (!v.is_number_integer()) fail("expected an integer", key);
    return v.get<std::int64_t>();
  }
  std::int64_t integer_or(const std::string& key, std::int64_t fallback) {
    return has(key) ? integer(key) : fallback;
  }
  std::uint64_t unsigned_integer(const std::string& key) {
    const auto& v = get(key);
    if (!v.is_number_unsigned()) fail("expected a non-negative integer", key);
    return v.get<std::uint64_t>();
  }

  double number(const std::string& key) {
    const auto& v = get(key);
    if (!v.is_number()) fail("expected a number", key);
    return v.get<double>();
  }

  bool boolean(const std::string& key) {
    const auto& v = get(key);
    if (!v.is_boolean()) fail("expected a boolean", key);
    return v.get<bool>();
  }

  const json& array(const std::string& key) {
    const auto& v = get(key);
    if (!v.is_array()) fail("expected an array", key);
    return v;
  }

  /// Unconsumed keys: rejected in strict mode, returned as raw JSON otherwise.
  Extras finish() const {
    Extras extras;
    for (auto it = value_.begin(); it != value_.end(); ++it) {
      if (seen_.count(it.key())) continue;
      if (mode_ == ParseMode::Strict) fail("unknown field", it.key());
      extras.emplace(it.key(), it.value().dump());
    }
    return extras;
  }

 private:
  const json& value_;
  std::string pointer_;
  ParseMode mode_;
  std::set<std::string> seen_;
};

RetargetParams read_params(const json& value, const std::string& pointer, ParseMode mode) {
  Reader r(value, pointer, mode);
  RetargetParams p;
  p.slew_az = r.number("slew_az");
  p.slew_el = r.number("slew_el");
  p.fsm_tip = r.number("fsm_tip");
  p.fsm_tilt = r.number("fsm_tilt");
  p.dwell = r.number("dwell");
  p.beam_width = r.number("beam_width");
  p.fou = r.number("fou");
  r.finish();
  return p;
}

Pointing read_pointing(const json& value, const std::string& pointer, ParseMode mode) {
  Reader r(value, pointer, mode);
  Pointing p{r.number("az"), r.number("el")};
  r.finish();
  return p;
}

EndpointGeometry read_geometry(const json& value, const std::string& pointer, ParseMode mode) {
  Reader r(value, pointer, mode);
  EndpointGeometry g{read_pointing(r.get("tx"), r.path("tx"), mode), read_pointing(r.get("rx"), r.path("rx"), mode)};
  r.finish();
  return g;
}

ojson params_json(const RetargetParams& p) {
  ojson j;
  j["slew_az"] = p.slew_az;
  j["slew_el"] = p.slew_el;
  j["fsm_tip"] = p.fsm_tip;
  j["fsm_tilt"] = p.fsm_tilt;
  j["dwell"] = p.dwell;
  j["beam_width"] = p.beam_width;
  j["fou"] = p.fou;
  return j;
}

ojson pointing_json(const Pointing& p) {
  ojson j;
  j["az"] = p.az;
  j["el"] = p.el;
  return j;
}

ojson geometry_json(const EndpointGeometry& g) {
  ojson j;
  j["tx"] = pointing_json(g.tx);
  j["rx"] = pointing_json(g.rx);
  return j;
}

void put_extras(ojson& j, const Extras& extras) {
  for (const auto& [key, raw] : extras) j[key] = ojson::parse(raw);
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string scenario_to_json(const Scenario& sc) {
  ojson root;
  root["schema"] = kScenarioSchema;
  ojson meta;
  meta["name"] = sc.meta.name;
  meta["horizon"] = sc.meta.horizon;
  meta["slice_duration"] = sc.meta.slice_duration;
  meta["seed"] = sc.meta.seed;
  meta["notes"] = sc.meta.notes;
  put_extras(meta, sc.meta.extras);
  root["meta"] = meta;
  ojson presets = ojson::object();
  for (const auto& [name, p] : sc.presets) presets[name] = params_json(p);
  root["presets"] = presets;

  ojson nodes = ojson::array();
  for (const auto& n : sc.nodes) {
    ojson jn;
    jn["id"] = n.id;
    jn["role"] = to_string(n.role);
    jn["body"] = n.body;
    ojson terms = ojson::array();
    for (const auto& t : n.terminals) {
      ojson jt;
      jt["id"] = t.id;
      jt["bit_rate"] = t.bit_rate;
      if (!t.preset.empty()) jt["preset"] = t.preset;
      jt["retarget"] = params_json(t.retarget);
      put_extras(jt, t.extras);
      terms.push_back(jt);
    }
    jn["terminals"] = terms;
    put_extras(jn, n.extras);
    nodes.push_back(jn);
  }
  root["nodes"] = nodes;

  ojson windows = ojson::array();
  for (const auto& w : sc.windows) {
    ojson jw;
    jw["id"] = w.id;
    jw["tx_node"] = w.tx_node;
    jw["tx_terminal"] = w.tx_terminal;
    jw["rx_node"] = w.rx_node;
    jw["rx_terminal"] = w.rx_terminal;
    jw["start"] = w.start;
    jw["end"] = w.end;
    jw["owlt"] = w.owlt;
    jw["geometry"] = geometry_json(w.geometry);
    if (w.geometry_end) jw["geometry_end"] = geometry_json(*w.geometry_end);
    if (!w.track.empty()) {
      ojson track = ojson::array();
      for (const auto& s : w.track) {
        ojson js;
        js["t"] = s.t;
        js["tx"] = pointing_json(s.geometry.tx);
        js["rx"] = pointing_json(s.geometry.rx);
        track.push_back(js);
      }
      jw["track"] = track;
    }
    put_extras(jw, w.extras);
    windows.push_back(jw);
  }
  root["windows"] = windows;
  put_extras(root, sc.extras);
  return dump(root);
}

Scenario scenario_from_json(std::string_view text, ParseMode mode) {
  const json root = parse_text(text);
  Reader r(root, "", mode);
  if (r.string("schema") != kScenarioSchema) r.fail("unsupported schema", "schema");
  Scenario sc;

  {
    Reader m(r.get("meta"), "/meta", mode);
    sc.meta.name = m.string_or("name", "");
    sc.meta.horizon = m.integer("horizon");
    sc.meta.slice_duration = m.integer("slice_duration");
    if (m.has("seed")) sc.meta.seed = m.unsigned_integer("seed");
    sc.meta.notes = m.string_or("notes", "");
    if (sc.meta.horizon <= 0) m.fail("must be positive", "horizon");
    if (sc.meta.slice_duration <= 0) m.fail("must be positive", "slice_duration");
    sc.meta.extras = m.finish();
  }
  if (r.has("presets")) {
    const auto& presets = r.get("presets");
    if (!presets.is_object()) r.fail("expected an object", "presets");
    for (auto it = presets.begin(); it != presets.end(); ++it)
      sc.presets[it.key()] = read_params(it.value(), "/presets/" + it.key(), mode);
  }

  const auto& nodes = r.array("nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string ptr = "/nodes/" + std::to_string(i);
    Reader n(nodes[i], ptr, mode);
    Node node;
    node.id = n.string("id");
    const auto role = parse_role(n.string("role"));
    if (!role) n.fail("role must be source, relay or sink", "role");
    node.role = *role;
    node.body = n.string("body");
    const auto& terms = n.array("terminals");
    for (std::size_t t = 0; t < terms.size(); ++t) {
      const std::string tptr = ptr + "/terminals/" + std::to_string(t);
      Reader tr(terms[t], tptr, mode);
      Terminal term;
      term.id = tr.string("id");
      term.bit_rate = tr.integer("bit_rate");
      term.preset = tr.string_or("preset", "");
      if (tr.has("retarget")) {
        term.retarget = read_params(tr.get("retarget"), tptr + "/retarget", mode);
      } else if (!term.preset.empty()) {
        auto it = sc.presets.find(term.preset);
        auto builtin = builtin_preset(term.preset);
        if (it != sc.presets.end()) {
          term.retarget = it->second;
        } else if (builtin) {
          term.retarget = *builtin;
        } else {
          tr.fail("unknown preset '" + term.preset + "'", "preset");
        }
      } else {
        tr.fail("either retarget or preset is required");
      }
      term.extras = tr.finish();
      node.terminals.push_back(std::move(term));
    }
    node.extras = n.finish();
    sc.nodes.push_back(std::move(node));
  }

  const auto& windows = r.array("windows");
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const std::string ptr = "/windows/" + std::to_string(i);
    Reader w(windows[i], ptr, mode);
    ContactWindow cw;
    cw.id = w.string("id");
    cw.tx_node = w.string("tx_node");
    cw.tx_terminal = w.string("tx_terminal");
    cw.rx_node = w.string("rx_node");
    cw.rx_terminal = w.string("rx_terminal");
    cw.start = w.integer("start");
    cw.end = w.integer("end");
    cw.owlt = w.integer_or("owlt", 0);
    cw.geometry = read_geometry(w.get("geometry"), ptr + "/geometry", mode);
    if (w.has("geometry_end")) cw.geometry_end = read_geometry(w.get("geometry_end"), ptr + "/geometry_end", mode);
    if (w.has("track")) {
      const auto& track = w.array("track");
      for (std::size_t s = 0; s < track.size(); ++s) {
        const std::string sptr = ptr + "/track/" + std::to_string(s);
        Reader sr(track[s], sptr, mode);
        TrackSample sample;
        sample.t = sr.integer("t");
        sample.geometry.tx = read_pointing(sr.get("tx"), sptr + "/tx", mode);
        sample.geometry.rx = read_pointing(sr.get("rx"), sptr + "/rx", mode);
        sr.finish();
        cw.track.push_back(sample);
      }
    }
    cw.extras = w.finish();
    sc.windows.push_back(std::move(cw));
  }
  sc.extras = r.finish();

  auto violations = validate_scenario(sc);
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path, ParseMode mode) {
  return scenario_from_json(read_file(path), mode);
}

std::string config_hash(const std::map<std::string, std::string>& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& [key, value] : config) {
    feed(key);
    feed("=");
    feed(value);
    feed("\n");
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

PlanHeader make_header(const ContactPlan& plan, const Network& network, std::map<std::string, std::string> config) {
  PlanHeader h;
  h.algorithm = plan.algorithm;
  h.scenario = network.scenario().meta.name;
  h.config = std::move(config);
  const auto cap = network_capacity(plan, network);
  h.objective = cap.relay_sink_objective;
  h.sink_capacity = cap.sink_capacity;
  return h;
}

std::string plan_to_json(const PlanFile& file, bool with_timings) {
  const auto& h = file.header;
  ojson header;
  header["algorithm"] = h.algorithm;
  header["scenario"] = h.scenario;
  ojson config = ojson::object();
  for (const auto& [k, v] : h.config) config[k] = v;
  header["config"] = config;
  header["config_hash"] = config_hash(h.config);
  header["objective"] = h.objective;
  header["sink_capacity"] = h.sink_capacity;
  if (h.model_objective) header["model_objective"] = *h.model_objective;
  if (!h.status.empty()) header["status"] = h.status;
  if (h.gap) header["gap"] = *h.gap;
  if (h.work) header["work"] = *h.work;
  if (with_timings && h.solve_seconds) header["solve_seconds"] = *h.solve_seconds;

  std::vector<const PlanEntry*> sorted;
  for (const auto& e : file.plan.entries) sorted.push_back(&e);
  std::stable_sort(sorted.begin(), sorted.end(), [](const PlanEntry* a, const PlanEntry* b) {
    return std::tie(a->k, a->tx_node, a->rx_node) < std::tie(b->k, b->tx_node, b->rx_node);
  });
  ojson entries = ojson::array();
  for (const auto* e : sorted) {
    ojson j;
    j["window"] = e->window;
    j["k"] = e->k;
    j["tx_node"] = e->tx_node;
    j["tx_terminal"] = e->tx_terminal;
    j["rx_node"] = e->rx_node;
    j["rx_terminal"] = e->rx_terminal;
    j["slice_start"] = e->slice_start;
    j["slice_end"] = e->slice_end;
    j["t_retarget_ms"] = e->t_retarget_ms;
    j["t_eff_ms"] = e->t_eff_ms;
    j["bit_rate_used"] = e->bit_rate_used;
    j["flow"] = e->flow;
    j["continuation"] = e->continuation;
    entries.push_back(j);
  }
  ojson root;
  root["schema"] = kPlanSchema;
  root["header"] = header;
  root["entries"] = entries;
  return dump(root);
}

PlanFile plan_from_json(std::string_view text, const Network* network) {
  const json root = parse_text(text);
  Reader r(root, "", ParseMode::Strict);
  if (r.string("schema") != kPlanSchema) r.fail("unsupported schema", "schema");
  PlanFile file;
  {
    Reader h(r.get("header"), "/header", ParseMode::Strict);
    auto& out = file.header;
    out.algorithm = h.string("algorithm");
    out.scenario = h.string_or("scenario", "");
    const auto& config = h.get("config");
    if (!config.is_object()) h.fail("expected an object", "config");
    for (auto it = config.begin(); it != config.end(); ++it) {
      if (!it.value().is_string()) h.fail("config values must be strings", "config/" + it.key());
      out.config[it.key()] = it.value().get<std::string>();
    }
    if (h.string("config_hash") != config_hash(out.config)) h.fail("does not match config", "config_hash");
    out.objective = h.integer("objective");
    out.sink_capacity = h.integer("sink_capacity");
    if (h.has("model_objective")) out.model_objective = h.integer("model_objective");
    out.status = h.string_or("status", "");
    if (h.has("gap")) out.gap = h.number("gap");
    if (h.has("work")) out.work = h.number("work");
    if (h.has("solve_seconds")) out.solve_seconds = h.number("solve_seconds");
    h.finish();
  }
  file.plan.algorithm = file.header.algorithm;
  std::map<std::string, int> window_index;
  if (network) {
    const auto& windows = network->scenario().windows;
    for (int i = 0; i < static_cast<int>(windows.size()); ++i) window_index.emplace(windows[i].id, i);
  }
  const auto& entries = r.array("entries");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    Reader e(entries[i], "/entries/" + std::to_string(i), ParseMode::Strict);
    PlanEntry p;
    p.window = e.string("window");
    p.k = static_cast<int>(e.integer("k"));
    p.tx_node = e.string("tx_node");
    p.tx_terminal = e.string("tx_terminal");
    p.rx_node = e.string("rx_node");
    p.rx_terminal = e.string("rx_terminal");
    p.slice_start = e.integer("slice_start");
    p.slice_end = e.integer("slice_end");
    p.t_retarget_ms = e.integer("t_retarget_ms");
    p.t_eff_ms = e.integer("t_eff_ms");
    p.bit_rate_used = e.integer("bit_rate_used");
    p.flow = e.integer("flow");
    p.continuation = e.boolean("continuation");
    e.finish();
    if (network) {
      auto it = window_index.find(p.window);
      if (it == window_index.end()) e.fail("unknown window '" + p.window + "'", "window");
      p.window_index = it->second;
    }
    file.plan.entries.push_back(std::move(p));
  }
  r.finish();
  return file;
}

PlanFile load_plan(const std::filesystem::path& path, const Network* network) {
  return plan_from_json(read_file(path), network);
}

namespace {

// Milliseconds as seconds with at most three decimals.
std::string ms_text(Millis ms) {
  std::string out = std::to_string(ms / 1000);
  if (const Millis frac = ms % 1000; frac != 0) {
    char buf[8];
    std::snprintf(buf, sizeof buf, ".%03lld", static_cast<long long>(frac));
    std::string f = buf;
    while (f.back() == '0') f.pop_back();
    out += f;
  }
  return out;
}

std::string bytes_per_second(BitRate bits) {
  std::string out = std::to_string(bits / 8);
  if (const BitRate frac = bits % 8; frac != 0) out += ms_text(frac * 125).substr(1);
  return out;
}

}  // namespace

std::string export_ion_plan(const ContactPlan& plan, const Network& network) {
  std::ostringstream out;
  out << "# contact plan: " << (plan.algorithm.empty() ? "unnamed" : plan.algorithm) << ", scenario "
      << network.scenario().meta.name << "\n";
  out << "# times in seconds from epoch, rates in bytes/s\n";
  for (std::size_t i = 0; i < network.node_count(); ++i) out << "# node " << i + 1 << " " << network.node(static_cast<int>(i)).id << "\n";

  struct Contact {
    std::string window;
    int tx, rx;
    int last_k;
    Millis end_ms;
    Millis eff_ms;
    BitRate rate;
    Seconds owlt;
  };
  std::vector<const PlanEntry*> sorted;
  for (const auto& e : plan.entries) sorted.push_back(&e);
  std::sort(sorted.begin(), sorted.end(), [](const PlanEntry* a, const PlanEntry* b) {
    return std::tie(a->window, a->k) < std::tie(b->window, b->k);
  });
  std::vector<Contact> contacts;
  for (const auto* e : sorted) {
    if (!contacts.empty()) {
      auto& c = contacts.back();
      if (c.window == e->window && c.last_k + 1 == e->k && e->continuation && c.end_ms == e->slice_start * 1000) {
        c.last_k = e->k;
        c.end_ms = e->slice_end * 1000;
        c.eff_ms += e->t_eff_ms;
        continue;
      }
    }
    Seconds owlt = 0;
    if (e->window_index >= 0) owlt = network.scenario().windows[e->window_index].owlt;
    contacts.push_back({e->window, network.node_index(e->tx_node) + 1, network.node_index(e->rx_node) + 1, e->k,
                        e->slice_end * 1000, e->t_eff_ms, e->bit_rate_used, owlt});
  }
  std::erase_if(contacts, [](const Contact& c) { return c.eff_ms <= 0; });
  std::sort(contacts.begin(), contacts.end(), [](const Contact& a, const Contact& b) {
    return std::make_tuple(a.end_ms - a.eff_ms, a.tx, a.rx, a.end_ms) <
           std::make_tuple(b.end_ms - b.eff_ms, b.tx, b.rx, b.end_ms);
  });
  for (const auto& c : contacts) {
    out << "a contact " << ms_text(c.end_ms - c.eff_ms) << " " << ms_text(c.end_ms) << " " << c.tx << " " << c.rx
        << " " << bytes_per_second(c.rate) << "\n";
  }
  for (const auto& c : contacts) {
    out << "a range " << ms_text(c.end_ms - c.eff_ms) << " " << ms_text(c.end_ms) << " " << c.tx << " " << c.rx
        << " " << c.owlt << "\n";
  }
  return out.str();
}

std::string format_number(std::optional<double> value) {
  if (!value) return "n/a";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, *value);
  return std::string(buf, res.ptr);
}

std::string metrics_csv_header() {
  return "scenario,n_sources,n_relays,algorithm,network_capacity_bits,objective_bits,causal_capacity_bits,"
         "duty_cycle_pct,jain_index,mean_inter_contact_s,max_inter_contact_s,uptime_s,mean_run_length,entries,"
         "runtime_s\n";
}

std::string metrics_csv_row(std::string_view scenario, int n_sources, int n_relays, const MetricsReport& r,
                            bool with_timings) {
  std::ostringstream out;
  out << scenario << "," << n_sources << "," << n_relays << "," << r.algorithm << "," << r.network_capacity << ","
      << r.objective << "," << r.causal_capacity << "," << format_number(r.duty_cycle) << ","
      << format_number(r.jain_index) << "," << format_number(r.mean_inter_contact) << ","
      << format_number(r.max_inter_contact) << "," << format_number(r.uptime) << ","
      << format_number(r.mean_run_length) << "," << r.entries << ","
      << format_number(with_timings ? r.runtime_seconds : std::nullopt) << "\n";
  return out.str();
}

std::string node_csv_header() { return "scenario,algorithm,node,role,inflow_bits,outflow_bits,capacity_bits\n"; }

std::string node_csv_rows(std::string_view scenario, const MetricsReport& r) {
  std::ostringstream out;
  for (const auto& n : r.per_node) {
    out << scenario << "," << r.algorithm << "," << n.node << "," << to_string(n.role) << "," << n.inflow << ",";
    if (n.outflow_unbounded) {
      out << "inf";
    } else {
      out << n.outflow;
    }
    out << "," << n.capacity << "\n";
  }
  return out.str();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace cpd
