#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "cpd/metrics.hpp"
#include "cpd/model.hpp"

namespace cpd {

inline constexpr std::string_view kScenarioSchema = "cpd-scenario/1";
inline constexpr std::string_view kPlanSchema = "cpd-plan/1";

/// Strict parsing rejects unknown fields; lax parsing keeps them as extras.
enum class ParseMode { Strict, Lax };

/// Pretty-printed, key order fixed, trailing newline.
std::string scenario_to_json(const Scenario& scenario);
/// Throws ParseError (JSON pointer or line:column) on malformed input and
/// ValidationError when the scenario is structurally invalid.
Scenario scenario_from_json(std::string_view text, ParseMode mode = ParseMode::Strict);
Scenario load_scenario(const std::filesystem::path& path, ParseMode mode = ParseMode::Strict);

struct PlanHeader {
  std::string algorithm;
  std::string scenario;
  std::map<std::string, std::string> config;
  Bits objective = 0;     // relays + sinks, recomputed from the entries
  Bits sink_capacity = 0;
  std::optional<Bits> model_objective;
  std::string status;
  std::optional<double> gap;
  std::optional<double> work;
  // Wall-clock only; left out of files unless asked for.
  std::optional<double> solve_seconds;
};

/// 64-bit FNV-1a over "key=value\n" lines in key order, as 16 hex digits.
std::string config_hash(const std::map<std::string, std::string>& config);

struct PlanFile {
  PlanHeader header;
  ContactPlan plan;
};

/// Builds a header whose objective fields are recomputed from `plan`.
PlanHeader make_header(const ContactPlan& plan, const Network& network, std::map<std::string, std::string> config);

std::string plan_to_json(const PlanFile& file, bool with_timings = false);
/// Window indices are resolved against `network` when given.
PlanFile plan_from_json(std::string_view text, const Network* network = nullptr);
PlanFile load_plan(const std::filesystem::path& path, const Network* network = nullptr);

/// ION-style contact plan: trimmed "a contact" lines (continuations merged)
/// followed by "a range" lines carrying the one-way light time.
std::string export_ion_plan(const ContactPlan& plan, const Network& network);

/// Fixed column order, see README.
std::string metrics_csv_header();
std::string metrics_csv_row(std::string_view scenario, int n_sources, int n_relays, const MetricsReport& report,
                            bool with_timings = false);
/// Per-node capacity rows: scenario,algorithm,node,role,inflow,outflow,capacity.
std::string node_csv_header();
std::string node_csv_rows(std::string_view scenario, const MetricsReport& report);

std::string read_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Shortest decimal that round-trips, "n/a" when empty.
std::string format_number(std::optional<double> value);

}  // namespace cpd
