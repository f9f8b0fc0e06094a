#pragma once

// Batch drivers behind the CLI: simulate a session with scripted agents and
// aggregate per-trial metrics into CSV reports.

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sightwarp/agent.hpp"
#include "sightwarp/docking.hpp"
#include "sightwarp/json_io.hpp"
#include "sightwarp/metrics.hpp"

namespace sightwarp {

Json to_json(const AgentProfile &profile);
// Missing fields keep their defaults.
AgentProfile agent_profile_from_json(const Json &j);

/// Event logs are JSON lines, one SemanticEvent per line.
void write_events_file(const std::filesystem::path &path, const std::vector<SemanticEvent> &events);
std::vector<SemanticEvent> read_events_file(const std::filesystem::path &path);

struct TrialOutcome {
    SessionEntry entry;
    std::optional<MetricsRecord> metrics; // empty when the trial failed
    std::int64_t completed_at{0};
    std::string error;                    // diagnostic when it failed
};

/// Directory of one trial inside a simulation output directory.
std::filesystem::path trial_dir(const std::filesystem::path &root, int index);

/// Synthesizes and replays every trial of the plan. Each trial runs with the
/// technique its entry assigns (profile.technique and config.mode are
/// overridden). When `out` is given, writes per trial a directory holding
/// trace.jsonl, events.jsonl, scene.json, config.json and metrics.json, plus
/// session.json, manifest.json and results.jsonl at the top. Results are in
/// plan order and independent of `threads` (0 picks the hardware count).
std::vector<TrialOutcome> simulate_session(const SessionPlan &plan, const AgentProfile &profile,
                                           const EngineConfig &config,
                                           const std::optional<std::filesystem::path> &out = std::nullopt,
                                           unsigned threads = 0);

struct ReportRow {
    SessionEntry entry;
    MetricsRecord metrics;
};

/// Recomputes metrics from the events and traces in a simulate directory.
std::vector<ReportRow> load_report_rows(const std::filesystem::path &dir);

struct CellStats {
    Technique technique{Technique::Baseline};
    double size_deg{0.0};
    double rotation_deg{0.0};
    int n{0};
    std::array<double, 7> mean{}; // in kMeasureNames order
    std::array<double, 7> sd{};   // sample standard deviation; zero when n < 2
};

/// CSV column names of the seven measures, in MetricsRecord field order.
inline constexpr std::array<const char *, 7> kMeasureNames{
    "trial_completion_time_ms", "acquisition_time_ms", "first_manipulation_duration_ms", "clutch_count",
    "failed_gesture_count",     "hand_translation_m",  "hand_rotation_deg"};

std::array<double, 7> measures_of(const MetricsRecord &m);

/// Groups rows by (technique, size, rotation) in technique, size, rotation order.
std::vector<CellStats> aggregate(const std::vector<ReportRow> &rows);

std::string per_trial_csv(const std::vector<ReportRow> &rows);
std::string aggregate_csv(const std::vector<CellStats> &cells);

/// Path of the aggregate CSV written next to a per-trial report.
std::filesystem::path aggregate_path(const std::filesystem::path &report);

} // namespace sightwarp
