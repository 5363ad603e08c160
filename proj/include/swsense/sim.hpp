#pragma once

// Envelope-domain simulation of sources, cascaded detector stages and
// notch filters. Time advances on a fixed dt grid for logging; ADC captures,
// code deliveries and controller actions are exact events in integer
// picoseconds.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "swsense/config_io.hpp"
#include "swsense/controller.hpp"
#include "swsense/estimator.hpp"
#include "swsense/filters.hpp"

namespace swsense {

struct StageSpec {
    ChainConfig chain;
    ControllerConfig controller;
    NotchModel filter;
    /// One-way delay between this stage's sampling point and its filter.
    double electrical_delay = 0.0;
    /// Calibration grid; clipped to the coupler band when absent.
    std::optional<GridSpec> calibration_grid;
};

struct Scenario {
    double duration = 10e-6;
    double dt = 25e-9;
    std::vector<Tone> sources;
    std::vector<StageSpec> stages;
    std::uint64_t seed = 1;
    /// Instants at which per-tone output tables are captured.
    std::vector<double> snapshot_times;

    /// Throws ConfigError for anything that would fail mid-run.
    void validate() const;
};

Json to_json(const Scenario& sc);
/// Stage coupling_kind, when present, overrides the chain's.
Scenario scenario_from_json(const Json& j, const AppConfig& defaults = {});
Scenario load_scenario(const std::string& path, const AppConfig& defaults = {});

struct StageStep {
    /// Per source tone, dBm (-inf when off).
    std::vector<double> in_dbm;
    std::vector<double> out_dbm;
    FilterState filter;
    bool filter_effective = false;
    double att_db = 0.0;
    /// Latest delivered sample and what the controller made of it.
    TapCodes codes;
    double f_est_hz = 0.0;
    double p_est_dbm = 0.0;
    ControllerMode mode = ControllerMode::idle;
    /// Labels of actions decided during this step, '|'-joined.
    std::string action;
};

struct TraceStep {
    double t = 0.0;
    std::vector<StageStep> stages;
};

struct ActionEvent {
    std::size_t stage = 0;
    Action action;
    /// Capture instant of the sample that triggered it.
    double sample_t = 0.0;
};

struct FilterToggle {
    std::size_t stage = 0;
    double t = 0.0;
    bool engaged = false;
};

struct Snapshot {
    double t = 0.0;
    std::vector<double> in_dbm;
    std::vector<double> out_dbm;
};

struct TraceRecord {
    double dt = 0.0;
    double clock_period = 0.0;
    std::vector<Tone> sources;
    std::vector<TraceStep> steps;
    std::vector<ActionEvent> actions;
    std::vector<FilterToggle> toggles;
    std::vector<Snapshot> snapshots;
    std::vector<std::string> diagnostics;
};

struct Metrics {
    std::optional<double> response_time_engage;
    std::optional<double> response_time_release;
    /// Input minus final output at the last step each tone was on; NaN if never on.
    std::vector<double> suppression_db;
    bool limit_cycle = false;
    double limit_cycle_period = 0.0;
    double max_output_power_dbm = 0.0;
};

/// Calibration tables keyed by (config hash, grid). Not thread-safe; give
/// each thread its own.
class CalibrationCache {
public:
    std::shared_ptr<const CalibrationTable> get(const ChainConfig& chain, const GridSpec& grid,
                                                const AgcWindow& window);

private:
    std::map<std::string, std::shared_ptr<const CalibrationTable>> tables_;
};

struct RunResult {
    TraceRecord trace;
    Metrics metrics;
};

RunResult run(const Scenario& sc, CalibrationCache* cache = nullptr);

enum class Edge { rise, fall };

/// Source edge to the instant the stage-0 filter action takes effect.
/// Throws Error when there is no edge or no matching action.
double measure_response_time(const TraceRecord& tr, Edge edge);

struct LimitCycle {
    bool present = false;
    double period = 0.0;
};

LimitCycle detect_limit_cycle(const TraceRecord& tr);

Metrics compute_metrics(const TraceRecord& tr);

inline constexpr const char* kTraceCsvHeader =
    "t_s,stage,code_oc,code_l1,code_l2,att_db,f_est_hz,p_est_dbm,mode,action,filter_engaged,"
    "filter_f_hz";

/// Trace CSV: the controller log columns per (step, stage), then
/// in_dbm_<i>/out_dbm_<i> per source tone.
void write_trace_csv(std::ostream& os, const TraceRecord& tr);
void write_snapshots_csv(std::ostream& os, const TraceRecord& tr);
Json to_json(const Metrics& m);

}  // namespace swsense
