#pragma once

// Command implementations behind the swsense tool. Each command writes its
// artifacts under `out_dir` and reports them; errors surface as a non-zero
// exit code with a message rather than an exception.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "swsense/config_io.hpp"

namespace swsense {

struct CommandResult {
    int exit_code = 0;
    std::vector<std::string> artifact_paths;
    std::string message;
};

struct GlobalOptions {
    std::optional<std::string> config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
};

/// --config, then $SWSENSE_CONFIG, then the bundled default file, then the
/// compiled-in defaults.
AppConfig resolve_config(const GlobalOptions& g);
std::string bundled_config_path();

struct SweepArgs {
    double f_start = 1e9;
    double f_stop = 16e9;
    double f_step = 0.1e9;
    /// Empty: the configured R_C only.
    std::vector<double> r_c_values;
};

CommandResult cmd_sweep_sparams(const AppConfig& cfg, const SweepArgs& args, const std::string& out_dir);

/// Writes calibration.csv and calibration.json.
CommandResult cmd_calibrate(const AppConfig& cfg, const std::string& out_dir);

struct EstimateArgs {
    /// CSV with code_oc, code_l1, code_l2 and optionally att_db columns.
    std::optional<std::string> codes_csv;
    /// Single reading when no CSV is given.
    std::optional<std::vector<int>> codes;
    double att_db = 0.0;
    /// Stored calibration (csv + json header); rebuilt from config if absent.
    std::optional<std::string> calibration_prefix;
};

CommandResult cmd_estimate(const AppConfig& cfg, const EstimateArgs& args, const std::string& out_dir,
                           std::ostream& out);

struct ResolutionArgs {
    double f_start = 0.5e9;
    double f_stop = 16e9;
    double f_step = 0.1e9;
};

CommandResult cmd_resolution(const AppConfig& cfg, const ResolutionArgs& args, const std::string& out_dir);

CommandResult cmd_place_nodes(const AppConfig& cfg, double f_max_1, double max_pct,
                              const std::string& out_dir, std::ostream& out);

CommandResult cmd_simulate(const AppConfig& cfg, const std::string& scenario_path,
                           std::optional<std::uint64_t> seed, const std::string& out_dir,
                           std::ostream& out);

inline constexpr const char* kSparamsCsvHeader = "freq_hz,s11_db,s21_db";
inline constexpr const char* kDissipationCsvHeader = "p_in_dbm,dissipated_w";
inline constexpr const char* kPackageCsvHeader = "limit_w,max_input_dbm";
inline constexpr const char* kEstimateCsvHeader =
    "code_oc,code_l1,code_l2,att_db,freq_hz,power_dbm,tap_used,confidence";
inline constexpr const char* kResolutionCsvHeader = "tap,freq_ghz,resolution_ghz,resolution_pct";

}  // namespace swsense
