#pragma once

// JSON serialization of configuration records, the bundled config file
// layout, and calibration-table persistence (CSV body plus JSON header).

#include <string>
#include <vector>

#include "json.hpp"
#include "swsense/controller.hpp"
#include "swsense/estimator.hpp"
#include "swsense/filters.hpp"
#include "swsense/readout.hpp"

namespace swsense {

using Json = nlohmann::json;

Json to_json(const ChainConfig& c);
/// Missing fields keep their defaults; unknown fields are a ConfigError.
ChainConfig chain_from_json(const Json& j);

Json to_json(const ControllerConfig& c);
ControllerConfig controller_from_json(const Json& j);

Json to_json(const NotchModel& m);
/// Defaults follow `kind` before the remaining fields are applied.
NotchModel notch_from_json(const Json& j);

Json to_json(const GridSpec& g);
GridSpec grid_from_json(const Json& j);

Json to_json(const Tone& t);
/// A modulated tone without an explicit n_subtones gets 31 lines.
Tone tone_from_json(const Json& j);

/// Everything a command needs when run without arguments.
struct AppConfig {
    ChainConfig chain;
    ControllerConfig controller;
    GridSpec calibration_grid;
    std::vector<double> package_limits_w = kDefaultPackageLimitsW;
};

Json to_json(const AppConfig& c);
AppConfig app_config_from_json(const Json& j);

Json read_json_file(const std::string& path);
AppConfig load_app_config(const std::string& path);

/// FNV-1a 64 over the canonical JSON form, as 16 hex digits.
std::string config_hash(const ChainConfig& c);

inline constexpr const char* kCalibrationCsvHeader =
    "freq_hz,power_dbm,att_db,code_oc,code_l1,code_l2";

void save_calibration(const CalibrationTable& cal, const std::string& csv_path,
                      const std::string& header_path);

/// Throws ConfigError when the stored hash does not match `chain`.
CalibrationTable load_calibration(const std::string& csv_path, const std::string& header_path,
                                  const ChainConfig& chain);

}  // namespace swsense
