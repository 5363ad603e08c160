#pragma once

// Digital decision core: AGC over the step attenuator, threshold compare,
// and the filter engage/release state machine. Every action takes effect
// one controller clock after the sample that triggered it.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swsense/agc.hpp"
#include "swsense/estimator.hpp"
#include "swsense/readout.hpp"

namespace swsense {

struct ControllerConfig {
    PowerLevel threshold{0.0};
    double clock_period = 200e-9;
    /// Explicit AGC window; derived from the chain when absent.
    std::optional<int> agc_high_code;
    std::optional<int> agc_low_code;
    PowerLevel agc_engage_power{0.0};
    /// While engaged, retune when the estimate moves by more than this
    /// fraction of the current notch frequency.
    double retune_fraction = 0.01;

    void validate() const;
    /// Non-fatal remarks, e.g. a threshold outside the measured -20..20 dBm.
    [[nodiscard]] std::vector<std::string> warnings() const;
    [[nodiscard]] AgcWindow window(const ChainConfig& chain) const;
    friend bool operator==(const ControllerConfig&, const ControllerConfig&) = default;
};

enum class ControllerMode { idle, engaging, engaged, releasing };
std::string_view to_string(ControllerMode m);

enum class ActionKind { tune_filter, release_filter, flag, set_attenuation };
std::string_view to_string(ActionKind k);

struct Action {
    ActionKind kind = ActionKind::flag;
    double decided_at = 0.0;
    double effective_at = 0.0;
    double freq_hz = 0.0;
    double att_db = 0.0;
    bool interferer_present = false;

    [[nodiscard]] std::string label() const;
};

struct ControllerState {
    ControllerMode mode = ControllerMode::idle;
    /// Commanded attenuation.
    double att_db = 0.0;
    std::optional<Estimate> last_estimate;
    std::optional<double> pending_action_at;
    double tune_target_hz = 0.0;
    bool interferer_flag = false;
    /// [start, end) intervals during which the attenuator is settling.
    std::vector<std::pair<double, double>> settle_windows;
};

struct SampleOutcome {
    ControllerState state;
    std::vector<Action> actions;
    /// NaN when no estimate was produced for this sample.
    double f_est_hz = 0.0;
    double p_est_dbm = 0.0;
    bool frozen = false;
    std::string diagnostic;
};

/// One-step AGC decision with the controller's configured window.
AgcDecision agc_policy(int code_oc, double att_db, const ControllerConfig& cfg,
                       const ChainConfig& chain);

SampleOutcome on_sample(const TapCodes& codes, const ControllerState& st,
                        const ControllerConfig& cfg, const CalibrationTable& cal, double now);

}  // namespace swsense
