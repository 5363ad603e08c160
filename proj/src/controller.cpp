#include "swsense/controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "swsense/error.hpp"

namespace swsense {

void ControllerConfig::validate() const {
    if (!(clock_period > 0.0)) throw ConfigError("controller clock_period must be positive");
    if (agc_high_code.has_value() != agc_low_code.has_value()) {
        throw ConfigError("agc_high_code and agc_low_code must be given together");
    }
    if (agc_high_code && *agc_low_code >= *agc_high_code) {
        throw ConfigError("agc_low_code must be below agc_high_code");
    }
    if (!(retune_fraction > 0.0)) throw ConfigError("retune_fraction must be positive");
}

std::vector<std::string> ControllerConfig::warnings() const {
    std::vector<std::string> w;
    if (threshold.dbm() < -20.0 || threshold.dbm() > 20.0) {
        std::ostringstream msg;
        msg << "threshold " << threshold.dbm() << " dBm is outside the characterised -20..20 dBm range";
        w.push_back(msg.str());
    }
    return w;
}

AgcWindow ControllerConfig::window(const ChainConfig& chain) const {
    if (agc_high_code) return {*agc_low_code, *agc_high_code};
    return default_agc_window(chain, agc_engage_power.dbm());
}

std::string_view to_string(ControllerMode m) {
    switch (m) {
        case ControllerMode::idle: return "idle";
        case ControllerMode::engaging: return "engaging";
        case ControllerMode::engaged: return "engaged";
        case ControllerMode::releasing: return "releasing";
    }
    return "?";
}

std::string_view to_string(ActionKind k) {
    switch (k) {
        case ActionKind::tune_filter: return "tune";
        case ActionKind::release_filter: return "release";
        case ActionKind::flag: return "flag";
        case ActionKind::set_attenuation: return "att";
    }
    return "?";
}

std::string Action::label() const {
    std::ostringstream os;
    os << to_string(kind);
    switch (kind) {
        case ActionKind::tune_filter: os << ':' << freq_hz; break;
        case ActionKind::flag: os << ':' << (interferer_present ? 1 : 0); break;
        case ActionKind::set_attenuation: os << ':' << att_db; break;
        case ActionKind::release_filter: break;
    }
    return os.str();
}

AgcDecision agc_policy(int code_oc, double att_db, const ControllerConfig& cfg,
                       const ChainConfig& chain) {
    return agc_policy(code_oc, att_db, cfg.window(chain), chain.attenuator);
}

SampleOutcome on_sample(const TapCodes& codes, const ControllerState& st,
                        const ControllerConfig& cfg, const CalibrationTable& cal, double now) {
    const auto& chain = cal.chain();
    SampleOutcome out;
    out.state = st;
    out.f_est_hz = std::numeric_limits<double>::quiet_NaN();
    out.p_est_dbm = std::numeric_limits<double>::quiet_NaN();
    auto& s = out.state;
    const double effect = now + cfg.clock_period;

    if (s.pending_action_at && now >= *s.pending_action_at) {
        if (s.mode == ControllerMode::engaging) s.mode = ControllerMode::engaged;
        if (s.mode == ControllerMode::releasing) s.mode = ControllerMode::idle;
        s.pending_action_at.reset();
    }

    // AGC first so later decisions see the new commanded attenuation.
    const auto agc = agc_policy(codes.code_oc, s.att_db, cfg, chain);
    if (agc.overrange) out.diagnostic = "agc overrange";
    if (agc.att_db != s.att_db) {
        s.att_db = agc.att_db;
        out.actions.push_back({ActionKind::set_attenuation, now, effect, 0.0, agc.att_db, false});
        s.settle_windows.emplace_back(effect, effect + chain.attenuator.settle_time);
    }

    // Samples captured while the attenuator settles are not estimated.
    constexpr double eps = 1e-15;
    std::erase_if(s.settle_windows, [&](const auto& w) { return w.second <= codes.t - eps; });
    for (const auto& [start, end] : s.settle_windows) {
        if (codes.t >= start - eps && codes.t < end - eps) {
            out.frozen = true;
            return out;
        }
    }

    double p_dbm = -std::numeric_limits<double>::infinity();
    std::optional<Estimate> est;
    try {
        est = estimate(codes, cal);
        p_dbm = est->power.dbm();
        out.f_est_hz = est->freq.hz();
        out.p_est_dbm = p_dbm;
        s.last_estimate = est;
    } catch (const NoSignalError&) {
        s.last_estimate.reset();
    } catch (const Error& e) {
        if (!out.diagnostic.empty()) out.diagnostic += "; ";
        out.diagnostic += e.what();
        return out;
    }

    // A saturated open end only bounds the power from below; wait for AGC.
    const bool oc_saturated = codes.code_oc >= detector_ceiling_code(chain);
    if (oc_saturated) {
        if (!out.diagnostic.empty()) out.diagnostic += "; ";
        out.diagnostic += "open-end saturated";
        return out;
    }

    const bool above = p_dbm > cfg.threshold.dbm();
    const bool active = s.mode == ControllerMode::engaging || s.mode == ControllerMode::engaged;
    auto emit_tune = [&](double f) {
        out.actions.push_back({ActionKind::tune_filter, now, effect, f, 0.0, true});
        s.tune_target_hz = f;
    };
    auto emit_flag = [&](bool present) {
        out.actions.push_back({ActionKind::flag, now, effect, 0.0, 0.0, present});
        s.interferer_flag = present;
    };

    if (!active && above) {
        emit_tune(est->freq.hz());
        if (!s.interferer_flag) emit_flag(true);
        s.mode = ControllerMode::engaging;
        s.pending_action_at = effect;
    } else if (active && !above) {
        out.actions.push_back({ActionKind::release_filter, now, effect, 0.0, 0.0, false});
        emit_flag(false);
        s.mode = ControllerMode::releasing;
        s.pending_action_at = effect;
    } else if (active && above &&
               std::abs(est->freq.hz() - s.tune_target_hz) > cfg.retune_fraction * s.tune_target_hz) {
        emit_tune(est->freq.hz());
    }
    return out;
}

}  // namespace swsense
