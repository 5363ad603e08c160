#include "swsense/agc.hpp"

#include <algorithm>
#include <cmath>

#include "swsense/error.hpp"

namespace swsense {

AgcWindow default_agc_window(const ChainConfig& cfg, double engage_power_dbm) {
    const auto& det = cfg.detector;
    const double codes_per_db = det.slope_a / 20.0 / cfg.adc.lsb();
    int high = adc_sample(detector_voltage(det.v_in_max * db_to_voltage_ratio(-1.0), det), cfg.adc);

    // Open-end code for a CW input at engage_power with the attenuator at 0 dB,
    // evaluated at the switch frequency (inside any coupler band).
    const double f = cfg.switch_frequency;
    const std::vector<SpectralLine> probe{{f, dbm_to_watts(engage_power_dbm)}};
    const int engage_code = readout_lines(probe, cfg, 0.0).code_oc;
    if (engage_code > detector_floor_code(cfg) && engage_code < high) high = engage_code;

    const int low = high - static_cast<int>(std::lround(2.0 * codes_per_db));
    return {low, high};
}

AgcDecision agc_policy(int code_oc, double att_db, const AgcWindow& window,
                       const AttenuatorParams& att) {
    AgcDecision d{att_db, false};
    if (code_oc > window.high_code) {
        if (att_db + att.step_db <= att.max_db + 1e-9) {
            d.att_db = att.quantize(att_db + att.step_db);
        } else {
            d.overrange = true;
        }
    } else if (code_oc < window.low_code && att_db > 1e-9) {
        d.att_db = att.quantize(att_db - att.step_db);
    }
    return d;
}

AgcSettled settle_agc(std::span<const SpectralLine> lines, const ChainConfig& cfg,
                      const AgcWindow& window) {
    AgcSettled s;
    const int max_steps =
        static_cast<int>(std::floor(cfg.attenuator.max_db / cfg.attenuator.step_db + 1e-9)) + 2;
    for (int i = 0; i <= max_steps; ++i) {
        s.codes = readout_lines(lines, cfg, s.att_db);
        const auto d = agc_policy(s.codes.code_oc, s.att_db, window, cfg.attenuator);
        s.overrange = d.overrange;
        if (d.att_db == s.att_db) return s;
        s.att_db = d.att_db;
        ++s.steps;
    }
    throw Error("AGC did not settle; window narrower than one attenuator step?");
}

}  // namespace swsense
