#include "swsense/readout.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "swsense/error.hpp"

namespace swsense {

void AttenuatorParams::validate() const {
    if (!(step_db > 0.0 && step_db <= max_db)) {
        throw ConfigError("attenuator requires 0 < step_db <= max_db");
    }
    if (!(settle_time >= 0.0)) throw ConfigError("attenuator settle_time must be >= 0");
}

bool AttenuatorParams::is_valid_setting(double att_db) const {
    if (!(att_db >= -1e-9 && att_db <= max_db + 1e-9)) return false;
    const double steps = att_db / step_db;
    return std::abs(steps - std::round(steps)) < 1e-6;
}

double AttenuatorParams::quantize(double att_db) const {
    const double max_steps = std::floor(max_db / step_db + 1e-9);
    const double steps = std::clamp(std::round(att_db / step_db), 0.0, max_steps);
    return steps * step_db;
}

void AmplifierParams::validate() const {
    if (!std::isfinite(gain_db)) throw ConfigError("amplifier gain_db must be finite");
    if (!std::isfinite(p_out_sat_dbm)) throw ConfigError("amplifier p_out_sat_dbm must be finite");
}

void DetectorParams::validate() const {
    if (!(slope_a > 0.0)) throw ConfigError("detector slope_a must be positive");
    if (!(v_in_min > 0.0 && v_in_min < v_in_max)) {
        throw ConfigError("detector requires 0 < v_in_min < v_in_max");
    }
}

void AdcParams::validate() const {
    if (bits < 6 || bits > 16) throw ConfigError("ADC bits must be within [6, 16]");
    if (!(sample_rate > 0.0)) throw ConfigError("ADC sample_rate must be positive");
    if (!(v_fs > 0.0)) throw ConfigError("ADC v_fs must be positive");
}

void ChainConfig::validate() const {
    tap.validate();
    if (coupling_kind == CouplingKind::coupler) coupler.validate();
    attenuator.validate();
    amplifier.validate();
    stub.validate();
    if (stub.taps.size() != 2) throw ConfigError("the readout chain needs exactly two stub taps (l1, l2)");
    detector.validate();
    adc.validate();
    if (!(switch_frequency > 0.0 && switch_frequency <= stub.taps[1].f_max)) {
        throw ConfigError("switch_frequency must lie in (0, f_max of l2]");
    }
}

double detector_voltage(double v_rms, const DetectorParams& p) {
    if (v_rms < 0.0) throw std::invalid_argument("detector input must be >= 0");
    const double v = std::clamp(v_rms, p.v_in_min, p.v_in_max);
    return p.slope_a * std::log10(v) + p.intercept_b;
}

int adc_sample(double v, const AdcParams& p) {
    const double code = std::floor(v / p.lsb());
    return static_cast<int>(std::clamp(code, 0.0, static_cast<double>(p.max_code())));
}

int detector_floor_code(const ChainConfig& cfg) {
    return adc_sample(detector_voltage(cfg.detector.v_in_min, cfg.detector), cfg.adc);
}

int detector_ceiling_code(const ChainConfig& cfg) {
    return adc_sample(detector_voltage(cfg.detector.v_in_max, cfg.detector), cfg.adc);
}

double monitor_coupling_db(const ChainConfig& cfg, double freq_hz) {
    if (cfg.coupling_kind == CouplingKind::coupler) {
        return coupler_response(cfg.coupler, Frequency(freq_hz)).coupling_db;
    }
    return tap_coupling(cfg.tap);
}

double through_loss_db(const ChainConfig& cfg, double freq_hz) {
    if (cfg.coupling_kind == CouplingKind::coupler) {
        return coupler_response(cfg.coupler, Frequency(freq_hz)).insertion_db;
    }
    return -tap_sparams(cfg.tap).s21_db;
}

std::vector<SpectralLine> stub_drive(std::span<const SpectralLine> lines, const ChainConfig& cfg,
                                     double att_db) {
    std::vector<SpectralLine> out;
    out.reserve(lines.size());
    double total = 0.0;
    for (const auto& l : lines) {
        double gain_db = monitor_coupling_db(cfg, l.freq_hz) - att_db + cfg.amplifier.gain_db;
        if (!cfg.gain_ripple_db.empty()) gain_db += cfg.gain_ripple_db.at(l.freq_hz);
        const double w = l.watts * db_to_power_ratio(gain_db);
        out.push_back({l.freq_hz, w});
        total += w;
    }
    // Hard output clamp: the composite is scaled back to the saturated level.
    const double sat = dbm_to_watts(cfg.amplifier.p_out_sat_dbm);
    if (total > sat) {
        const double scale = sat / total;
        for (auto& l : out) l.watts *= scale;
    }
    return out;
}

TapVoltages chain_voltages(std::span<const SpectralLine> lines, const ChainConfig& cfg,
                           double att_db) {
    const auto drive = stub_drive(lines, cfg, att_db);
    return tap_rms_voltages(drive, cfg.stub);
}

TapCodes readout_lines(std::span<const SpectralLine> lines, const ChainConfig& cfg, double att_db,
                       double t) {
    const auto v = chain_voltages(lines, cfg, att_db);
    TapCodes codes;
    codes.code_oc = adc_sample(detector_voltage(v.v_oc, cfg.detector), cfg.adc);
    codes.code_l1 = adc_sample(detector_voltage(v.taps[0], cfg.detector), cfg.adc);
    codes.code_l2 = adc_sample(detector_voltage(v.taps[1], cfg.detector), cfg.adc);
    codes.att_db = att_db;
    codes.t = t;
    return codes;
}

TapCodes chain_readout(const SignalDescriptor& sig, const ChainConfig& cfg, double att_db) {
    if (!cfg.attenuator.is_valid_setting(att_db)) {
        std::ostringstream msg;
        msg << "attenuation " << att_db << " dB is not a valid attenuator setting";
        throw ConfigError(msg.str());
    }
    const auto lines = expand_signal(sig);
    return readout_lines(lines, cfg, att_db);
}

}  // namespace swsense
