#pragma once

// Monitor path from the sampling network to digital codes:
// coupling -> step attenuator -> amplifier -> stub -> log detectors -> ADC.

#include <cmath>
#include <span>
#include <vector>

#include "swsense/coupling.hpp"
#include "swsense/stub.hpp"
#include "swsense/table.hpp"
#include "swsense/units.hpp"

namespace swsense {

struct AttenuatorParams {
    double step_db = 0.25;
    double max_db = 31.75;
    double settle_time = 50e-9;

    void validate() const;
    /// True when att_db lies in [0, max_db] on the step grid.
    [[nodiscard]] bool is_valid_setting(double att_db) const;
    /// Nearest valid setting.
    [[nodiscard]] double quantize(double att_db) const;
    friend bool operator==(const AttenuatorParams&, const AttenuatorParams&) = default;
};

struct AmplifierParams {
    double gain_db = 20.0;
    double p_out_sat_dbm = 20.0;

    void validate() const;
    friend bool operator==(const AmplifierParams&, const AmplifierParams&) = default;
};

/// Open-end voltage produced by a given stub power, sqrt(8 P Z0).
inline double stub_voltage_for_dbm(double dbm, double z0s = 50.0) {
    return std::sqrt(8.0 * dbm_to_watts(dbm) * z0s);
}

struct DetectorParams {
    double slope_a = 0.4;
    double intercept_b = 1.0;
    /// Linear detection range, -40 dBm to 0 dBm of stub-referred power at 50 ohm.
    double v_in_min = stub_voltage_for_dbm(-40.0);
    double v_in_max = stub_voltage_for_dbm(0.0);

    void validate() const;
    friend bool operator==(const DetectorParams&, const DetectorParams&) = default;
};

struct AdcParams {
    int bits = 12;
    double sample_rate = 5e6;
    double v_fs = 1.398;

    void validate() const;
    [[nodiscard]] double lsb() const { return v_fs / static_cast<double>(1 << bits); }
    [[nodiscard]] int max_code() const { return (1 << bits) - 1; }
    [[nodiscard]] double sample_period() const { return 1.0 / sample_rate; }
    friend bool operator==(const AdcParams&, const AdcParams&) = default;
};

struct ChainConfig {
    CouplingKind coupling_kind = CouplingKind::tap;
    ResistiveTapParams tap;
    DirectionalCouplerParams coupler;
    AttenuatorParams attenuator;
    AmplifierParams amplifier;
    /// Optional additive gain ripple in dB versus frequency; empty means flat.
    FrequencyTable gain_ripple_db;
    StubParams stub;
    DetectorParams detector;
    AdcParams adc;
    /// Estimator moves from l1 to l2 below this frequency.
    double switch_frequency = 5e9;

    /// Throws ConfigError. The readout chain needs exactly two taps.
    void validate() const;
    friend bool operator==(const ChainConfig&, const ChainConfig&) = default;
};

/// One ADC sampling instant.
struct TapCodes {
    int code_oc = 0;
    int code_l1 = 0;
    int code_l2 = 0;
    double att_db = 0.0;
    double t = 0.0;

    friend bool operator==(const TapCodes&, const TapCodes&) = default;
};

double detector_voltage(double v_rms, const DetectorParams& p);
int adc_sample(double v, const AdcParams& p);

/// Code produced by a detector input at the bottom/top of its linear range.
int detector_floor_code(const ChainConfig& cfg);
int detector_ceiling_code(const ChainConfig& cfg);

/// Coupling into the monitor port at `freq_hz`, dB (negative).
double monitor_coupling_db(const ChainConfig& cfg, double freq_hz);
/// Through-path loss of the sampling network, positive dB.
double through_loss_db(const ChainConfig& cfg, double freq_hz);

/// Lines incident on the stub for lines incident on the sampling network.
std::vector<SpectralLine> stub_drive(std::span<const SpectralLine> lines, const ChainConfig& cfg,
                                     double att_db);

TapVoltages chain_voltages(std::span<const SpectralLine> lines, const ChainConfig& cfg,
                           double att_db);

/// Full readout of already-expanded lines at the sampling point.
TapCodes readout_lines(std::span<const SpectralLine> lines, const ChainConfig& cfg, double att_db,
                       double t = 0.0);

/// Full readout of a signal descriptor; att_db must be a valid attenuator
/// setting.
TapCodes chain_readout(const SignalDescriptor& sig, const ChainConfig& cfg, double att_db);

}  // namespace swsense
