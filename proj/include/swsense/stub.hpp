#pragma once

// Open-circuit sensing stub. The open-end voltage carries the drive power;
// the standing-wave ratio at each tap carries the frequency.

#include <span>
#include <string>
#include <vector>

#include "swsense/units.hpp"

namespace swsense {

struct TapSpec {
    std::string name;
    /// Frequency at which the tap sits a quarter wavelength from the open end.
    double f_max = 16e9;

    friend bool operator==(const TapSpec&, const TapSpec&) = default;
};

struct StubParams {
    double z0s = 50.0;
    /// Sorted by descending f_max.
    std::vector<TapSpec> taps{{"l1", 16e9}, {"l2", 5e9}};
    double eps_eff = 1.0;
    /// Sense resistor at the open end. Not electrically modelled.
    double r_d = 180.0;

    void validate() const;
    friend bool operator==(const StubParams&, const StubParams&) = default;
};

/// |V_OC| = sqrt(8 P Z0S).
double v_oc_magnitude(double p_stub_watts, double z0s);

/// |cos(pi/2 * f/f_max)|. Throws BijectivityError when f > f_max.
double standing_ratio(Frequency f, Frequency f_max);

/// Physical standing-wave magnitude with no bijectivity check; folds
/// periodically past f_max.
double standing_ratio_folded(double f_hz, double f_max_hz);

/// Physical tap distance from the open end.
double tap_length(Frequency f_max, double eps_eff);

struct TapVoltages {
    double v_oc = 0.0;
    /// One entry per StubParams::taps, same order.
    std::vector<double> taps;
};

/// Incoherent superposition over lines: v^2 = sum(v_oc_i^2 * ratio_i^2).
/// `stub_lines` carries the power incident on the stub per line.
TapVoltages tap_rms_voltages(std::span<const SpectralLine> stub_lines, const StubParams& stub);

/// Convenience form: one stub power per expanded line of `sig`.
TapVoltages tap_rms_voltages(const SignalDescriptor& sig, const StubParams& stub,
                             std::span<const double> p_stub_per_tone);

}  // namespace swsense
