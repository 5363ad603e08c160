#pragma once

// Signal sampling networks: the shunt resistive tap and a behavioural
// directional coupler, plus the standing-wave perturbation each one sees
// when a reflective filter sits downstream.

#include <complex>
#include <functional>
#include <string_view>
#include <vector>

#include "swsense/table.hpp"
#include "swsense/units.hpp"

namespace swsense {

/// Shunt tap: R_C in series with a matched monitor port, hung across the
/// through line.
struct ResistiveTapParams {
    double r_c = 220.0;
    double z0 = 50.0;

    void validate() const;
    friend bool operator==(const ResistiveTapParams&, const ResistiveTapParams&) = default;
};

struct TapSParams {
    double s11_db = 0.0;
    double s21_db = 0.0;
};

/// Coupling from the through line into the monitor port, in dB.
double tap_coupling(const ResistiveTapParams& p);
TapSParams tap_sparams(const ResistiveTapParams& p);
/// Fraction of the incident power dissipated in R_C. Independent of drive.
double tap_dissipation_fraction(const ResistiveTapParams& p);
/// Power dissipated in R_C, in watts.
double tap_dissipation(const ResistiveTapParams& p, PowerLevel p_in);
/// Largest input power keeping R_C dissipation within `limit_w`.
PowerLevel max_input_for_package(const ResistiveTapParams& p, double limit_w);

inline const std::vector<double> kDefaultPackageLimitsW{0.05, 0.1, 0.25, 1.0};

struct DirectionalCouplerParams {
    FrequencyTable coupling_db{-15.0};
    /// Through-path loss, positive dB.
    FrequencyTable insertion_db{{{1e9, 0.6}, {14e9, 1.6}}};
    FrequencyTable directivity_db{6.0};
    double f_min = 1e9;
    double f_max = 14e9;

    void validate() const;
    friend bool operator==(const DirectionalCouplerParams&, const DirectionalCouplerParams&) = default;
};

struct CouplerResponse {
    double coupling_db = 0.0;
    double insertion_db = 0.0;
    double directivity_db = 0.0;
};

/// Throws OutOfBandError outside [f_min, f_max].
CouplerResponse coupler_response(const DirectionalCouplerParams& p, Frequency f);

/// Loads a coupler description from CSV with header
/// `freq_hz, coupling_db, insertion_db, directivity_db`.
DirectionalCouplerParams load_coupler_csv(const std::string& path);
DirectionalCouplerParams parse_coupler_csv(std::string_view text);

enum class CouplingKind { tap, coupler };

std::string_view to_string(CouplingKind k);
CouplingKind coupling_kind_from_string(std::string_view s);

/// Downstream reflection as seen from the sampling point.
struct ReflectionEnvironment {
    std::function<std::complex<double>(double freq_hz)> gamma;
    /// One-way delay between sampling point and reflecting element.
    double electrical_delay = 0.0;
};

/// Multiplicative perturbation |1 + Γ·k·e^{-j2ωτ}| of the monitored
/// amplitude; k = 1 for the tap and the directivity leakage for the coupler.
double sampled_forward_amplitude(CouplingKind kind, const ReflectionEnvironment& env, Frequency f,
                                 const DirectionalCouplerParams& coupler = {});

/// Same as above for a known Γ at `f`.
double sampled_forward_amplitude(CouplingKind kind, std::complex<double> gamma,
                                 double electrical_delay, Frequency f,
                                 const DirectionalCouplerParams& coupler = {});

}  // namespace swsense
